#include "capax/direct_solver.hpp"

#include <cmath>

namespace capax::direct {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

Vec3 grad_s3(const Vec3& z) {
  const double r = z.norm();
  return z / (kFourPi * r * r * r);
}

double s3(const Vec3& z) { return -1.0 / (kFourPi * z.norm()); }

}  // namespace

BorderedSystem::BorderedSystem(const Matrix& A, const Vector& border_col,
                               const Vector& constraint_row) {
  n_ = static_cast<int>(A.rows());
  full_.setZero(n_ + 1, n_ + 1);
  full_.topLeftCorner(n_, n_) = A;
  full_.topRightCorner(n_, 1) = border_col;
  full_.bottomLeftCorner(1, n_) = constraint_row.transpose();
  lu_.compute(full_);
  if (lu_.rcond() < 1e-14)
    throw NumericalError("bordered system numerically singular, rcond=" +
                         std::to_string(lu_.rcond()));
}

Vector BorderedSystem::solve(const Vector& b, double c, double* lagrange,
                             double* residual) const {
  Vector rhs(n_ + 1);
  rhs.head(n_) = b;
  rhs[n_] = c;
  const Vector sol = lu_.solve(rhs);
  if (lagrange) *lagrange = sol[n_];
  if (residual) {
    const double scale = std::max(rhs.norm(), sol.norm()) + 1e-300;
    *residual = (full_ * sol - rhs).norm() / scale;
  }
  return sol.head(n_);
}

HoleOps::HoleOps(geom::Surface s) : s_(std::make_shared<geom::Surface>(std::move(s))) {
  using layer::OperatorKind;
  layer::BoundaryOperator Wop = layer::assemble(OperatorKind::DoubleLayerTrace, *s_);
  W_ = Wop.matrix;
  Wstar_ = layer::weighted_adjoint(W_, *s_);
  layer::BoundaryOperator Vop = layer::assemble(OperatorKind::SingleLayerTrace, *s_);
  V_ = Vop.matrix;

  const int n = s_->size();
  const Vector ones = Vector::Ones(n);
  Matrix half_minus_wstar = -Wstar_;
  half_minus_wstar.diagonal().array() += 0.5;
  charge_system_ = BorderedSystem(half_minus_wstar, ones, s_->weights());
  Matrix half_minus_w = -W_;
  half_minus_w.diagonal().array() += 0.5;
  dipole_system_ = BorderedSystem(half_minus_w, ones, s_->weights());

  layer::BoundaryOperator Wstar_op{Wstar_, OperatorKind::AdjointDoubleLayer, s_.get()};
  dtn_ = std::make_unique<layer::ExteriorDtN>(*s_, Vop, Wstar_op);

  equilibrium_ = solve_charge(Vector::Zero(n), 1.0);
  r0_ = s_->weights().dot(V_ * equilibrium_) / s_->area();
  if (!(r0_ < 0))
    throw NumericalError("equilibrium potential mean came out non-negative: r0=" +
                         std::to_string(r0_));
}

Vector HoleOps::solve_charge(const Vector& rhs, double total_charge, double* lagrange,
                             double* residual) const {
  return charge_system_.solve(rhs, total_charge, lagrange, residual);
}

Vector HoleOps::solve_dipole(const Vector& rhs, double* lagrange, double* residual) const {
  return dipole_system_.solve(rhs, 0.0, lagrange, residual);
}

OuterOps::OuterOps(geom::Surface s) : s_(std::make_shared<geom::Surface>(std::move(s))) {
  using layer::OperatorKind;
  W_ = layer::assemble(OperatorKind::DoubleLayerTrace, *s_).matrix;
  Wstar_ = layer::weighted_adjoint(W_, *s_);
  Matrix a = Wstar_;
  a.diagonal().array() += 0.5;
  lu_charge_.compute(a);
  Matrix b = W_;
  b.diagonal().array() += 0.5;
  lu_dipole_.compute(b);
  if (lu_charge_.rcond() < 1e-14 || lu_dipole_.rcond() < 1e-14)
    throw NumericalError("outer boundary operator numerically singular");
}

const Matrix& OuterOps::V() const {
  std::call_once(v_once_, [&] {
    V_ = layer::assemble(layer::OperatorKind::SingleLayerTrace, *s_).matrix;
  });
  return *V_;
}

Vector OuterOps::solve_charge(const Vector& rhs) const { return lu_charge_.solve(rhs); }
Vector OuterOps::solve_dipole(const Vector& rhs) const { return lu_dipole_.solve(rhs); }

void ProblemSetup::check_epsilon(double eps) const {
  if (eps < 0) throw GeometryError("epsilon must be non-negative");
  if (eps == 0) return;
  if (eps >= max_epsilon())
    throw GeometryError("epsilon " + std::to_string(eps) +
                        " violates the hole containment bound " +
                        std::to_string(max_epsilon()));
}

namespace {

// Coupled bordered system shared by the charge (rho) and dipole (theta)
// problems: unknowns [outer; hole; lagrange].
struct CoupledBlocks {
  Matrix full;
  int n_outer = 0, n_hole = 0;
};

CoupledBlocks rho_blocks(const ProblemSetup& setup, double eps) {
  const auto& so = setup.outer.surface();
  const auto& sh = setup.hole.surface();
  const int no = so.size(), nh = sh.size();
  CoupledBlocks cb;
  cb.n_outer = no;
  cb.n_hole = nh;
  cb.full.setZero(no + nh + 1, no + nh + 1);
  cb.full.topLeftCorner(no, no) = setup.outer.Wstar();
  cb.full.topLeftCorner(no, no).diagonal().array() += 0.5;
  Matrix a22 = -setup.hole.Wstar();
  a22.diagonal().array() += 0.5;
  cb.full.block(no, no, nh, nh) = a22;
  const double eps_dm1 = std::pow(eps, kDim - 1);
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < nh; ++j)
      cb.full(i, no + j) =
          sh.weight(j) * setup.outer.surface().normal(i).dot(grad_s3(so.node(i) - eps * sh.node(j)));
  if (eps != 0.0)
    for (int i = 0; i < nh; ++i)
      for (int j = 0; j < no; ++j)
        cb.full(no + i, j) =
            -eps_dm1 * so.weight(j) * sh.normal(i).dot(grad_s3(eps * sh.node(i) - so.node(j)));
  for (int i = 0; i < nh; ++i) {
    cb.full(no + i, no + nh) = 1.0;                  // Lagrange column
    cb.full(no + nh, no + i) = sh.weight(i);         // total-charge row
  }
  return cb;
}

CoupledBlocks theta_blocks(const ProblemSetup& setup, double eps) {
  const auto& so = setup.outer.surface();
  const auto& sh = setup.hole.surface();
  const int no = so.size(), nh = sh.size();
  CoupledBlocks cb;
  cb.n_outer = no;
  cb.n_hole = nh;
  cb.full.setZero(no + nh + 1, no + nh + 1);
  cb.full.topLeftCorner(no, no) = setup.outer.W();
  cb.full.topLeftCorner(no, no).diagonal().array() += 0.5;
  Matrix b22 = -setup.hole.W();
  b22.diagonal().array() += 0.5;
  cb.full.block(no, no, nh, nh) = b22;
  const double eps_dm1 = std::pow(eps, kDim - 1);
  if (eps != 0.0)
    for (int i = 0; i < no; ++i)
      for (int j = 0; j < nh; ++j)
        cb.full(i, no + j) =
            eps_dm1 * sh.weight(j) * sh.normal(j).dot(grad_s3(so.node(i) - eps * sh.node(j)));
  for (int i = 0; i < nh; ++i)
    for (int j = 0; j < no; ++j)
      cb.full(no + i, j) =
          -so.weight(j) * so.normal(j).dot(grad_s3(eps * sh.node(i) - so.node(j)));
  for (int i = 0; i < nh; ++i) {
    cb.full(no + i, no + nh) = 1.0;
    cb.full(no + nh, no + i) = sh.weight(i);
  }
  return cb;
}

}  // namespace

DensityPair solve_rho(const ProblemSetup& setup, double eps) {
  setup.check_epsilon(eps);
  CoupledBlocks cb = rho_blocks(setup, eps);
  Eigen::PartialPivLU<Matrix> lu(cb.full);
  if (lu.rcond() < 1e-14)
    throw NumericalError("charge system singular at eps=" + std::to_string(eps) +
                         ", rcond=" + std::to_string(lu.rcond()));
  Vector rhs = Vector::Zero(cb.n_outer + cb.n_hole + 1);
  rhs[cb.n_outer + cb.n_hole] = 1.0;
  const Vector sol = lu.solve(rhs);

  DensityPair out;
  out.rho_o = {&setup.outer.surface(), sol.head(cb.n_outer), false};
  out.rho_i = {&setup.hole.surface(), sol.segment(cb.n_outer, cb.n_hole), false};
  out.constraint_value = setup.hole.surface().weights().dot(out.rho_i.values);
  out.lagrange = sol[cb.n_outer + cb.n_hole];
  out.residual = (cb.full * sol - rhs).norm() / (rhs.norm() + sol.norm() + 1e-300);
  if (out.residual > 1e-8)
    throw NumericalError("charge system residual " + std::to_string(out.residual) +
                         " at eps=" + std::to_string(eps));
  return out;
}

ThetaPair solve_theta(const ProblemSetup& setup, double eps, const TaylorPoly& u_a,
                      const DensityPair& rho) {
  setup.check_epsilon(eps);
  CoupledBlocks cb = theta_blocks(setup, eps);
  Eigen::PartialPivLU<Matrix> lu(cb.full);
  if (lu.rcond() < 1e-14)
    throw NumericalError("dipole system singular at eps=" + std::to_string(eps));

  const auto& sh = setup.hole.surface();
  double coupling = 0.0;
  for (int s = 0; s < sh.size(); ++s)
    coupling += sh.weight(s) * u_a.eval(eps * sh.node(s)) * rho.rho_i.values[s];
  Vector rhs = Vector::Zero(cb.n_outer + cb.n_hole + 1);
  for (int t = 0; t < sh.size(); ++t)
    rhs[cb.n_outer + t] = u_a.eval(eps * sh.node(t)) - coupling;
  const Vector sol = lu.solve(rhs);

  ThetaPair out;
  out.theta_o = {&setup.outer.surface(), sol.head(cb.n_outer), false};
  out.theta_i = {&setup.hole.surface(), sol.segment(cb.n_outer, cb.n_hole), true};
  out.lagrange = sol[cb.n_outer + cb.n_hole];
  out.residual = (cb.full * sol - rhs).norm() / (rhs.norm() + sol.norm() + 1e-300);
  if (out.residual > 1e-8)
    throw NumericalError("dipole system residual " + std::to_string(out.residual));
  if (!out.theta_i.mean_zero_ok())
    throw NumericalError("theta_i violated the zero-mean constraint");
  return out;
}

RescaledPotential::RescaledPotential(const ProblemSetup& setup, double eps, TaylorPoly u_a)
    : setup_(&setup), eps_(eps), u_a_(std::move(u_a)) {
  if (eps <= 0) throw GeometryError("RescaledPotential: eps must be positive");
  rho_ = solve_rho(setup, eps);
  theta_ = solve_theta(setup, eps, u_a_, rho_);
  const auto& sh = setup.hole.surface();
  for (int s = 0; s < sh.size(); ++s)
    coupling_ += sh.weight(s) * u_a_.eval(eps * sh.node(s)) * rho_.rho_i.values[s];

  // Mean over the hole boundary of eps^(d-2) v[outer] (eps s) + v[hole](s).
  const double eps_dm2 = std::pow(eps, kDim - 2);
  const Vector v_hole_trace = setup.hole.V() * rho_.rho_i.values;
  double mean = 0.0;
  const auto& so = setup.outer.surface();
  for (int s = 0; s < sh.size(); ++s) {
    double v_outer = 0.0;
    for (int y = 0; y < so.size(); ++y)
      v_outer += so.weight(y) * rho_.rho_o.values[y] * s3(eps * sh.node(s) - so.node(y));
    mean += sh.weight(s) * (eps_dm2 * v_outer + v_hole_trace[s]);
  }
  normalizer_ = mean / sh.area();
}

double RescaledPotential::eval(const Vec3& t) const {
  return eval(std::vector<Vec3>{t})[0];
}

std::vector<double> RescaledPotential::eval(const std::vector<Vec3>& ts) const {
  const auto& so = setup_->outer.surface();
  const auto& sh = setup_->hole.surface();
  std::vector<Vec3> xs(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) xs[k] = eps_ * ts[k];
  const Vector w_outer = layer::eval_double_layer(so, theta_.theta_o.values, xs);
  const Vector w_hole = layer::eval_double_layer(sh, theta_.theta_i.values, ts);
  const Vector v_outer = layer::eval_single_layer(so, rho_.rho_o.values, xs);
  const Vector v_hole = layer::eval_single_layer(sh, rho_.rho_i.values, ts);
  const double eps_dm2 = std::pow(eps_, kDim - 2);
  std::vector<double> out(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    out[k] = w_outer[k] - w_hole[k] +
             coupling_ * (eps_dm2 * v_outer[k] + v_hole[k]) / normalizer_;
  return out;
}

Vector RescaledPotential::boundary_trace_hole() const {
  const auto& so = setup_->outer.surface();
  const auto& sh = setup_->hole.surface();
  const int nh = sh.size();
  std::vector<Vec3> xs(nh);
  for (int s = 0; s < nh; ++s) xs[s] = eps_ * sh.node(s);
  const Vector w_outer = layer::eval_double_layer(so, theta_.theta_o.values, xs);
  const Vector v_outer = layer::eval_single_layer(so, rho_.rho_o.values, xs);
  // Exterior trace of the hole double layer: (-1/2 I + W).
  Vector w_hole = setup_->hole.W() * theta_.theta_i.values - 0.5 * theta_.theta_i.values;
  const Vector v_hole = setup_->hole.V() * rho_.rho_i.values;
  const double eps_dm2 = std::pow(eps_, kDim - 2);
  Vector out(nh);
  for (int s = 0; s < nh; ++s)
    out[s] = w_outer[s] - w_hole[s] +
             coupling_ * (eps_dm2 * v_outer[s] + v_hole[s]) / normalizer_;
  return out;
}

Vector RescaledPotential::boundary_trace_outer() const {
  const auto& so = setup_->outer.surface();
  const auto& sh = setup_->hole.surface();
  const int no = so.size();
  std::vector<Vec3> ts(no);
  for (int x = 0; x < no; ++x) ts[x] = so.node(x) / eps_;
  // Interior trace of the outer double layer: (1/2 I + W).
  Vector w_outer = setup_->outer.W() * theta_.theta_o.values + 0.5 * theta_.theta_o.values;
  const Vector w_hole = layer::eval_double_layer(sh, theta_.theta_i.values, ts);
  const Vector v_outer = setup_->outer.V() * rho_.rho_o.values;
  const Vector v_hole = layer::eval_single_layer(sh, rho_.rho_i.values, ts);
  const double eps_dm2 = std::pow(eps_, kDim - 2);
  Vector out(no);
  for (int x = 0; x < no; ++x)
    out[x] = w_outer[x] - w_hole[x] +
             coupling_ * (eps_dm2 * v_outer[x] + v_hole[x]) / normalizer_;
  return out;
}

Vector RescaledPotential::normal_derivative_hole() const {
  const auto& so = setup_->outer.surface();
  const auto& sh = setup_->hole.surface();
  const int nh = sh.size();
  std::vector<Vec3> xs(nh);
  for (int s = 0; s < nh; ++s) xs[s] = eps_ * sh.node(s);
  const auto grad_w_outer = layer::eval_grad_double_layer(so, theta_.theta_o.values, xs);
  const auto grad_v_outer = layer::eval_grad_single_layer(so, rho_.rho_o.values, xs);
  // Exterior normal derivative of the hole double layer via the DtN map.
  Vector w_hole_trace =
      setup_->hole.W() * theta_.theta_i.values - 0.5 * theta_.theta_i.values;
  const Vector nd_w_hole = setup_->hole.exterior_normal_derivative(w_hole_trace);
  Vector nd_v_hole = setup_->hole.Wstar() * rho_.rho_i.values + 0.5 * rho_.rho_i.values;
  const double eps_dm2 = std::pow(eps_, kDim - 2);
  Vector out(nh);
  for (int s = 0; s < nh; ++s) {
    const Vec3 nu = sh.normal(s);
    out[s] = eps_ * nu.dot(grad_w_outer[s]) - nd_w_hole[s] +
             coupling_ *
                 (eps_dm2 * eps_ * nu.dot(grad_v_outer[s]) + nd_v_hole[s]) /
                 normalizer_;
  }
  return out;
}

namespace {

// One argument order of the capacity formula: boundary flux plus the
// interior gradient term.
double capacity_one_sided(const ProblemSetup& setup, double eps,
                          const RescaledPotential& pot_a, const TaylorPoly& u_b,
                          const geom::VolumeRule& rule, const TaylorPoly& u_a) {
  const auto& sh = setup.hole.surface();
  const Vector nd = pot_a.normal_derivative_hole();
  double flux = 0.0;
  for (int t = 0; t < sh.size(); ++t)
    flux += sh.weight(t) * nd[t] * u_b.eval(eps * sh.node(t));
  double vol = 0.0;
  for (Eigen::Index k = 0; k < rule.weights.size(); ++k) {
    const Vec3 p = eps * Vec3(rule.points.row(k));
    vol += rule.weights[k] * u_a.grad_eval(p).dot(u_b.grad_eval(p));
  }
  return -std::pow(eps, kDim - 2) * flux + std::pow(eps, kDim) * vol;
}

}  // namespace

double capacity_direct(const ProblemSetup& setup, double eps, const TaylorPoly& u_a,
                       const TaylorPoly& u_b) {
  const RescaledPotential pot_a(setup, eps, u_a);
  const RescaledPotential pot_b(setup, eps, u_b);
  const int deg = u_a.max_degree() + u_b.max_degree();
  const geom::VolumeRule rule = geom::volume_rule(setup.hole.surface(), deg);
  const double cab = capacity_one_sided(setup, eps, pot_a, u_b, rule, u_a);
  const double cba = capacity_one_sided(setup, eps, pot_b, u_a, rule, u_b);
  return 0.5 * (cab + cba);
}

double newtonian_capacity(const HoleOps& hole) {
  return -1.0 / hole.equilibrium_potential_mean();
}

double newtonian_capacity(const geom::Surface& hole_surface) {
  return newtonian_capacity(HoleOps(hole_surface));
}

ExteriorDirichlet::ExteriorDirichlet(std::shared_ptr<const HoleOps> ops, Vector g)
    : ops_(std::move(ops)), g_(std::move(g)) {
  const auto& s = ops_->surface();
  if (g_.size() != s.size())
    throw ConfigError("exterior_dirichlet: boundary data size mismatch");
  const double r0 = ops_->equilibrium_potential_mean();
  equilibrium_coef_ = s.weights().dot(g_.cwiseProduct(ops_->equilibrium())) / r0;
  const Vector v_eq = ops_->V() * ops_->equilibrium();
  // (-1/2 I + W) mu + tau = g - c v[eq]  solved through the dipole system.
  const Vector rhs = -(g_ - equilibrium_coef_ * v_eq);
  mu_ = ops_->solve_dipole(rhs);
  normal_derivative_ = ops_->exterior_normal_derivative(g_);
  const double s_d = kFourPi;  // unit-sphere measure, d = 3
  decay_limit_ = -s.weights().dot(g_.cwiseProduct(ops_->equilibrium())) /
                 ((kDim - 2) * s_d * r0);
}

double ExteriorDirichlet::eval(const Vec3& t) const {
  return eval(std::vector<Vec3>{t})[0];
}

std::vector<double> ExteriorDirichlet::eval(const std::vector<Vec3>& ts) const {
  const auto& s = ops_->surface();
  const Vector w = layer::eval_double_layer(s, mu_, ts);
  const Vector v = layer::eval_single_layer(s, ops_->equilibrium(), ts);
  std::vector<double> out(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k)
    out[k] = w[k] + equilibrium_coef_ * v[k];
  return out;
}

ExteriorDirichlet exterior_dirichlet(std::shared_ptr<const HoleOps> ops, const Vector& g) {
  return ExteriorDirichlet(std::move(ops), g);
}

ExteriorDirichlet exterior_dirichlet(const geom::Surface& hole_surface, const Vector& g) {
  return ExteriorDirichlet(std::make_shared<const HoleOps>(hole_surface), g);
}

double frak_C(const HoleOps& hole, const TaylorPoly& p_a, const TaylorPoly& p_b) {
  if (!p_a.is_homogeneous() || !p_b.is_homogeneous())
    throw ConfigError("frak_C: inputs must be homogeneous polynomials");
  if (p_a.is_zero() || p_b.is_zero()) return 0.0;
  const auto& s = hole.surface();
  const int n = s.size();
  Vector ga(n), gb(n);
  for (int i = 0; i < n; ++i) {
    ga[i] = p_a.eval(s.node(i));
    gb[i] = p_b.eval(s.node(i));
  }
  const Vector nda = hole.exterior_normal_derivative(ga);
  const Vector ndb = hole.exterior_normal_derivative(gb);
  const double exterior =
      -0.5 * (s.weights().dot(nda.cwiseProduct(gb)) + s.weights().dot(ndb.cwiseProduct(ga)));

  const int deg = std::max(p_a.max_degree() + p_b.max_degree() - 2, 0);
  const geom::VolumeRule rule = geom::volume_rule(s, deg);
  double interior = 0.0;
  for (Eigen::Index k = 0; k < rule.weights.size(); ++k) {
    const Vec3 p = rule.points.row(k);
    interior += rule.weights[k] * p_a.grad_eval(p).dot(p_b.grad_eval(p));
  }

  if (p_a.is_harmonic() && p_b.is_harmonic()) {
    // Boundary reduction of the interior term, valid for harmonic inputs.
    double reduced = 0.0;
    for (int i = 0; i < n; ++i)
      reduced += s.weight(i) * gb[i] * s.normal(i).dot(p_a.grad_eval(s.node(i)));
    log_debug("frak_C interior term " + std::to_string(interior) +
              " vs harmonic boundary reduction " + std::to_string(reduced));
  }
  return exterior + interior;
}

double frak_C(const geom::Surface& hole_surface, const TaylorPoly& p_a,
              const TaylorPoly& p_b) {
  return frak_C(HoleOps(hole_surface), p_a, p_b);
}

}  // namespace capax::direct
