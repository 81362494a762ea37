#include "capax/series.hpp"

#include "capax/kernels.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace capax::series {

using direct::kDim;

namespace {

// Nodal values of D^beta S and its gradient on the outer boundary, indexed
// by graded-lex rank; the right-hand sides of every recursion are moment
// sums against these fields.
struct KernelFields {
  std::vector<Vector> value;      // D^beta S at outer nodes
  std::vector<Matrix> grad;       // N x 3
  std::vector<Vector> normal_grad;  // nu . grad
};

KernelFields make_kernel_fields(const geom::Surface& s, int order) {
  if (order + 1 > kernels::max_order())
    throw ConfigError("series truncation needs kernel derivatives of order " +
                      std::to_string(order + 1) + "; raise the kernel max order");
  kernels::warm_cache(order + 1, kDim);
  const auto betas = MultiIndex::enumerate_up_to(order);
  KernelFields f;
  f.value.resize(betas.size());
  f.grad.resize(betas.size());
  f.normal_grad.resize(betas.size());
  const int n = s.size();
  for (std::size_t r = 0; r < betas.size(); ++r) {
    const auto& kd = kernels::kernel_derivative(betas[r], kDim);
    f.value[r].resize(n);
    f.grad[r].resize(n, 3);
    f.normal_grad[r].resize(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 x = s.node(i);
      f.value[r][i] = kernels::eval_kernel_derivative(kd, x);
      const Vec3 g = kernels::grad_kernel_derivative(betas[r], kDim, x);
      f.grad[r].row(i) = g;
      f.normal_grad[r][i] = s.normal(i).dot(g);
    }
  }
  return f;
}

// Monomial values s^beta at the hole nodes.
std::vector<Vector> make_monomials(const geom::Surface& s, int order) {
  const auto betas = MultiIndex::enumerate_up_to(order);
  std::vector<Vector> mono(betas.size(), Vector(s.size()));
  for (std::size_t r = 0; r < betas.size(); ++r)
    for (int i = 0; i < s.size(); ++i) {
      const Vec3 x = s.node(i);
      mono[r][i] = std::pow(x[0], betas[r].e[0]) * std::pow(x[1], betas[r].e[1]) *
                   std::pow(x[2], betas[r].e[2]);
    }
  return mono;
}

// Nodal values of the degree-l Taylor slices of u.
std::vector<Vector> make_slices(const geom::Surface& s, const TaylorPoly& u, int k_max) {
  std::vector<Vector> out(k_max + 1, Vector::Zero(s.size()));
  for (int l = 0; l <= std::min(k_max, u.max_degree()); ++l) {
    const TaylorPoly sl = u.slice(l);
    for (int i = 0; i < s.size(); ++i) out[l][i] = sl.eval(s.node(i));
  }
  return out;
}

}  // namespace

CoefficientTables rho_coefficients(const direct::ProblemSetup& setup, int k_max) {
  const auto& so = setup.outer.surface();
  const auto& sh = setup.hole.surface();
  const KernelFields fields = make_kernel_fields(so, k_max);
  const auto mono = make_monomials(sh, k_max);
  const auto betas = MultiIndex::enumerate_up_to(k_max);

  CoefficientTables t;
  t.k_max = k_max;
  t.rho_o.assign(k_max + 1, Vector::Zero(so.size()));
  t.rho_i.assign(k_max + 1, Vector::Zero(sh.size()));
  t.moment_rho.assign(k_max + 1, std::vector<double>(betas.size(), 0.0));

  std::vector<std::vector<Vec3>> m_grad(k_max + 1,
                                        std::vector<Vec3>(betas.size(), Vec3::Zero()));

  const auto hole_moments = [&](int k) {
    for (std::size_t r = 0; r < betas.size(); ++r)
      t.moment_rho[k][r] = sh.weights().dot(t.rho_i[k].cwiseProduct(mono[r]));
  };
  const auto outer_moments = [&](int l) {
    for (std::size_t r = 0; r < betas.size(); ++r) {
      Vec3 m = Vec3::Zero();
      for (int y = 0; y < so.size(); ++y)
        m += so.weight(y) * t.rho_o[l][y] * Vec3(fields.grad[r].row(y));
      m_grad[l][r] = m;
    }
  };

  for (int k = 0; k <= k_max; ++k) {
    // Hole side first: equilibrium at k = 0, zero for k in {1, .., d-2},
    // then the moment-driven systems.
    if (k == 0) {
      t.rho_i[0] = setup.hole.equilibrium();
    } else if (k <= kDim - 2) {
      t.rho_i[k].setZero();
    } else {
      const int m = k - (kDim - 1);
      Vector rhs = Vector::Zero(sh.size());
      for (int j = 0; j <= m; ++j) {
        const double sign = (j % 2 == 0) ? -1.0 : 1.0;  // (-1)^(j+1)
        for (const auto& beta : MultiIndex::enumerate_degree(j)) {
          const std::size_t r = beta.rank();
          const Vec3 mom = m_grad[m - j][r];
          const double inv_bf = 1.0 / beta.factorial();
          for (int i = 0; i < sh.size(); ++i)
            rhs[i] += sign * inv_bf * mono[r][i] * sh.normal(i).dot(mom);
        }
      }
      t.rho_i[k] = setup.hole.solve_charge(rhs, 0.0);
    }
    hole_moments(k);

    // Outer side: moment sums over all j <= k.
    Vector rhs = Vector::Zero(so.size());
    for (int j = 0; j <= k; ++j) {
      const double sign = (j % 2 == 0) ? -1.0 : 1.0;
      for (const auto& beta : MultiIndex::enumerate_degree(j)) {
        const std::size_t r = beta.rank();
        const double mom = t.moment_rho[k - j][r];
        if (mom == 0.0) continue;
        rhs += sign * (mom / beta.factorial()) * fields.normal_grad[r];
      }
    }
    t.rho_o[k] = setup.outer.solve_charge(rhs);
    outer_moments(k);
  }
  return t;
}

void theta_coefficients(const direct::ProblemSetup& setup, int k_max,
                        const TaylorPoly& u_a, CoefficientTables& t) {
  if (t.k_max < k_max)
    throw ConfigError("theta_coefficients: rho tables were built at a lower order");
  const auto& so = setup.outer.surface();
  const auto& sh = setup.hole.surface();
  const KernelFields fields = make_kernel_fields(so, k_max);
  const auto mono = make_monomials(sh, k_max);
  const auto betas = MultiIndex::enumerate_up_to(k_max);
  const auto ua_slice = make_slices(sh, u_a, k_max);

  t.theta_o.assign(k_max + 1, Vector::Zero(so.size()));
  t.theta_i.assign(k_max + 1, Vector::Zero(sh.size()));
  t.moment_theta.assign(k_max + 1, std::vector<Vec3>(betas.size(), Vec3::Zero()));

  std::vector<std::vector<double>> n_flux(k_max + 1,
                                          std::vector<double>(betas.size(), 0.0));

  const auto g_of = [&](int k) {
    double g = 0.0;
    for (int l = 0; l <= k; ++l)
      g += sh.weights().dot(ua_slice[l].cwiseProduct(t.rho_i[k - l]));
    return g;
  };

  for (int k = 0; k <= k_max; ++k) {
    // Outer dipole density vanishes through order d-1.
    if (k >= kDim) {
      const int m = k - (kDim - 1);
      Vector rhs = Vector::Zero(so.size());
      for (int j = 0; j <= m; ++j) {
        const double sign = (j % 2 == 0) ? -1.0 : 1.0;
        for (const auto& beta : MultiIndex::enumerate_degree(j)) {
          const std::size_t r = beta.rank();
          const Vec3 mom = t.moment_theta[m - j][r];
          if (mom.isZero(0.0)) continue;
          rhs += sign / beta.factorial() * (fields.grad[r] * mom);
        }
      }
      t.theta_o[k] = setup.outer.solve_dipole(rhs);
    }
    for (std::size_t r = 0; r < betas.size(); ++r)
      n_flux[k][r] = so.weights().dot(t.theta_o[k].cwiseProduct(fields.normal_grad[r]));

    if (k == 0) {
      t.theta_i[0].setZero();  // data constant minus its rho_i average
    } else {
      Vector rhs = Vector::Zero(sh.size());
      for (int j = 0; j <= k - (kDim - 1); ++j) {
        const double sign = (j % 2 == 0) ? -1.0 : 1.0;
        for (const auto& beta : MultiIndex::enumerate_degree(j)) {
          const std::size_t r = beta.rank();
          const double mom = n_flux[k - j][r];
          if (mom == 0.0) continue;
          rhs += sign * (mom / beta.factorial()) * mono[r];
        }
      }
      rhs += ua_slice[k];
      rhs.array() -= g_of(k);
      t.theta_i[k] = setup.hole.solve_dipole(rhs);
    }
    for (const auto& beta : betas) {
      const std::size_t r = beta.rank();
      Vec3 m = Vec3::Zero();
      for (int i = 0; i < sh.size(); ++i)
        m += sh.weight(i) * t.theta_i[k][i] * mono[r][i] * sh.normal(i);
      t.moment_theta[k][r] = m;
    }
  }
}

AuxSequences aux_sequences(const CoefficientTables& t, const direct::ProblemSetup& setup,
                           const TaylorPoly& u_a, const TaylorPoly& u_b, int k_max) {
  if (t.k_max < k_max || t.theta_i.size() <= static_cast<std::size_t>(k_max))
    throw ConfigError("aux_sequences: tables incomplete for the requested order");
  const auto& so = setup.outer.surface();
  const auto& sh = setup.hole.surface();
  const KernelFields fields = make_kernel_fields(so, k_max);
  const auto ua_slice = make_slices(sh, u_a, k_max);
  const auto ub_slice = make_slices(sh, u_b, k_max);

  AuxSequences aux;
  aux.k_max = k_max;
  aux.setup = &setup;
  aux.um_poly.assign(k_max + 1, TaylorPoly::constant(0.0));
  aux.vm_poly.assign(k_max + 1, TaylorPoly::constant(0.0));
  aux.um_trace_nd.assign(k_max + 1, Vector::Zero(sh.size()));
  aux.vm_trace_nd.assign(k_max + 1, Vector::Zero(sh.size()));
  aux.vm_trace.assign(k_max + 1, Vector::Zero(sh.size()));
  aux.g.assign(k_max + 1, 0.0);
  aux.r.assign(k_max + 1, 0.0);
  aux.u_tilde.assign(k_max + 1, Vector::Zero(sh.size()));
  aux.v_tilde.assign(k_max + 1, Vector::Zero(sh.size()));
  aux.g_tilde.assign(k_max + 1, Vector::Zero(sh.size()));
  aux.theta_i.assign(t.theta_i.begin(), t.theta_i.begin() + k_max + 1);
  aux.rho_i.assign(t.rho_i.begin(), t.rho_i.begin() + k_max + 1);

  // Outer-boundary moments entering the polynomial parts.
  const auto betas = MultiIndex::enumerate_up_to(k_max);
  std::vector<std::vector<double>> m_S(k_max + 1, std::vector<double>(betas.size(), 0.0));
  std::vector<std::vector<double>> n_flux(k_max + 1,
                                          std::vector<double>(betas.size(), 0.0));
  for (int l = 0; l <= k_max; ++l)
    for (std::size_t r = 0; r < betas.size(); ++r) {
      m_S[l][r] = so.weights().dot(t.rho_o[l].cwiseProduct(fields.value[r]));
      n_flux[l][r] = so.weights().dot(t.theta_o[l].cwiseProduct(fields.normal_grad[r]));
    }

  for (int k = 0; k <= k_max; ++k) {
    // Polynomial part of u_m (first sum omitted below order d).
    if (k >= kDim) {
      TaylorPoly p(k - kDim);
      for (int j = 0; j <= k - kDim; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // (-1)^j
        for (const auto& beta : MultiIndex::enumerate_degree(j))
          p.add_coeff(beta, sign / beta.factorial() * n_flux[k - j][beta.rank()]);
      }
      aux.um_poly[k] = p;
    }
    // Polynomial part of v_m (omitted below order d-2).
    if (k >= kDim - 2) {
      TaylorPoly p(k - (kDim - 2));
      for (int j = 0; j <= k - (kDim - 2); ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        for (const auto& beta : MultiIndex::enumerate_degree(j))
          p.add_coeff(beta,
                      sign / beta.factorial() * m_S[k - (kDim - 2) - j][beta.rank()]);
      }
      aux.vm_poly[k] = p;
    }

    Vector um_nd(sh.size()), vm_nd(sh.size()), vm_tr(sh.size());
    for (int i = 0; i < sh.size(); ++i) {
      const Vec3 x = sh.node(i);
      const Vec3 nu = sh.normal(i);
      um_nd[i] = nu.dot(aux.um_poly[k].grad_eval(x));
      vm_nd[i] = nu.dot(aux.vm_poly[k].grad_eval(x));
      vm_tr[i] = aux.vm_poly[k].eval(x);
    }
    // Exterior normal derivative of the hole double layer via the DtN map.
    const Vector w_trace = setup.hole.W() * t.theta_i[k] - 0.5 * t.theta_i[k];
    um_nd -= setup.hole.exterior_normal_derivative(w_trace);
    vm_nd += setup.hole.Wstar() * t.rho_i[k] + 0.5 * t.rho_i[k];
    vm_tr += setup.hole.V() * t.rho_i[k];
    aux.um_trace_nd[k] = um_nd;
    aux.vm_trace_nd[k] = vm_nd;
    aux.vm_trace[k] = vm_tr;

    double g = 0.0;
    for (int l = 0; l <= k; ++l)
      g += sh.weights().dot(ua_slice[l].cwiseProduct(t.rho_i[k - l]));
    aux.g[k] = g;
    aux.r[k] = sh.weights().dot(vm_tr) / sh.area();

    for (int l = 0; l <= k; ++l) {
      aux.u_tilde[k] += aux.um_trace_nd[l].cwiseProduct(ub_slice[k - l]);
      aux.g_tilde[k] += aux.g[l] * ub_slice[k - l];
    }
    aux.v_tilde[k] = vm_nd;
  }
  // u_m at order zero vanishes identically; enforce it exactly.
  aux.um_trace_nd[0].setZero();
  aux.u_tilde[0].setZero();
  return aux;
}

double AuxSequences::eval_um(int k, const Vec3& tpt) const {
  const auto& sh = setup->hole.surface();
  return um_poly[k].eval(tpt) - layer::eval_double_layer(sh, theta_i[k], {tpt})[0];
}

double AuxSequences::eval_vm(int k, const Vec3& tpt) const {
  const auto& sh = setup->hole.surface();
  return vm_poly[k].eval(tpt) + layer::eval_single_layer(sh, rho_i[k], {tpt})[0];
}

std::vector<Vector> lambda_tilde(const AuxSequences& aux, int k_max) {
  if (aux.k_max < k_max) throw ConfigError("lambda_tilde: aux sequences too short");
  const double r0 = aux.r[0];
  if (r0 == 0.0) throw NumericalError("lambda_tilde: normalizer r0 vanished");
  const int nh = static_cast<int>(aux.v_tilde[0].size());

  std::vector<Vector> a(k_max + 1, Vector::Zero(nh));
  for (int n = 0; n <= k_max; ++n)
    for (int k = 0; k <= n; ++k) a[n] += aux.g_tilde[n - k].cwiseProduct(aux.v_tilde[k]);

  // Reciprocal of the r-series: w0 = 1/r0, w_n = -(1/r0) sum r_k w_{n-k};
  // identical to the signed composition sums over integer compositions.
  std::vector<double> w(k_max + 1, 0.0);
  w[0] = 1.0 / r0;
  for (int n = 1; n <= k_max; ++n) {
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) sum += aux.r[k] * w[n - k];
    w[n] = -sum / r0;
  }

  std::vector<Vector> lam(k_max + 1, Vector::Zero(nh));
  for (int n = 0; n <= k_max; ++n) {
    lam[n] = aux.u_tilde[n];
    for (int k = 0; k <= n; ++k) lam[n] += a[n - k] * w[k];
  }
  return lam;
}

std::vector<double> xi_coefficients(const TaylorPoly& u_a, const TaylorPoly& u_b,
                                    const geom::Surface& hole_surface, int k_max) {
  std::vector<double> xi(k_max + 1, 0.0);
  const int deg = u_a.max_degree() + u_b.max_degree();
  const geom::VolumeRule rule = geom::volume_rule(hole_surface, std::max(deg, 1));

  const auto pair_integral = [&](const TaylorPoly& A, const TaylorPoly& B) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < rule.weights.size(); ++k) {
      const Vec3 p = rule.points.row(k);
      sum += rule.weights[k] * A.grad_eval(p).dot(B.grad_eval(p));
    }
    return sum;
  };

  for (int n = kDim; n <= k_max; ++n)
    for (int l = 0; l <= n - kDim; ++l) {
      const int da = l + 1;
      const int db = n - l - (kDim - 1);
      if (da > u_a.max_degree() || db > u_b.max_degree() || db < 1) continue;
      xi[n] += pair_integral(u_a.slice(da), u_b.slice(db));
    }
  return xi;
}

namespace {

std::vector<double> one_sided_coefficients(const direct::ProblemSetup& setup,
                                           const TaylorPoly& u_a, const TaylorPoly& u_b,
                                           int k_max, const CoefficientTables& rho_base) {
  CoefficientTables t = rho_base;
  theta_coefficients(setup, k_max, u_a, t);
  const AuxSequences aux = aux_sequences(t, setup, u_a, u_b, k_max);
  const auto lam = lambda_tilde(aux, k_max);
  const auto xi = xi_coefficients(u_a, u_b, setup.hole.surface(), k_max);
  const auto& wts = setup.hole.surface().weights();
  std::vector<double> c(k_max + 1, 0.0);
  for (int n = kDim - 2; n <= k_max; ++n)
    c[n] = -wts.dot(lam[n - (kDim - 2)]) + xi[n];
  return c;
}

}  // namespace

CapacitySeries capacity_series(const direct::ProblemSetup& setup, const TaylorPoly& u_a,
                               const TaylorPoly& u_b, int k_max) {
  if (k_max < 1) throw ConfigError("capacity_series: k_max must be >= 1");
  const CoefficientTables rho = rho_coefficients(setup, k_max);
  const auto cab = one_sided_coefficients(setup, u_a, u_b, k_max, rho);
  const auto cba = one_sided_coefficients(setup, u_b, u_a, k_max, rho);

  CapacitySeries s;
  s.k_max = k_max;
  s.c.resize(k_max + 1, 0.0);
  for (int n = 0; n <= k_max; ++n) s.c[n] = 0.5 * (cab[n] + cba[n]);
  s.xi = xi_coefficients(u_a, u_b, setup.hole.surface(), k_max);
  s.r0 = setup.hole.equilibrium_potential_mean();
  double sup = 0.0;
  for (int n = 1; n <= k_max; ++n)
    if (s.c[n] != 0.0) sup = std::max(sup, std::pow(std::abs(s.c[n]), 1.0 / n));
  s.empirical_radius = sup > 0 ? 1.0 / sup : std::numeric_limits<double>::infinity();
  s.outer_hash = setup.outer.surface().content_hash();
  s.hole_hash = setup.hole.surface().content_hash();
  return s;
}

CapacitySeries capacity_series(const geom::Surface& outer, const geom::Surface& hole,
                               const TaylorPoly& u_a, const TaylorPoly& u_b, int k_max) {
  direct::ProblemSetup setup(outer, hole);
  return capacity_series(setup, u_a, u_b, k_max);
}

double eval_series(const CapacitySeries& series, double eps) {
  double v = 0.0;
  for (int n = series.k_max; n >= 0; --n) v = v * eps + series.c[n];
  return v;
}

LeadingTerm leading_coefficient_vanishing(const direct::HoleOps& hole,
                                          const TaylorPoly& u_a, const TaylorPoly& u_b) {
  const int ka = u_a.vanishing_order();
  const int kb = u_b.vanishing_order();
  LeadingTerm out;
  out.exponent = ka + kb + kDim - 2;
  out.coefficient = direct::frak_C(hole, u_a.slice(ka), u_b.slice(kb));
  return out;
}

LeadingTerm leading_coefficient_vanishing(const geom::Surface& hole_surface,
                                          const TaylorPoly& u_a, const TaylorPoly& u_b) {
  return leading_coefficient_vanishing(direct::HoleOps(hole_surface), u_a, u_b);
}

void export_csv(const CapacitySeries& series, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("export_csv: cannot open " + path);
  std::fprintf(f, "n,c_n\n");
  for (int n = 0; n <= series.k_max; ++n) std::fprintf(f, "%d,%.17g\n", n, series.c[n]);
  std::fclose(f);
}

std::string to_json(const CapacitySeries& series) {
  nlohmann::json j;
  j["k_max"] = series.k_max;
  j["c"] = series.c;
  j["xi"] = series.xi;
  j["r0"] = series.r0;
  j["empirical_radius"] = series.empirical_radius;
  j["empirical_radius_method"] = "ratio-test heuristic over the computed range";
  j["outer_surface_hash"] = hash_hex(series.outer_hash);
  j["hole_surface_hash"] = hash_hex(series.hole_hash);
  return j.dump(2);
}

}  // namespace capax::series
