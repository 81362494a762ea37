#include "capax/taylor_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace capax {

TaylorPoly::TaylorPoly(int max_degree)
    : max_degree_(max_degree), coef_(MultiIndex::count_up_to(max_degree), 0.0) {}

TaylorPoly TaylorPoly::constant(double c) {
  TaylorPoly p(0);
  p.coef_[0] = c;
  return p;
}

TaylorPoly TaylorPoly::monomial(const MultiIndex& beta, double c) {
  TaylorPoly p(beta.order());
  p.set_coeff(beta, c);
  return p;
}

TaylorPoly TaylorPoly::radial_even(const std::vector<double>& c) {
  TaylorPoly r2(2);
  r2.set_coeff(MultiIndex{{2, 0, 0}}, 1.0);
  r2.set_coeff(MultiIndex{{0, 2, 0}}, 1.0);
  r2.set_coeff(MultiIndex{{0, 0, 2}}, 1.0);
  TaylorPoly out = constant(c.empty() ? 0.0 : c[0]);
  TaylorPoly pow = constant(1.0);
  for (std::size_t k = 1; k < c.size(); ++k) {
    pow = pow.times(r2);
    out = out.plus(pow.scaled(c[k]));
  }
  return out;
}

double TaylorPoly::coeff(const MultiIndex& beta) const {
  if (beta.order() > max_degree_) return 0.0;
  return coef_[beta.rank()];
}

void TaylorPoly::set_coeff(const MultiIndex& beta, double v) {
  if (beta.order() > max_degree_) {
    max_degree_ = beta.order();
    coef_.resize(MultiIndex::count_up_to(max_degree_), 0.0);
  }
  coef_[beta.rank()] = v;
}

void TaylorPoly::add_coeff(const MultiIndex& beta, double v) {
  set_coeff(beta, coeff(beta) + v);
}

namespace {

// Power tables x^0..x^deg for the three coordinates.
struct Powers {
  double p[3][36];
  Powers(const Vec3& x, int deg) {
    for (int a = 0; a < 3; ++a) {
      p[a][0] = 1.0;
      for (int i = 1; i <= deg; ++i) p[a][i] = p[a][i - 1] * x[a];
    }
  }
};

}  // namespace

double TaylorPoly::eval(const Vec3& x) const {
  const Powers pw(x, max_degree_);
  const auto& idx = MultiIndex::table_up_to(max_degree_);
  double sum = 0.0;
  for (std::size_t r = 0; r < coef_.size(); ++r) {
    const double c = coef_[r];
    if (c == 0.0) continue;
    sum += c * pw.p[0][idx[r].e[0]] * pw.p[1][idx[r].e[1]] * pw.p[2][idx[r].e[2]];
  }
  return sum;
}

Vec3 TaylorPoly::grad_eval(const Vec3& x) const {
  const Powers pw(x, max_degree_);
  const auto& idx = MultiIndex::table_up_to(max_degree_);
  Vec3 g = Vec3::Zero();
  for (std::size_t r = 0; r < coef_.size(); ++r) {
    const double c = coef_[r];
    if (c == 0.0) continue;
    const auto& e = idx[r].e;
    if (e[0] > 0) g[0] += c * e[0] * pw.p[0][e[0] - 1] * pw.p[1][e[1]] * pw.p[2][e[2]];
    if (e[1] > 0) g[1] += c * e[1] * pw.p[0][e[0]] * pw.p[1][e[1] - 1] * pw.p[2][e[2]];
    if (e[2] > 0) g[2] += c * e[2] * pw.p[0][e[0]] * pw.p[1][e[1]] * pw.p[2][e[2] - 1];
  }
  return g;
}

TaylorPoly TaylorPoly::derivative(int axis) const {
  TaylorPoly out(std::max(0, max_degree_ - 1));
  const auto idx = MultiIndex::enumerate_up_to(max_degree_);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double c = coef_[r];
    if (c == 0.0 || idx[r].e[axis] == 0) continue;
    MultiIndex b = idx[r];
    const int p = b.e[axis];
    b.e[axis] -= 1;
    out.add_coeff(b, c * p);
  }
  return out;
}

TaylorPoly TaylorPoly::laplacian() const {
  TaylorPoly out(std::max(0, max_degree_ - 2));
  for (int ax = 0; ax < 3; ++ax) out = out.plus(derivative(ax).derivative(ax));
  return out;
}

TaylorPoly TaylorPoly::times(const TaylorPoly& other) const {
  TaylorPoly out(max_degree_ + other.max_degree_);
  const auto ia = MultiIndex::enumerate_up_to(max_degree_);
  const auto ib = MultiIndex::enumerate_up_to(other.max_degree_);
  for (std::size_t ra = 0; ra < ia.size(); ++ra) {
    const double ca = coef_[ra];
    if (ca == 0.0) continue;
    for (std::size_t rb = 0; rb < ib.size(); ++rb) {
      const double cb = other.coef_[rb];
      if (cb == 0.0) continue;
      MultiIndex s{{ia[ra].e[0] + ib[rb].e[0], ia[ra].e[1] + ib[rb].e[1],
                    ia[ra].e[2] + ib[rb].e[2]}};
      out.add_coeff(s, ca * cb);
    }
  }
  return out;
}

TaylorPoly TaylorPoly::plus(const TaylorPoly& other) const {
  TaylorPoly out(std::max(max_degree_, other.max_degree_));
  for (std::size_t r = 0; r < out.coef_.size(); ++r) {
    const double a = r < coef_.size() ? coef_[r] : 0.0;
    const double b = r < other.coef_.size() ? other.coef_[r] : 0.0;
    out.coef_[r] = a + b;
  }
  return out;
}

TaylorPoly TaylorPoly::scaled(double a) const {
  TaylorPoly out = *this;
  for (auto& c : out.coef_) c *= a;
  return out;
}

TaylorPoly TaylorPoly::slice(int degree) const {
  TaylorPoly out(std::max(0, degree));
  if (degree < 0 || degree > max_degree_) return out;
  for (const auto& b : MultiIndex::enumerate_degree(degree)) out.set_coeff(b, coeff(b));
  return out;
}

double TaylorPoly::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coef_) m = std::max(m, std::abs(c));
  return m;
}

double TaylorPoly::max_abs_coeff_of_degree(int degree) const {
  double m = 0.0;
  if (degree < 0 || degree > max_degree_) return 0.0;
  for (const auto& b : MultiIndex::enumerate_degree(degree))
    m = std::max(m, std::abs(coeff(b)));
  return m;
}

int TaylorPoly::vanishing_order(double rel_tol) const {
  const double scale = max_abs_coeff();
  if (scale <= 0.0)
    throw NumericalError("vanishing_order: polynomial is identically zero");
  for (int j = 0; j <= max_degree_; ++j)
    if (max_abs_coeff_of_degree(j) > rel_tol * scale) return j;
  throw NumericalError("vanishing_order: all coefficient blocks below tolerance");
}

bool TaylorPoly::is_zero(double rel_tol) const {
  (void)rel_tol;
  return max_abs_coeff() == 0.0;
}

bool TaylorPoly::is_homogeneous(double rel_tol) const {
  const double scale = max_abs_coeff();
  if (scale <= 0.0) return true;
  int found = -1;
  for (int j = 0; j <= max_degree_; ++j) {
    if (max_abs_coeff_of_degree(j) > rel_tol * scale) {
      if (found >= 0) return false;
      found = j;
    }
  }
  return true;
}

bool TaylorPoly::is_harmonic(double rel_tol) const {
  const double scale = max_abs_coeff();
  if (scale <= 0.0) return true;
  return laplacian().max_abs_coeff() <= rel_tol * scale;
}

std::string TaylorPoly::to_string() const {
  std::ostringstream os;
  bool first = true;
  const auto idx = MultiIndex::enumerate_up_to(max_degree_);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double c = coef_[r];
    if (c == 0.0) continue;
    if (!first) os << " + ";
    os << c;
    static const char* var[3] = {"x1", "x2", "x3"};
    for (int ax = 0; ax < 3; ++ax) {
      if (idx[r].e[ax] > 0) {
        os << "*" << var[ax];
        if (idx[r].e[ax] > 1) os << "^" << idx[r].e[ax];
      }
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace capax
