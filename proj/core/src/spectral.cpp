#include "capax/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace capax::spectral {

using direct::kDim;

namespace {
constexpr double kVanishTol = 1e-10;   // coefficient-block zero threshold
constexpr double kRankCutoff = 1e-9;   // relative singular-value cutoff
}  // namespace

int vanishing_order(const AdmissibleFunction& f) {
  return f.taylor.vanishing_order(kVanishTol);
}

TaylorPoly principal_part(const AdmissibleFunction& f) {
  return f.taylor.slice(vanishing_order(f));
}

PairAsymptotics capacity_asymptotics_pair(const direct::HoleOps& hole,
                                          const AdmissibleFunction& u,
                                          const AdmissibleFunction& v) {
  PairAsymptotics out;
  if (u.taylor.max_abs_coeff() == 0.0 || v.taylor.max_abs_coeff() == 0.0) {
    out.zero_input = true;
    return out;
  }
  const int ku = vanishing_order(u);
  const int kv = vanishing_order(v);
  out.exponent = ku + kv + kDim - 2;
  out.q = direct::frak_C(hole, u.taylor.slice(ku), v.taylor.slice(kv));
  return out;
}

SimplePrediction predict_simple(double lambda, const AdmissibleFunction& u_n,
                                const direct::HoleOps& hole,
                                const std::vector<double>& epsilons) {
  SimplePrediction out;
  out.eigenvalue = lambda;
  const int k = vanishing_order(u_n);
  out.exponent = 2 * k + kDim - 2;
  const TaylorPoly p = u_n.taylor.slice(k);
  out.coefficient = direct::frak_C(hole, p, p);
  out.epsilons = epsilons;
  out.predicted.reserve(epsilons.size());
  for (double eps : epsilons)
    out.predicted.push_back(lambda + out.coefficient * std::pow(eps, out.exponent));
  return out;
}

namespace {

// Orthonormal basis of the nullspace of A (columns = basis coordinates).
Matrix nullspace(const Matrix& A, int m) {
  if (A.rows() == 0) return Matrix::Identity(m, m);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() ? sv[0] : 0.0) * kRankCutoff;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return svd.matrixV().rightCols(m - rank);
}

}  // namespace

OrderDecomposition order_decomposition(const EigenSpace& space) {
  const int m = static_cast<int>(space.basis.size());
  if (m == 0) throw ConfigError("order_decomposition: empty basis");
  if (space.gram) {
    if (space.gram->rows() != m || space.gram->cols() != m)
      throw ConfigError("order_decomposition: Gram witness has wrong shape");
    const double dev = (*space.gram - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
    if (dev > 1e-8)
      throw NumericalError("order_decomposition: non-orthonormal Gram witness, max "
                           "deviation " + std::to_string(dev));
  }

  int max_deg = 0;
  double scale = 0.0;
  for (const auto& f : space.basis) {
    max_deg = std::max(max_deg, f.taylor.max_degree());
    scale = std::max(scale, f.taylor.max_abs_coeff());
  }
  if (scale == 0.0) throw NumericalError("order_decomposition: identically zero basis");

  // V[k] = combinations whose Taylor coefficients vanish below degree k.
  std::vector<Matrix> V(max_deg + 2);
  for (int k = 0; k <= max_deg + 1; ++k) {
    const std::size_t rows = MultiIndex::count_up_to(k - 1);
    Matrix A(rows, m);
    const auto idx = MultiIndex::enumerate_up_to(k - 1);
    for (std::size_t r = 0; r < rows; ++r)
      for (int j = 0; j < m; ++j) A(r, j) = space.basis[j].taylor.coeff(idx[r]) / scale;
    V[k] = nullspace(A, m);
  }
  if (V[max_deg + 1].cols() > 0)
    throw NumericalError("order_decomposition: basis contains a numerically zero "
                         "combination");

  OrderDecomposition out;
  for (int k = max_deg; k >= 0; --k) {
    const int dim_here = static_cast<int>(V[k].cols());
    const int dim_above = static_cast<int>(V[k + 1].cols());
    if (dim_here == dim_above) continue;
    // E = V[k] minus its component in V[k+1], orthonormalized.
    Matrix C = V[k];
    if (dim_above > 0) {
      const Matrix& P = V[k + 1];
      C -= P * (P.transpose() * C);
    }
    Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeThinU);
    OrderBlock block;
    block.order = k;
    block.coords = svd.matrixU().leftCols(dim_here - dim_above);
    for (int c = 0; c < block.coords.cols(); ++c) {
      TaylorPoly p(max_deg);
      for (int j = 0; j < m; ++j)
        p = p.plus(space.basis[j].taylor.scaled(block.coords(j, c)));
      block.functions.push_back(
          {p, "order" + std::to_string(k) + "_" + std::to_string(c)});
    }
    out.blocks.push_back(std::move(block));
  }
  // Blocks come out in decreasing vanishing order already.
  return out;
}

EigenPrediction predict_multiple(const EigenSpace& space, const direct::HoleOps& hole,
                                 const std::vector<double>& epsilons) {
  EigenPrediction out;
  out.eigenvalue = space.eigenvalue;
  out.multiplicity = static_cast<int>(space.basis.size());
  out.epsilons = epsilons;

  const OrderDecomposition dec = order_decomposition(space);
  int running_index = 0;
  for (std::size_t bi = 0; bi < dec.blocks.size(); ++bi) {
    const auto& block = dec.blocks[bi];
    const int mj = static_cast<int>(block.functions.size());
    Matrix Q(mj, mj);
    std::vector<TaylorPoly> principal(mj);
    for (int i = 0; i < mj; ++i) principal[i] = block.functions[i].taylor.slice(block.order);
    for (int i = 0; i < mj; ++i)
      for (int j = i; j < mj; ++j) {
        Q(i, j) = direct::frak_C(hole, principal[i], principal[j]);
        Q(j, i) = Q(i, j);
      }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
    for (int l = 0; l < mj; ++l) {
      const double mu = es.eigenvalues()[l];
      if (!(mu > 0))
        throw NumericalError("predict_multiple: non-positive shift prefactor mu=" +
                             std::to_string(mu));
      EigenPrediction::Branch br;
      br.index = ++running_index;
      br.block = static_cast<int>(bi);
      br.order = block.order;
      br.exponent = 2 * block.order + kDim - 2;
      br.mu = mu;
      out.branches.push_back(br);

      TaylorPoly basis_fn = TaylorPoly::constant(0.0);
      for (int i = 0; i < mj; ++i)
        basis_fn = basis_fn.plus(block.functions[i].taylor.scaled(es.eigenvectors()(i, l)));
      out.basis_out.push_back({basis_fn, "adapted_" + std::to_string(running_index)});
    }
  }
  out.predicted.resize(out.branches.size(), epsilons.size());
  for (std::size_t b = 0; b < out.branches.size(); ++b)
    for (std::size_t e = 0; e < epsilons.size(); ++e)
      out.predicted(b, e) = space.eigenvalue +
                            out.branches[b].mu *
                                std::pow(epsilons[e], out.branches[b].exponent);
  return out;
}

FitReport general_capacity_asymptotics_check(const direct::ProblemSetup& setup,
                                             const AdmissibleFunction& u,
                                             const std::vector<double>& epsilons) {
  if (epsilons.size() < 4)
    throw ConfigError("asymptotics check needs at least 4 epsilon values");
  const auto [mn, mx] = std::minmax_element(epsilons.begin(), epsilons.end());
  if (*mx / *mn < 4.0)
    throw ConfigError("asymptotics check needs epsilons spanning a factor >= 4");

  FitReport rep;
  rep.epsilons = epsilons;
  for (double eps : epsilons)
    rep.values.push_back(direct::capacity_direct(setup, eps, u.taylor, u.taylor));

  // Least squares on ln v = p ln eps + ln C.
  const int n = static_cast<int>(epsilons.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(rep.values[i] > 0))
      throw NumericalError("asymptotics check: non-positive capacity value");
    const double x = std::log(epsilons[i]);
    const double y = std::log(rep.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.prefactor = std::exp((sy - rep.exponent * sx) / n);

  const int k = u.taylor.vanishing_order();
  rep.predicted_exponent = 2 * k + kDim - 2;
  const TaylorPoly p = u.taylor.slice(k);
  rep.predicted_prefactor = direct::frak_C(setup.hole, p, p);
  return rep;
}

std::string prediction_to_json(const EigenPrediction& pred,
                               const std::optional<OracleComparison>& oracle) {
  nlohmann::json j;
  j["eigenvalue"] = pred.eigenvalue;
  j["multiplicity"] = pred.multiplicity;
  nlohmann::json blocks = nlohmann::json::array();
  int bi = -1;
  nlohmann::json current;
  for (const auto& br : pred.branches) {
    if (br.block != bi) {
      if (bi >= 0) blocks.push_back(current);
      bi = br.block;
      current = {{"order", br.order}, {"dim", 0}, {"mu", nlohmann::json::array()}};
    }
    current["dim"] = current["dim"].get<int>() + 1;
    current["mu"].push_back(br.mu);
  }
  if (bi >= 0) blocks.push_back(current);
  j["blocks"] = blocks;

  nlohmann::json preds = nlohmann::json::array();
  for (std::size_t b = 0; b < pred.branches.size(); ++b)
    for (std::size_t e = 0; e < pred.epsilons.size(); ++e)
      preds.push_back({{"epsilon", pred.epsilons[e]},
                       {"branch", pred.branches[b].index},
                       {"value", pred.predicted(b, e)}});
  j["predictions"] = preds;

  if (oracle) {
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t i = 0; i < oracle->epsilons.size(); ++i)
      table.push_back({{"epsilon", oracle->epsilons[i]},
                       {"oracle", oracle->oracle_values[i]},
                       {"predicted", oracle->predicted_values[i]}});
    j["oracle"] = table;
  }
  return j.dump(2);
}

}  // namespace capax::spectral
