#pragma once

#include "capax/direct_solver.hpp"
#include "capax/shell_modes.hpp"
#include "capax/taylor_poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace capax::spectral {

/// Eigenfunction data entering the predictions: a Taylor table near the
/// hole center plus a label. The module never solves the PDE eigenproblem
/// itself; Taylor data and eigenvalues come from the caller (or from the
/// analytic ball modes used in the tests and the CLI).
struct AdmissibleFunction {
  TaylorPoly taylor;
  std::string label;
};

int vanishing_order(const AdmissibleFunction& f);
TaylorPoly principal_part(const AdmissibleFunction& f);

/// Leading capacity behavior of a pair: exponent k(u)+k(v)+d-2 and the
/// whole-space energy pairing of the principal parts; (0, 0) for
/// identically-zero input (by convention).
struct PairAsymptotics {
  int exponent = 0;
  double q = 0.0;
  bool zero_input = false;
};
PairAsymptotics capacity_asymptotics_pair(const direct::HoleOps& hole,
                                          const AdmissibleFunction& u,
                                          const AdmissibleFunction& v);

/// Simple-eigenvalue shift prediction: lambda + C(omega, principal part)
/// eps^(2k + d - 2) per epsilon.
struct SimplePrediction {
  double eigenvalue = 0.0;
  int exponent = 0;
  double coefficient = 0.0;
  std::vector<double> epsilons;
  std::vector<double> predicted;  // lambda + coefficient * eps^exponent
};
SimplePrediction predict_simple(double lambda, const AdmissibleFunction& u_n,
                                const direct::HoleOps& hole,
                                const std::vector<double>& epsilons);

/// L2-orthonormal eigenspace of a (possibly multiple) eigenvalue.
struct EigenSpace {
  double eigenvalue = 0.0;
  std::vector<AdmissibleFunction> basis;
  /// Optional Gram witness; must equal the identity within 1e-8.
  std::optional<Matrix> gram;
};

/// Order decomposition: orthogonal blocks of constant vanishing order,
/// orders strictly decreasing.
struct OrderBlock {
  int order = 0;
  Matrix coords;  // m x dim block: columns are coefficient vectors in the basis
  std::vector<AdmissibleFunction> functions;
};
struct OrderDecomposition {
  std::vector<OrderBlock> blocks;
};
OrderDecomposition order_decomposition(const EigenSpace& space);

/// Per-branch spectral shift data of a multiple eigenvalue.
struct EigenPrediction {
  double eigenvalue = 0.0;
  int multiplicity = 0;
  struct Branch {
    int index = 0;     // 1-based offset within the cluster
    int block = 0;     // order-block id
    int order = 0;     // vanishing order k_j
    int exponent = 0;  // 2 k_j + d - 2
    double mu = 0.0;   // shift prefactor, strictly positive
  };
  std::vector<Branch> branches;
  std::vector<AdmissibleFunction> basis_out;  // adapted orthonormal basis
  std::vector<double> epsilons;
  Matrix predicted;  // branches x epsilons: eigenvalue + mu eps^exponent
};
EigenPrediction predict_multiple(const EigenSpace& space, const direct::HoleOps& hole,
                                 const std::vector<double>& epsilons);

/// Log-log fit of the directly computed capacity over an epsilon sweep;
/// compares against the vanishing-order law.
struct FitReport {
  double exponent = 0.0;
  double prefactor = 0.0;
  int predicted_exponent = 0;
  double predicted_prefactor = 0.0;
  std::vector<double> epsilons, values;
};
FitReport general_capacity_asymptotics_check(const direct::ProblemSetup& setup,
                                             const AdmissibleFunction& u,
                                             const std::vector<double>& epsilons);

/// JSON report: {eigenvalue, multiplicity, blocks: [{order, dim, mu: []}],
/// predictions: [{epsilon, branch, value}], oracle: optional table}.
struct OracleComparison {
  std::vector<double> epsilons;
  std::vector<double> oracle_values;
  std::vector<double> predicted_values;
};
std::string prediction_to_json(const EigenPrediction& pred,
                               const std::optional<OracleComparison>& oracle);

}  // namespace capax::spectral
