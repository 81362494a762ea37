#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace capax {

using Vec3 = Eigen::Vector3d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class of all exceptions thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user configuration (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

/// Failure of a numerical procedure; the message carries diagnostics
/// such as residuals or reciprocal condition numbers (CLI exit code 3).
struct NumericalError : Error {
  using Error::Error;
};

/// Evaluation point closer to a surface than one local mesh width.
struct NearFieldError : NumericalError {
  using NumericalError::NumericalError;
};

/// Defective geometric input (open mesh, degenerate axis, ...).
struct GeometryError : Error {
  using Error::Error;
};

double binomial(int n, int k);
double factorial(int n);

/// Verbosity from the CAPAX_LOG environment variable: 0 quiet (default),
/// 1 info, 2 debug. Messages go to stderr.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/// FNV-1a, used for config and geometry content hashes embedded in outputs.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull);
std::string hash_hex(std::uint64_t h);

/// Runs fn(i) for i in [0, n). With jobs <= 1 this is a plain loop; with
/// more jobs the index range is split into contiguous chunks, one thread
/// per chunk. Results must be written to disjoint slots so that the
/// outcome is bitwise independent of the thread count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace capax
