#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sts/operators.hpp"

namespace sts {

// Finite-truncation spectral measure of a Jacobi operator and the first
// coordinate vector: atoms at the eigenvalues, weights the squared first
// components of the normalized eigenvectors.
struct SpectralMeasure {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> weights;      // nonnegative, sum to 1
};

// All eigenvalues of the dense symmetric matrix, ascending (LAPACK-backed).
std::vector<double> dense_symmetric_eigenvalues(const DenseMatrix& m);

// Eigenvalues of the tridiagonal truncation by Sturm-count bisection,
// ascending. The parallel kernel splits over eigenvalue indices and is
// bitwise identical to the serial reference.
std::vector<double> eigenvalues_bisect(const JacobiMatrix& j);
std::vector<double> eigenvalues_bisect_serial(const JacobiMatrix& j);

// Eigenvalues plus spectral weights via implicit-shift QL, accumulating
// only the first row of the orthogonal transform.
SpectralMeasure eig_tridiag(const JacobiMatrix& j);

// <seed, Op^p seed> for p = 0..pmax by repeated matvec.
std::vector<double> moments(const SparseSymmetric& m, const std::vector<double>& seed,
                            std::int64_t pmax);
std::vector<double> moments(const JacobiMatrix& j, const std::vector<double>& seed,
                            std::int64_t pmax);

// Finite continued fraction 1/(b(1)-z - a(1)^2/(b(2)-z - ...)) cut at
// `depth` levels; Im z > 0 implies Im m > 0.
std::complex<double> m_function(const JacobiMatrix& j, std::complex<double> z, std::int64_t depth);

struct MFunctionResult {
  std::complex<double> value;
  std::int64_t depth;      // depth actually used
  bool converged;          // change under the final doubling was <= rtol
  double last_rel_change;  // relative change at the final doubling checked
};

// Forward-convergent evaluation that doubles the depth until the value is
// stable to rtol, capped by max_depth and the truncation length.
MFunctionResult m_function_adaptive(const JacobiMatrix& j, std::complex<double> z,
                                    std::int64_t start_depth, std::int64_t max_depth, double rtol);

// Product T_N ... T_1 of one-step transfer matrices
//   T_j = [ (E-b(j))/a(j)  -a(j-1)/a(j) ; 1  0 ],  a(0) = 1,
// renormalized by powers of two every `cadence` steps.
struct TransferState {
  double matrix[2][2];  // renormalized product, true product = matrix * exp(log_norm offset)
  double log_norm;      // ln of the operator norm of the true product
  std::int64_t step;
  double det_residual;  // relative deviation from the telescoped determinant
};
TransferState transfer_product(const JacobiMatrix& j, double energy, std::int64_t steps,
                               std::int64_t cadence = 64);

// Partial sums S_n = sum_{j<=n} ||T_j ... T_1(E)||^{-2}; divergence
// witnesses that E is not an eigenvalue.
std::vector<double> simon_stolz_sum(const JacobiMatrix& j, double energy, std::int64_t steps);
std::vector<std::vector<double>> scan_simon_stolz(const JacobiMatrix& j,
                                                  const std::vector<double>& energies,
                                                  std::int64_t steps);
std::vector<std::vector<double>> scan_simon_stolz_serial(const JacobiMatrix& j,
                                                         const std::vector<double>& energies,
                                                         std::int64_t steps);

// Fraction of grid energies within delta of an eigenvalue of the truncation.
double spectrum_coverage(const JacobiMatrix& j, const std::vector<double>& grid, double delta);

// Scaling of Im m(E + i eps) across the ladder, fitted in log-log:
// absolutely continuous points read ~1, atoms read ~0.
struct DimensionEstimate {
  double energy;
  double exponent;         // fitted slope d log Im m / d log eps
  double dimension_proxy;  // clamp(1 + exponent, 0, 1)
  std::vector<double> epsilon_ladder;
  double fit_residual;     // rms residual of the fit
};

std::vector<double> default_epsilon_ladder();  // 2^-4 .. 2^-20
std::vector<double> default_energy_grid();     // 401 points in [-1.95, 1.95]

DimensionEstimate local_dimension(const JacobiMatrix& j, double energy,
                                  const std::vector<double>& eps_ladder, std::int64_t depth);
std::vector<DimensionEstimate> scan_local_dimension(const JacobiMatrix& j,
                                                    const std::vector<double>& energies,
                                                    const std::vector<double>& eps_ladder,
                                                    std::int64_t depth);
std::vector<DimensionEstimate> scan_local_dimension_serial(const JacobiMatrix& j,
                                                           const std::vector<double>& energies,
                                                           const std::vector<double>& eps_ladder,
                                                           std::int64_t depth);

// Measure-side cross-check: scaling exponent of mu([E-d, E+d]) over the
// delta ladder, clamped to [0,1]; NaN when the ball never carries mass.
double box_counting_dimension(const SpectralMeasure& measure, double energy,
                              const std::vector<double>& delta_ladder);

}  // namespace sts
