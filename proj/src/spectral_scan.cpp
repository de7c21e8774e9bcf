#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "sts/errors.hpp"
#include "sts/parallel.hpp"
#include "sts/spectral.hpp"

namespace sts {

std::complex<double> m_function(const JacobiMatrix& j, std::complex<double> z,
                                std::int64_t depth) {
  if (depth < 1) fail(Err::UsageError, "continued fraction depth must be >= 1");
  if (depth > j.length())
    fail(Err::DepthExceedsLength, "depth " + std::to_string(depth) + " vs truncation " +
                                      std::to_string(j.length()));
  std::complex<double> f = j.b(depth) - z;
  for (std::int64_t level = depth - 1; level >= 1; --level)
    f = j.b(level) - z - j.a(level) * j.a(level) / f;
  return 1.0 / f;
}

MFunctionResult m_function_adaptive(const JacobiMatrix& j, std::complex<double> z,
                                    std::int64_t start_depth, std::int64_t max_depth,
                                    double rtol) {
  std::int64_t cap = std::min<std::int64_t>(max_depth, j.length());
  std::int64_t checkpoint = std::clamp<std::int64_t>(start_depth, 1, cap);

  // Forward three-term recurrences for the continued-fraction convergents:
  // the value at depth d is num/den, so the depth can be extended without
  // re-evaluating earlier levels.
  std::complex<double> num_prev = 0.0, num = 1.0;
  std::complex<double> den_prev = 1.0, den = j.b(1) - z;

  MFunctionResult result{0.0, 0, false, std::numeric_limits<double>::infinity()};
  std::complex<double> at_last_checkpoint = 0.0;
  bool have_checkpoint = false;
  std::int64_t depth = 1;
  while (true) {
    if (depth >= checkpoint || depth == cap) {
      std::complex<double> value = num / den;
      if (have_checkpoint) {
        result.last_rel_change = std::abs(value - at_last_checkpoint) / std::abs(value);
        if (result.last_rel_change <= rtol) {
          result.value = value;
          result.depth = depth;
          result.converged = true;
          return result;
        }
      }
      if (depth == cap) {
        result.value = value;
        result.depth = depth;
        return result;
      }
      at_last_checkpoint = value;
      have_checkpoint = true;
      checkpoint = std::min(cap, 2 * depth);
    }
    ++depth;
    std::complex<double> c = j.b(depth) - z;
    double aa = j.a(depth - 1) * j.a(depth - 1);
    std::complex<double> num_next = c * num - aa * num_prev;
    std::complex<double> den_next = c * den - aa * den_prev;
    num_prev = num;
    num = num_next;
    den_prev = den;
    den = den_next;
    if ((depth & 63) == 0) {
      double scale = std::max(std::abs(den), std::abs(num));
      if (scale > 1e150 || (scale > 0 && scale < 1e-150)) {
        num_prev /= scale;
        num /= scale;
        den_prev /= scale;
        den /= scale;
      }
    }
  }
}

namespace {

struct Transfer2x2 {
  double p00 = 1, p01 = 0, p10 = 0, p11 = 1;
  std::int64_t scale_exp = 0;  // true product = P * 2^scale_exp

  void renormalize() {
    double big = std::max(std::max(std::fabs(p00), std::fabs(p01)),
                          std::max(std::fabs(p10), std::fabs(p11)));
    if (big == 0.0) return;
    int k = std::ilogb(big);
    if (k == 0) return;
    double s = std::ldexp(1.0, -k);  // power-of-two scaling is exact
    p00 *= s;
    p01 *= s;
    p10 *= s;
    p11 *= s;
    scale_exp += k;
  }

  void step(double t00, double t01) {
    double q00 = t00 * p00 + t01 * p10;
    double q01 = t00 * p01 + t01 * p11;
    p10 = p00;
    p11 = p01;
    p00 = q00;
    p01 = q01;
  }

  double frob2() const { return p00 * p00 + p01 * p01 + p10 * p10 + p11 * p11; }
  double det() const { return p00 * p11 - p01 * p10; }

  // Squared operator norm of the scaled matrix.
  double opnorm2() const {
    double q = frob2();
    double d = det();
    double disc = q * q - 4.0 * d * d;
    if (disc < 0) disc = 0;
    return 0.5 * (q + std::sqrt(disc));
  }

  // log2 of the operator norm of the true product.
  double log2_norm() const { return scale_exp + 0.5 * std::log2(opnorm2()); }
};

void check_transfer_args(const JacobiMatrix& j, std::int64_t steps) {
  if (steps < 1) fail(Err::UsageError, "need at least one transfer step");
  if (steps > j.length() - 1)
    fail(Err::DimensionMismatch, "transfer product over " + std::to_string(steps) +
                                     " steps needs a truncation of length > " +
                                     std::to_string(steps));
}

double telescoped_det_residual(const Transfer2x2& p, double a_last) {
  double det = p.det();
  if (det <= 0.0) return std::numeric_limits<double>::infinity();
  // Expected determinant telescopes to a(0)/a(N) = 1/a(N); compare in log2.
  double delta = std::log2(det) + 2.0 * static_cast<double>(p.scale_exp) + std::log2(a_last);
  return std::fabs(std::exp2(delta) - 1.0);
}

}  // namespace

TransferState transfer_product(const JacobiMatrix& j, double energy, std::int64_t steps,
                               std::int64_t cadence) {
  check_transfer_args(j, steps);
  if (cadence < 1) cadence = 1;
  Transfer2x2 p;
  for (std::int64_t step = 1; step <= steps; ++step) {
    double a = j.a(step);
    double a_prev = step > 1 ? j.a(step - 1) : 1.0;
    p.step((energy - j.b(step)) / a, -a_prev / a);
    if (step % cadence == 0 || p.frob2() > 1e120) p.renormalize();
  }
  TransferState state;
  state.matrix[0][0] = p.p00;
  state.matrix[0][1] = p.p01;
  state.matrix[1][0] = p.p10;
  state.matrix[1][1] = p.p11;
  state.log_norm = p.log2_norm() * M_LN2;
  state.step = steps;
  state.det_residual = telescoped_det_residual(p, j.a(steps));
  return state;
}

std::vector<double> simon_stolz_sum(const JacobiMatrix& j, double energy, std::int64_t steps) {
  check_transfer_args(j, steps);
  Transfer2x2 p;
  std::vector<double> sums(steps);
  double running = 0;
  for (std::int64_t step = 1; step <= steps; ++step) {
    double a = j.a(step);
    double a_prev = step > 1 ? j.a(step - 1) : 1.0;
    p.step((energy - j.b(step)) / a, -a_prev / a);
    if (step % 64 == 0 || p.frob2() > 1e120) p.renormalize();
    // ||product||^{-2} = 2^{-2 scale} / opnorm2(scaled)
    running += std::ldexp(1.0 / p.opnorm2(), static_cast<int>(-2 * p.scale_exp));
    sums[step - 1] = running;
  }
  return sums;
}

std::vector<std::vector<double>> scan_simon_stolz_serial(const JacobiMatrix& j,
                                                         const std::vector<double>& energies,
                                                         std::int64_t steps) {
  std::vector<std::vector<double>> out(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) out[i] = simon_stolz_sum(j, energies[i], steps);
  return out;
}

std::vector<std::vector<double>> scan_simon_stolz(const JacobiMatrix& j,
                                                  const std::vector<double>& energies,
                                                  std::int64_t steps) {
  std::vector<std::vector<double>> out(energies.size());
  std::int64_t count = static_cast<std::int64_t>(energies.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget())
#endif
  for (std::int64_t i = 0; i < count; ++i) out[i] = simon_stolz_sum(j, energies[i], steps);
  return out;
}

double spectrum_coverage(const JacobiMatrix& j, const std::vector<double>& grid, double delta) {
  if (grid.empty()) fail(Err::EmptyGrid, "coverage needs at least one grid energy");
  if (!(delta > 0)) fail(Err::UsageError, "coverage tolerance must be positive");
  std::vector<double> eigs = eigenvalues_bisect(j);
  std::int64_t covered = 0;
  for (double e : grid) {
    auto it = std::lower_bound(eigs.begin(), eigs.end(), e);
    double best = std::numeric_limits<double>::infinity();
    if (it != eigs.end()) best = std::min(best, std::fabs(*it - e));
    if (it != eigs.begin()) best = std::min(best, std::fabs(*(it - 1) - e));
    if (best <= delta) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(grid.size());
}

namespace {

struct LogLogFit {
  double slope = 0, intercept = 0, rms = 0;
};

LogLogFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LogLogFit fit;
  double denom = n * sxx - sx * sx;
  fit.slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - fit.slope * x[i] - fit.intercept;
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

void validate_ladder(const std::vector<double>& ladder) {
  if (ladder.size() < 4)
    fail(Err::LadderTooShort, "need at least 4 epsilon values, got " +
                                  std::to_string(ladder.size()));
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0 && ladder[i] < 1.0))
      fail(Err::UsageError, "epsilon values must lie in (0,1)");
    if (i > 0 && !(ladder[i] < ladder[i - 1]))
      fail(Err::UsageError, "epsilon ladder must be strictly decreasing");
  }
}

constexpr double kMFunctionRtol = 1e-3;
constexpr std::int64_t kMaxContinuedFractionDepth = 10'000'000;

}  // namespace

std::vector<double> default_epsilon_ladder() {
  std::vector<double> ladder;
  for (int p = 4; p <= 20; ++p) ladder.push_back(std::ldexp(1.0, -p));
  return ladder;
}

std::vector<double> default_energy_grid() {
  std::vector<double> grid;
  grid.reserve(401);
  for (int i = 0; i <= 400; ++i) grid.push_back(-1.95 + 3.9 * i / 400.0);
  return grid;
}

DimensionEstimate local_dimension(const JacobiMatrix& j, double energy,
                                  const std::vector<double>& eps_ladder, std::int64_t depth) {
  validate_ladder(eps_ladder);
  std::int64_t cap = std::min<std::int64_t>(kMaxContinuedFractionDepth, j.length());
  std::int64_t start = std::clamp<std::int64_t>(depth, 16, cap);

  std::vector<double> log_eps, log_im;
  log_eps.reserve(eps_ladder.size());
  log_im.reserve(eps_ladder.size());
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    double eps = eps_ladder[i];
    MFunctionResult r =
        m_function_adaptive(j, std::complex<double>(energy, eps), start, cap, kMFunctionRtol);
    if (i == 0 && !r.converged && r.last_rel_change > 0.01)
      fail(Err::NotConverged, "Im m at the largest epsilon still moves by " +
                                  std::to_string(r.last_rel_change * 100) +
                                  "% when the depth doubles");
    double im = r.value.imag();
    if (!(im > 0)) im = DBL_MIN;  // Herglotz up to roundoff
    log_eps.push_back(std::log(eps));
    log_im.push_back(std::log(im));
  }

  LogLogFit fit = fit_line(log_eps, log_im);
  DimensionEstimate estimate;
  estimate.energy = energy;
  estimate.exponent = fit.slope;
  estimate.dimension_proxy = std::clamp(1.0 + fit.slope, 0.0, 1.0);
  estimate.epsilon_ladder = eps_ladder;
  estimate.fit_residual = fit.rms;
  return estimate;
}

namespace {

template <typename Fn>
std::vector<DimensionEstimate> scan_dimension_impl(const std::vector<double>& energies, Fn&& fn,
                                                   bool parallel) {
  std::vector<DimensionEstimate> out(energies.size());
  std::int64_t count = static_cast<std::int64_t>(energies.size());
  bool failed = false;
  Err code = Err::NotConverged;
  std::string message;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallel ? thread_budget() : 1)
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    if (failed) continue;
    try {
      out[i] = fn(energies[i]);
    } catch (const Error& err) {
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        if (!failed) {
          failed = true;
          code = err.code();
          message = err.what();
        }
      }
    }
  }
  if (failed) throw Error(code, message);
  return out;
}

}  // namespace

std::vector<DimensionEstimate> scan_local_dimension(const JacobiMatrix& j,
                                                    const std::vector<double>& energies,
                                                    const std::vector<double>& eps_ladder,
                                                    std::int64_t depth) {
  return scan_dimension_impl(
      energies, [&](double e) { return local_dimension(j, e, eps_ladder, depth); }, true);
}

std::vector<DimensionEstimate> scan_local_dimension_serial(const JacobiMatrix& j,
                                                           const std::vector<double>& energies,
                                                           const std::vector<double>& eps_ladder,
                                                           std::int64_t depth) {
  return scan_dimension_impl(
      energies, [&](double e) { return local_dimension(j, e, eps_ladder, depth); }, false);
}

double box_counting_dimension(const SpectralMeasure& measure, double energy,
                              const std::vector<double>& delta_ladder) {
  validate_ladder(delta_ladder);
  std::vector<double> prefix(measure.weights.size() + 1, 0.0);
  for (std::size_t i = 0; i < measure.weights.size(); ++i)
    prefix[i + 1] = prefix[i] + measure.weights[i];

  std::vector<double> log_delta, log_mass;
  for (double delta : delta_ladder) {
    auto lo = std::lower_bound(measure.eigenvalues.begin(), measure.eigenvalues.end(),
                               energy - delta);
    auto hi = std::upper_bound(measure.eigenvalues.begin(), measure.eigenvalues.end(),
                               energy + delta);
    double mass = prefix[hi - measure.eigenvalues.begin()] - prefix[lo - measure.eigenvalues.begin()];
    if (mass > 0) {
      log_delta.push_back(std::log(delta));
      log_mass.push_back(std::log(mass));
    }
  }
  if (log_delta.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  LogLogFit fit = fit_line(log_delta, log_mass);
  return std::clamp(fit.slope, 0.0, 1.0);
}

}  // namespace sts
