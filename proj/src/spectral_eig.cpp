#include <lapacke.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include "sts/errors.hpp"
#include "sts/parallel.hpp"
#include "sts/spectral.hpp"

namespace sts {

std::vector<double> dense_symmetric_eigenvalues(const DenseMatrix& m) {
  std::vector<double> a = m.data;
  std::vector<double> w(m.n);
  lapack_int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', static_cast<lapack_int>(m.n),
                                  a.data(), static_cast<lapack_int>(m.n), w.data());
  if (info != 0) fail(Err::NotConverged, "dsyev info = " + std::to_string(info));
  return w;
}

namespace {

// Number of eigenvalues below x, from the signs of the LDL^T pivots.
// Near-zero pivots are pushed to -pivmin, the usual bisection safeguard.
std::int64_t sturm_count(const std::vector<double>& d, const std::vector<double>& e2, double x,
                         double pivmin) {
  std::int64_t count = 0;
  double q = d[0] - x;
  for (std::size_t i = 0;;) {
    if (q < 0) ++count;
    if (++i >= d.size()) break;
    if (std::fabs(q) < pivmin) q = -pivmin;
    q = d[i] - x - e2[i - 1] / q;
  }
  return count;
}

struct BisectSetup {
  std::vector<double> d, e2;
  double lo = 0, hi = 0, pivmin = 0;
};

BisectSetup bisect_setup(const JacobiMatrix& j) {
  BisectSetup s;
  s.d = j.diagonal;
  s.e2.resize(j.off_diagonal.size());
  double emax2 = 1.0;
  for (std::size_t i = 0; i < j.off_diagonal.size(); ++i) {
    s.e2[i] = j.off_diagonal[i] * j.off_diagonal[i];
    emax2 = std::max(emax2, s.e2[i]);
  }
  s.pivmin = DBL_MIN * emax2;
  s.lo = std::numeric_limits<double>::infinity();
  s.hi = -s.lo;
  std::int64_t n = j.length();
  for (std::int64_t i = 0; i < n; ++i) {
    double left = i > 0 ? j.off_diagonal[i - 1] : 0.0;
    double right = i + 1 < n ? j.off_diagonal[i] : 0.0;
    s.lo = std::min(s.lo, s.d[i] - left - right);
    s.hi = std::max(s.hi, s.d[i] + left + right);
  }
  double fudge = 4.0 * DBL_EPSILON * std::max(std::fabs(s.lo), std::fabs(s.hi)) + 2.0 * s.pivmin;
  s.lo -= fudge;
  s.hi += fudge;
  return s;
}

double bisect_index(const BisectSetup& s, std::int64_t k) {
  double lo = s.lo, hi = s.hi;
  for (int iter = 0; iter < 128; ++iter) {
    double width = hi - lo;
    if (width <= 4.0 * DBL_EPSILON * std::max(std::fabs(lo), std::fabs(hi)) + 2.0 * s.pivmin) break;
    double mid = 0.5 * (lo + hi);
    if (sturm_count(s.d, s.e2, mid, s.pivmin) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> eigenvalues_bisect_serial(const JacobiMatrix& j) {
  BisectSetup s = bisect_setup(j);
  std::vector<double> w(j.length());
  for (std::int64_t k = 0; k < j.length(); ++k) w[k] = bisect_index(s, k);
  return w;
}

std::vector<double> eigenvalues_bisect(const JacobiMatrix& j) {
  BisectSetup s = bisect_setup(j);
  std::int64_t n = j.length();
  std::vector<double> w(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_budget())
#endif
  for (std::int64_t k = 0; k < n; ++k) w[k] = bisect_index(s, k);
  return w;
}

namespace {

// Implicit-shift QL on (d, e), rotating a single accumulator row z along.
// Classic EISPACK imtql2 organization restricted to the first row of the
// eigenvector matrix.
void ql_with_row(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
  std::int64_t n = static_cast<std::int64_t>(d.size());
  if (n == 1) return;
  e.push_back(0.0);
  for (std::int64_t l = 0; l < n; ++l) {
    int iter = 0;
    std::int64_t m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= DBL_EPSILON * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) fail(Err::NotConverged, "QL sweep limit reached");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::int64_t i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double bb = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * bb;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - bb;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

SpectralMeasure eig_tridiag(const JacobiMatrix& j) {
  std::vector<double> d = j.diagonal;
  std::vector<double> e = j.off_diagonal;
  std::vector<double> z(d.size(), 0.0);
  z[0] = 1.0;
  ql_with_row(d, e, z);

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  SpectralMeasure measure;
  measure.eigenvalues.reserve(d.size());
  measure.weights.reserve(d.size());
  for (std::size_t idx : order) {
    measure.eigenvalues.push_back(d[idx]);
    measure.weights.push_back(z[idx] * z[idx]);
  }
  return measure;
}

std::vector<double> moments(const SparseSymmetric& m, const std::vector<double>& seed,
                            std::int64_t pmax) {
  std::vector<double> out;
  out.reserve(pmax + 1);
  std::vector<double> v = seed;
  for (std::int64_t p = 0;; ++p) {
    double dot = 0;
    for (std::size_t i = 0; i < seed.size(); ++i) dot += seed[i] * v[i];
    out.push_back(dot);
    if (p == pmax) break;
    v = matvec(m, v);
  }
  return out;
}

std::vector<double> moments(const JacobiMatrix& j, const std::vector<double>& seed,
                            std::int64_t pmax) {
  std::vector<double> out;
  out.reserve(pmax + 1);
  std::vector<double> v = seed;
  for (std::int64_t p = 0;; ++p) {
    double dot = 0;
    for (std::size_t i = 0; i < seed.size(); ++i) dot += seed[i] * v[i];
    out.push_back(dot);
    if (p == pmax) break;
    v = matvec(j, v);
  }
  return out;
}

}  // namespace sts
