#include "sts/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "sts/errors.hpp"
#include "sts/spectral.hpp"

namespace sts {

std::int64_t DecompositionPlan::total_dimension() const {
  std::int64_t total = 0;
  for (const auto& level : levels)
    total = checked_add(total, checked_mul(level.multiplicity, level.block_length));
  return total;
}

DecompositionPlan plan(const TreeSpec& spec, std::int64_t depth) {
  if (depth < 0) fail(Err::DepthNegative, "depth = " + std::to_string(depth));
  DecompositionPlan p;
  p.depth = depth;
  p.levels.push_back({0, 0, 1, depth + 1});
  std::int64_t alpha = 1;  // product of k_1..k_n
  for (std::int64_t n = 1; n <= spec.levels(); ++n) {
    std::int64_t first_radius = spec.branch_positions[n - 1] + 1;
    if (first_radius > depth) break;
    std::int64_t alpha_next = checked_mul(alpha, spec.branch_factors[n - 1]);
    p.levels.push_back({n, first_radius, alpha_next - alpha, depth - first_radius + 1});
    alpha = alpha_next;
  }
  return p;
}

std::vector<std::vector<double>> sibling_block_basis(std::int64_t k) {
  if (k < 2) fail(Err::BranchFactorBelowTwo, "sibling group of size " + std::to_string(k));
  std::vector<std::vector<double>> rows;
  rows.reserve(k - 1);
  for (std::int64_t t = 1; t < k; ++t) {
    std::vector<double> row(k, 0.0);
    double scale = 1.0 / std::sqrt(static_cast<double>(t) * (t + 1));
    for (std::int64_t l = 0; l < t; ++l) row[l] = scale;
    row[t] = -static_cast<double>(t) * scale;
    rows.push_back(std::move(row));
  }
  return rows;
}

OrthogonalBasis build_basis(const TreeSpec& spec, std::int64_t depth) {
  SHTree tree = build_tree(spec, depth);
  DecompositionPlan p = plan(spec, depth);

  OrthogonalBasis basis;
  basis.dimension = tree.vertex_count();
  basis.rows.reserve(basis.dimension);

  for (const auto& level : p.levels) {
    if (level.level == 0) {
      // Radially symmetric rows: normalized sphere indicators.
      for (std::int64_t r = 0; r <= depth; ++r) {
        BasisRow row{0, 1, r, {}, {}};
        std::int64_t begin = tree.sphere_begin(r), end = tree.sphere_end(r);
        double c = 1.0 / std::sqrt(static_cast<double>(end - begin));
        for (std::int64_t v = begin; v < end; ++v) {
          row.support.push_back(v);
          row.coeff.push_back(c);
        }
        basis.rows.push_back(std::move(row));
      }
      continue;
    }
    std::int64_t n = level.level;
    std::int64_t k = spec.branch_factors[n - 1];
    std::int64_t seed_sphere = sphere_size(spec, level.first_radius);
    std::int64_t groups = seed_sphere / k;  // one group per common backward neighbor
    auto seeds = sibling_block_basis(k);
    for (std::int64_t g = 0; g < groups; ++g) {
      for (std::int64_t t = 0; t < k - 1; ++t) {
        std::int64_t copy = g * (k - 1) + t + 1;
        for (std::int64_t r = level.first_radius; r <= depth; ++r) {
          // Vertices of one sibling's forward subtree are contiguous at
          // every sphere in BFS order.
          std::int64_t per_sibling = sphere_size(spec, r) / seed_sphere;
          double norm = 1.0 / std::sqrt(static_cast<double>(per_sibling));
          BasisRow row{n, copy, r, {}, {}};
          std::int64_t base = tree.sphere_begin(r) + g * k * per_sibling;
          for (std::int64_t l = 0; l < k; ++l) {
            double c = seeds[t][l] * norm;
            for (std::int64_t v = 0; v < per_sibling; ++v) {
              row.support.push_back(base + l * per_sibling + v);
              row.coeff.push_back(c);
            }
          }
          basis.rows.push_back(std::move(row));
        }
      }
    }
  }
  return basis;
}

namespace {

// Rows bucketed by radius; entries of U M U^T vanish structurally unless
// the two rows sit on the same or adjacent spheres.
std::vector<std::vector<std::int64_t>> rows_by_radius(const OrthogonalBasis& basis,
                                                      std::int64_t depth) {
  std::vector<std::vector<std::int64_t>> buckets(depth + 1);
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(basis.rows.size()); ++i)
    buckets[basis.rows[i].radius].push_back(i);
  return buckets;
}

double sparse_dot(const BasisRow& row, const std::vector<double>& dense) {
  double s = 0;
  for (std::size_t i = 0; i < row.support.size(); ++i) s += row.coeff[i] * dense[row.support[i]];
  return s;
}

}  // namespace

DenseMatrix conjugate(const OrthogonalBasis& basis, const SparseSymmetric& m) {
  if (basis.dimension != m.dimension)
    fail(Err::DimensionMismatch, "basis dimension " + std::to_string(basis.dimension) +
                                     " vs operator dimension " + std::to_string(m.dimension));
  std::int64_t rows = static_cast<std::int64_t>(basis.rows.size());
  if (rows != basis.dimension)
    fail(Err::DimensionMismatch, "basis is not square");
  std::int64_t depth = 0;
  for (const auto& row : basis.rows) depth = std::max(depth, row.radius);
  auto buckets = rows_by_radius(basis, depth);

  DenseMatrix out(rows);
  std::vector<double> image(basis.dimension);
  std::vector<double> column(basis.dimension);
  for (std::int64_t j = 0; j < rows; ++j) {
    const BasisRow& rj = basis.rows[j];
    std::fill(column.begin(), column.end(), 0.0);
    for (std::size_t i = 0; i < rj.support.size(); ++i) column[rj.support[i]] = rj.coeff[i];
    image = matvec(m, column);
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      std::int64_t r = rj.radius + dr;
      if (r < 0 || r > depth) continue;
      for (std::int64_t i : buckets[r]) {
        if (i > j) continue;
        double value = sparse_dot(basis.rows[i], image);
        out.at(i, j) = value;
        out.at(j, i) = value;
      }
    }
  }
  return out;
}

namespace {

double gram_residual(const OrthogonalBasis& basis, std::int64_t depth) {
  auto buckets = rows_by_radius(basis, depth);
  std::vector<double> dense(basis.dimension, 0.0);
  double residual = 0;
  for (const auto& bucket : buckets) {
    for (std::int64_t j : bucket) {
      const BasisRow& rj = basis.rows[j];
      for (std::size_t s = 0; s < rj.support.size(); ++s) dense[rj.support[s]] = rj.coeff[s];
      for (std::int64_t i : bucket) {
        if (i > j) continue;
        double g = sparse_dot(basis.rows[i], dense);
        residual = std::max(residual, std::fabs(g - (i == j ? 1.0 : 0.0)));
      }
      for (std::int64_t v : rj.support) dense[v] = 0.0;
    }
  }
  return residual;
}

}  // namespace

EquivalenceReport verify_equivalence(const TreeSpec& spec, std::int64_t depth, LaplacianKind kind,
                                     const VerifyOptions& options) {
  EquivalenceReport report;
  report.decomposition = plan(spec, depth);
  std::int64_t count = vertex_count(spec, depth);
  report.dimension_identity_holds = report.decomposition.total_dimension() == count;

  double nan = std::numeric_limits<double>::quiet_NaN();
  if (count > options.dense_cap) {
    report.max_orthonormality_residual = nan;
    report.max_offblock_residual = nan;
    report.eigenvalue_multiset_distance = nan;
    return report;
  }

  SHTree tree = build_tree(spec, depth);
  SparseSymmetric m = assemble(tree, kind);
  OrthogonalBasis basis = build_basis(spec, depth);
  report.max_orthonormality_residual = gram_residual(basis, depth);

  DenseMatrix conj = conjugate(basis, m);
  double offblock = 0;
  for (std::int64_t i = 0; i < conj.n; ++i) {
    const BasisRow& ri = basis.rows[i];
    for (std::int64_t j = i + 1; j < conj.n; ++j) {
      const BasisRow& rj = basis.rows[j];
      if (ri.level == rj.level && ri.copy == rj.copy) continue;
      offblock = std::max(offblock, std::fabs(conj.at(i, j)));
    }
  }
  report.max_offblock_residual = offblock;

  // Independent check: spectrum of the assembled operator against the
  // multiplicity-weighted union of the block spectra.
  std::vector<double> tree_eigs = dense_symmetric_eigenvalues(to_dense(m));
  std::vector<double> block_eigs;
  block_eigs.reserve(count);
  for (const auto& level : report.decomposition.levels) {
    JacobiMatrix block = jacobi_level(spec, level.level, level.block_length, kind);
    std::vector<double> eigs = eigenvalues_bisect_serial(block);
    for (std::int64_t copy = 0; copy < level.multiplicity; ++copy)
      block_eigs.insert(block_eigs.end(), eigs.begin(), eigs.end());
  }
  std::sort(tree_eigs.begin(), tree_eigs.end());
  std::sort(block_eigs.begin(), block_eigs.end());
  if (tree_eigs.size() != block_eigs.size()) {
    report.eigenvalue_multiset_distance = std::numeric_limits<double>::infinity();
  } else {
    double distance = 0;
    for (std::size_t i = 0; i < tree_eigs.size(); ++i)
      distance = std::max(distance, std::fabs(tree_eigs[i] - block_eigs[i]));
    report.eigenvalue_multiset_distance = distance;
  }
  return report;
}

std::string report_to_json(const EquivalenceReport& report) {
  nlohmann::ordered_json j;
  j["dimension_identity"] = report.dimension_identity_holds;
  auto number_or_null = [](double v) {
    return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v);
  };
  j["orthonormality_residual"] = number_or_null(report.max_orthonormality_residual);
  j["offblock_residual"] = number_or_null(report.max_offblock_residual);
  j["eig_multiset_distance"] = number_or_null(report.eigenvalue_multiset_distance);
  j["levels"] = nlohmann::ordered_json::array();
  for (const auto& level : report.decomposition.levels) {
    nlohmann::ordered_json entry;
    entry["n"] = level.level;
    entry["Mn"] = level.multiplicity;
    entry["Rn"] = level.first_radius;
    entry["len"] = level.block_length;
    j["levels"].push_back(entry);
  }
  return j.dump(2) + "\n";
}

}  // namespace sts
