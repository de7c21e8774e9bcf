#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sts/operators.hpp"
#include "sts/tree.hpp"

namespace sts {

// One level of the direct-sum structure at finite depth: the block J_n
// appears multiplicity times, truncated to block_length rows (its first row
// sits at tree radius first_radius = R_n).
struct PlanLevel {
  std::int64_t level;         // n
  std::int64_t first_radius;  // R_n
  std::int64_t multiplicity;  // M_n
  std::int64_t block_length;  // depth - R_n + 1
};

struct DecompositionPlan {
  std::int64_t depth = 0;
  std::vector<PlanLevel> levels;

  // Sum of multiplicity * block_length; equals vertex_count(spec, depth).
  std::int64_t total_dimension() const;
};

DecompositionPlan plan(const TreeSpec& spec, std::int64_t depth);

// Deterministic orthonormal complement of the all-ones direction in R^k:
// k-1 rows, each summing to zero (Helmert construction). Row t has t
// entries 1/sqrt(t(t+1)) followed by -t/sqrt(t(t+1)).
std::vector<std::vector<double>> sibling_block_basis(std::int64_t k);

// One row of the decomposition basis: supported on a single sphere, with
// the seed coefficient of its sibling spread uniformly over that sibling's
// forward subtree and normalized.
struct BasisRow {
  std::int64_t level;   // n
  std::int64_t copy;    // 1..M_n
  std::int64_t radius;  // R_n..depth
  std::vector<std::int64_t> support;  // vertex indices, ascending
  std::vector<double> coeff;
};

struct OrthogonalBasis {
  std::int64_t dimension = 0;        // vertex_count(spec, depth)
  std::vector<BasisRow> rows;        // ordered by (level, copy, radius)
};

OrthogonalBasis build_basis(const TreeSpec& spec, std::int64_t depth);

// U M U^T in basis row order; block diagonal up to roundoff when M is a
// Laplacian of the generating spec.
DenseMatrix conjugate(const OrthogonalBasis& basis, const SparseSymmetric& m);

struct EquivalenceReport {
  bool dimension_identity_holds = false;
  // Residuals are NaN when the instance exceeded the dense cap and only
  // the integer identity and eigenvalue comparison ran.
  double max_orthonormality_residual = 0;
  double max_offblock_residual = 0;
  double eigenvalue_multiset_distance = 0;
  DecompositionPlan decomposition;
};

struct VerifyOptions {
  std::int64_t dense_cap = 4000;  // conjugation + dense eigensolve bound
};

EquivalenceReport verify_equivalence(const TreeSpec& spec, std::int64_t depth, LaplacianKind kind,
                                     const VerifyOptions& options = {});

std::string report_to_json(const EquivalenceReport& report);

}  // namespace sts
