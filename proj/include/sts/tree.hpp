#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sts {

// A sparse spherically homogeneous rooted tree is fixed by two finite
// sequences: positions L_n where the branching number differs from 1, and
// the branch factors k_n at those positions. Every vertex at distance j
// from the root has kappa_j forward neighbors, kappa_j = k_n when j = L_n
// and 1 otherwise.
struct TreeSpec {
  std::vector<std::int64_t> branch_positions;  // L_n, strictly increasing
  std::vector<std::int64_t> branch_factors;    // k_n, each >= 2
  std::string label;

  std::int64_t levels() const { return static_cast<std::int64_t>(branch_positions.size()); }
};

// Finite-depth concrete tree in canonical BFS order: all of sphere r
// precedes sphere r+1, and within a sphere children of earlier parents
// come first.
struct SHTree {
  TreeSpec spec;
  std::int64_t depth = 0;
  std::vector<std::int64_t> sphere_offsets;  // size depth+2; entry r = first vertex at distance r
  std::vector<std::int64_t> parent;          // parent[0] = -1

  std::int64_t vertex_count() const { return sphere_offsets.back(); }
  std::int64_t sphere_begin(std::int64_t r) const { return sphere_offsets[r]; }
  std::int64_t sphere_end(std::int64_t r) const { return sphere_offsets[r + 1]; }
};

struct NormalityVerdict {
  bool is_normal_prefix = true;
  std::string witness;  // gap/growth pattern when the prefix looks non-normal
};

// Overflow-checked int64 helpers; report instead of wrapping.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

// Validates the defining sequences. Branching at the root (L_1 = 0) is
// rejected unless explicitly allowed.
TreeSpec validate_spec(std::vector<std::int64_t> positions, std::vector<std::int64_t> factors,
                       std::string label = "", bool allow_root_branching = false);

// kappa_j: branch factor at distance j from the root.
std::int64_t kappa(const TreeSpec& spec, std::int64_t j);

// Number of vertices at distance r: the product of kappa_j for j < r.
std::int64_t sphere_size(const TreeSpec& spec, std::int64_t r);

// Total vertices of the depth-D truncation.
std::int64_t vertex_count(const TreeSpec& spec, std::int64_t depth);

SHTree build_tree(const TreeSpec& spec, std::int64_t depth);

// Finite-prefix proxy for normality: flags specs whose k_n keep strictly
// increasing while all recent gaps L_{n+1}-L_n equal 1. Advisory only;
// never blocks construction.
NormalityVerdict is_normal_prefix(const TreeSpec& spec, std::int64_t min_run = 3);

// Named families at desk scale. Recognized names: bounded_k, unbounded_k,
// jl_beta, jl_beta_c. Parameters (by name, all numeric):
//   bounded_k:   k0 (required), levels [5]
//   unbounded_k: levels [8], cap [1e6]
//   jl_beta:     beta (required), cap [1e6], levels [8], growth [4], kmax [2^50]
//   jl_beta_c:   c (required), plus the jl_beta parameters
// Positions follow doubling gaps (bounded_k), gaps equal to alpha_n^2
// (unbounded_k), or a doubly exponential schedule clamped by the cap
// (jl_beta*); any clamping is recorded in the label.
TreeSpec preset(const std::string& name, const std::map<std::string, double>& params);

}  // namespace sts
