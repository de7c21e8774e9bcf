#include "sts/tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sts/errors.hpp"

namespace sts {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(Err::Overflow, "integer sum exceeds 64-bit range");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(Err::Overflow, "integer product exceeds 64-bit range");
  return r;
}

TreeSpec validate_spec(std::vector<std::int64_t> positions, std::vector<std::int64_t> factors,
                       std::string label, bool allow_root_branching) {
  if (positions.size() != factors.size())
    fail(Err::LengthMismatch, "branch_positions has " + std::to_string(positions.size()) +
                                  " entries, branch_factors has " + std::to_string(factors.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 0)
      fail(Err::NonIncreasingPositions, "L_" + std::to_string(i + 1) + " is negative");
    if (i > 0 && positions[i] <= positions[i - 1])
      fail(Err::NonIncreasingPositions,
           "L_" + std::to_string(i + 1) + " = " + std::to_string(positions[i]) +
               " does not exceed L_" + std::to_string(i) + " = " + std::to_string(positions[i - 1]));
    if (factors[i] < 2)
      fail(Err::BranchFactorBelowTwo,
           "k_" + std::to_string(i + 1) + " = " + std::to_string(factors[i]));
  }
  if (!positions.empty() && positions[0] == 0 && !allow_root_branching)
    fail(Err::RootBranchingDisallowed, "L_1 = 0 requires allow_root_branching");
  TreeSpec spec;
  spec.branch_positions = std::move(positions);
  spec.branch_factors = std::move(factors);
  spec.label = std::move(label);
  return spec;
}

std::int64_t kappa(const TreeSpec& spec, std::int64_t j) {
  const auto& pos = spec.branch_positions;
  auto it = std::lower_bound(pos.begin(), pos.end(), j);
  if (it != pos.end() && *it == j) return spec.branch_factors[it - pos.begin()];
  return 1;
}

std::int64_t sphere_size(const TreeSpec& spec, std::int64_t r) {
  std::int64_t size = 1;
  for (std::int64_t n = 0; n < spec.levels() && spec.branch_positions[n] < r; ++n)
    size = checked_mul(size, spec.branch_factors[n]);
  return size;
}

std::int64_t vertex_count(const TreeSpec& spec, std::int64_t depth) {
  if (depth < 0) fail(Err::DepthNegative, "depth = " + std::to_string(depth));
  // Sphere sizes are piecewise constant between branch positions; sum per segment.
  std::int64_t total = 0;
  std::int64_t size = 1;
  std::int64_t r = 0;  // first radius of the current segment
  for (std::int64_t n = 0; n <= spec.levels(); ++n) {
    std::int64_t seg_end =
        (n < spec.levels()) ? std::min(spec.branch_positions[n], depth) : depth;
    if (seg_end >= r) total = checked_add(total, checked_mul(size, seg_end - r + 1));
    if (n < spec.levels()) {
      if (spec.branch_positions[n] >= depth) break;
      size = checked_mul(size, spec.branch_factors[n]);
      r = spec.branch_positions[n] + 1;
    }
  }
  return total;
}

SHTree build_tree(const TreeSpec& spec, std::int64_t depth) {
  if (depth < 0) fail(Err::DepthNegative, "depth = " + std::to_string(depth));
  std::int64_t total = vertex_count(spec, depth);
  if (total > (std::int64_t{1} << 27))
    fail(Err::Overflow, "tree with " + std::to_string(total) + " vertices exceeds memory budget");

  SHTree tree;
  tree.spec = spec;
  tree.depth = depth;
  tree.sphere_offsets.resize(depth + 2);
  tree.sphere_offsets[0] = 0;
  std::int64_t size = 1;
  for (std::int64_t r = 0; r <= depth; ++r) {
    tree.sphere_offsets[r + 1] = tree.sphere_offsets[r] + size;
    if (r < depth) size *= kappa(spec, r);
  }
  tree.parent.assign(total, -1);
  for (std::int64_t r = 1; r <= depth; ++r) {
    std::int64_t k = kappa(spec, r - 1);
    std::int64_t begin = tree.sphere_offsets[r], end = tree.sphere_offsets[r + 1];
    for (std::int64_t v = begin; v < end; ++v)
      tree.parent[v] = tree.sphere_offsets[r - 1] + (v - begin) / k;
  }
  return tree;
}

NormalityVerdict is_normal_prefix(const TreeSpec& spec, std::int64_t min_run) {
  NormalityVerdict verdict;
  std::int64_t m = spec.levels();
  // Trailing run of strictly increasing branch factors.
  std::int64_t grow = 0;
  while (grow < m - 1 && spec.branch_factors[m - 1 - grow] > spec.branch_factors[m - 2 - grow]) ++grow;
  // Trailing run of unit gaps between branch positions.
  std::int64_t unit = 0;
  while (unit < m - 1 && spec.branch_positions[m - 1 - unit] - spec.branch_positions[m - 2 - unit] == 1)
    ++unit;
  if (grow >= min_run && unit >= min_run) {
    verdict.is_normal_prefix = false;
    std::ostringstream os;
    os << "branch factors strictly increase over the last " << grow
       << " levels while the last " << unit << " gaps L_{n+1}-L_n all equal 1";
    verdict.witness = os.str();
  }
  return verdict;
}

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double require_param(const std::map<std::string, double>& params, const std::string& key,
                     const std::string& preset_name) {
  auto it = params.find(key);
  if (it == params.end())
    fail(Err::MissingParam, "preset " + preset_name + " requires parameter '" + key + "'");
  return it->second;
}

// n^n saturated at 2^62, enough to compare against any feasible exponent.
std::int64_t pow_self_saturated(std::int64_t n) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < n; ++i) {
    if (r > (std::int64_t{1} << 62) / std::max<std::int64_t>(n, 1)) return std::int64_t{1} << 62;
    r *= n;
  }
  return r;
}

std::int64_t floor_log2(std::int64_t v) {
  std::int64_t e = 0;
  while ((std::int64_t{1} << (e + 1)) <= v && e < 62) ++e;
  return e;
}

// Branch factor floor(L^exponent), clamped into [2, kmax].
std::int64_t power_branch_factor(std::int64_t position, double exponent, std::int64_t kmax,
                                 bool& clamped) {
  double v = std::floor(std::pow(static_cast<double>(position), exponent) + 1e-9);
  if (v < 2.0) {
    clamped = true;
    return 2;
  }
  if (v >= static_cast<double>(kmax)) {
    clamped = true;
    return kmax;
  }
  return static_cast<std::int64_t>(v);
}

// Shared position schedule for the jl_beta families: exactly doubly
// exponential while representable, then exponent-geometric with the given
// growth ratio, always at most the cap. Stops once positions can no
// longer strictly increase.
std::vector<std::int64_t> jl_positions(std::int64_t levels, std::int64_t cap, double growth,
                                       bool& clamped) {
  std::vector<std::int64_t> L;
  std::int64_t e_cap = floor_log2(std::max<std::int64_t>(cap, 2));
  std::int64_t e_prev = 0;
  for (std::int64_t n = 1; n <= levels; ++n) {
    std::int64_t e_exact = pow_self_saturated(n);
    std::int64_t e = std::min(e_exact, e_cap);
    if (n > 1) e = std::min(e, static_cast<std::int64_t>(growth * static_cast<double>(e_prev)));
    if (e != e_exact) clamped = true;
    if (n > 1 && e <= e_prev) break;
    L.push_back(std::int64_t{1} << e);
    e_prev = e;
  }
  return L;
}

}  // namespace

TreeSpec preset(const std::string& name, const std::map<std::string, double>& params) {
  std::ostringstream label;
  if (name == "bounded_k") {
    std::int64_t k0 = static_cast<std::int64_t>(require_param(params, "k0", name));
    std::int64_t levels = static_cast<std::int64_t>(get_param(params, "levels", 5));
    std::int64_t cap = static_cast<std::int64_t>(get_param(params, "cap", 1e6));
    std::vector<std::int64_t> L, k;
    std::int64_t pos = 1;
    for (std::int64_t n = 0; n < levels && pos <= cap; ++n) {
      L.push_back(pos);
      k.push_back(k0);
      pos = checked_add(checked_mul(pos, 2), 1);  // doubling gaps
    }
    label << "bounded_k(k0=" << k0 << ",levels=" << L.size() << ")";
    if (static_cast<std::int64_t>(L.size()) < levels) label << " [cap " << cap << " reached]";
    return validate_spec(L, k, label.str());
  }
  if (name == "unbounded_k") {
    std::int64_t levels = static_cast<std::int64_t>(get_param(params, "levels", 8));
    std::int64_t cap = static_cast<std::int64_t>(get_param(params, "cap", 1e6));
    std::vector<std::int64_t> L, k;
    std::int64_t pos = 1, alpha = 1;
    for (std::int64_t n = 1; n <= levels && pos <= cap; ++n) {
      L.push_back(pos);
      k.push_back(n + 1);
      alpha = checked_mul(alpha, n + 1);
      pos = checked_add(pos, checked_mul(alpha, alpha));  // gaps = alpha_n^2
    }
    label << "unbounded_k(levels=" << L.size() << ",cap=" << cap << ")";
    if (static_cast<std::int64_t>(L.size()) < levels) label << " [cap reached]";
    return validate_spec(L, k, label.str());
  }
  if (name == "jl_beta" || name == "jl_beta_c") {
    double beta = 0, c = 0;
    if (name == "jl_beta") {
      beta = require_param(params, "beta", name);
    } else {
      c = require_param(params, "c", name);
      if (c <= 0.0 || c >= 1.0) fail(Err::MissingParam, "jl_beta_c requires 0 < c < 1");
    }
    std::int64_t levels = static_cast<std::int64_t>(get_param(params, "levels", 8));
    std::int64_t cap = static_cast<std::int64_t>(get_param(params, "cap", 1e6));
    double growth = get_param(params, "growth", 4.0);
    std::int64_t kmax =
        static_cast<std::int64_t>(get_param(params, "kmax", static_cast<double>(std::int64_t{1} << 50)));
    bool pos_clamped = false, k_clamped = false;
    std::vector<std::int64_t> L = jl_positions(levels, cap, growth, pos_clamped);
    std::vector<std::int64_t> k;
    for (std::size_t i = 0; i < L.size(); ++i) {
      double exponent = beta;
      if (name == "jl_beta_c") {
        double n = static_cast<double>(i + 1);
        exponent = c * std::pow(n + 1.0, n + 1.0) / std::pow(n, n);
      }
      k.push_back(power_branch_factor(L[i], exponent, kmax, k_clamped));
    }
    if (name == "jl_beta")
      label << "jl_beta(beta=" << beta;
    else
      label << "jl_beta_c(c=" << c;
    label << ",cap=" << cap << ",levels=" << L.size() << ")";
    if (pos_clamped) label << " [positions clamped]";
    if (k_clamped) label << " [branch factors clamped]";
    return validate_spec(L, k, label.str());
  }
  fail(Err::UnknownPreset, name);
}

const char* to_string(Err code) {
  switch (code) {
    case Err::NonIncreasingPositions: return "NonIncreasingPositions";
    case Err::BranchFactorBelowTwo: return "BranchFactorBelowTwo";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::RootBranchingDisallowed: return "RootBranchingDisallowed";
    case Err::Overflow: return "Overflow";
    case Err::DepthNegative: return "DepthNegative";
    case Err::UnknownPreset: return "UnknownPreset";
    case Err::MissingParam: return "MissingParam";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::LevelOutOfRange: return "LevelOutOfRange";
    case Err::StripTooLong: return "StripTooLong";
    case Err::DepthExceedsLength: return "DepthExceedsLength";
    case Err::LadderTooShort: return "LadderTooShort";
    case Err::NotConverged: return "NotConverged";
    case Err::EmptyGrid: return "EmptyGrid";
    case Err::SpecParseError: return "SpecParseError";
    case Err::UsageError: return "UsageError";
  }
  return "UnknownError";
}

}  // namespace sts
