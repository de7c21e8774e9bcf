#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sts/tree.hpp"

namespace sts {

struct SpecConfig {
  TreeSpec spec;
  std::optional<std::int64_t> depth;
};

// Plain-text key-value format, one `key = value` per line, `#` comments.
// Either explicit sequences
//   L = 1,5
//   k = 2,2
// or a named family
//   preset = jl_beta
//   beta = 1.0
//   cap = 1000000
// plus optional `depth`, `label`, `root_branching` (0/1). Integer lists are
// comma separated with no trailing comma. Unknown keys are errors.
SpecConfig parse_spec_text(const std::string& text);
SpecConfig load_spec_file(const std::string& path);

}  // namespace sts
