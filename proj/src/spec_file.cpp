#include "sts/spec_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sts/errors.hpp"

namespace sts {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view v, int line_no) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    fail(Err::SpecParseError, "line " + std::to_string(line_no) + ": bad integer '" + std::string(v) + "'");
  return out;
}

double parse_real(std::string_view v, int line_no) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != s.size())
    fail(Err::SpecParseError, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return out;
}

std::vector<std::int64_t> parse_int_list(std::string_view v, int line_no) {
  std::vector<std::int64_t> out;
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = v.find(',', start);
    std::string_view item = v.substr(start, comma == std::string_view::npos ? comma : comma - start);
    if (item.empty())
      fail(Err::SpecParseError, "line " + std::to_string(line_no) + ": empty list item");
    out.push_back(parse_int(item, line_no));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool valid_key(std::string_view key) {
  if (key.empty() || (!std::isalpha(static_cast<unsigned char>(key[0])) && key[0] != '_')) return false;
  for (char c : key)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

SpecConfig parse_spec_text(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string_view body = trim(line);
    if (body.empty()) continue;
    std::size_t eq = body.find('=');
    if (eq == std::string_view::npos)
      fail(Err::SpecParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (!valid_key(key))
      fail(Err::SpecParseError, "line " + std::to_string(line_no) + ": bad key '" + key + "'");
    if (values.count(key))
      fail(Err::SpecParseError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    values[key] = value;
  }

  static const std::set<std::string> known = {"L",   "k",      "depth",  "preset", "beta",
                                              "c",   "k0",     "cap",    "levels", "growth",
                                              "kmax", "label", "root_branching"};
  static const std::set<std::string> preset_params = {"beta", "c", "k0", "cap", "levels", "growth", "kmax"};
  for (const auto& [key, value] : values)
    if (!known.count(key)) fail(Err::SpecParseError, "unknown key '" + key + "'");

  SpecConfig config;
  if (values.count("depth")) config.depth = parse_int(values["depth"], 0);

  if (values.count("preset")) {
    if (values.count("L") || values.count("k"))
      fail(Err::SpecParseError, "preset and explicit L/k are mutually exclusive");
    std::map<std::string, double> params;
    for (const auto& key : preset_params)
      if (values.count(key)) params[key] = parse_real(values[key], 0);
    config.spec = preset(values["preset"], params);
  } else {
    std::vector<std::int64_t> L, k;
    if (values.count("L")) L = parse_int_list(values["L"], 0);
    if (values.count("k")) k = parse_int_list(values["k"], 0);
    bool root_branching = values.count("root_branching") && parse_int(values["root_branching"], 0) != 0;
    std::string label = values.count("label") ? values["label"] : "";
    config.spec = validate_spec(std::move(L), std::move(k), label, root_branching);
  }
  return config;
}

SpecConfig load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::SpecParseError, "cannot open spec file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec_text(buffer.str());
}

}  // namespace sts
