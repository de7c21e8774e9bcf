#include "sts/operators.hpp"

#include <cmath>
#include <sstream>

#include "sts/errors.hpp"
#include "sts/io.hpp"

namespace sts {

LaplacianKind parse_kind(const std::string& name) {
  if (name == "adjacency") return LaplacianKind::Adjacency;
  if (name == "graphlap") return LaplacianKind::GraphLaplacian;
  fail(Err::UsageError, "unknown operator kind '" + name + "' (want adjacency|graphlap)");
}

JacobiMatrix make_jacobi(std::vector<double> off_diagonal, std::vector<double> diagonal) {
  if (diagonal.empty()) fail(Err::DimensionMismatch, "Jacobi truncation needs at least one row");
  if (off_diagonal.size() + 1 != diagonal.size())
    fail(Err::DimensionMismatch, "need N-1 off-diagonal entries for N diagonal entries");
  for (double a : off_diagonal)
    if (!(a > 0.0) || !std::isfinite(a))
      fail(Err::DimensionMismatch, "off-diagonal entries must be positive and finite");
  for (double b : diagonal)
    if (!std::isfinite(b)) fail(Err::DimensionMismatch, "diagonal entries must be finite");
  return JacobiMatrix{std::move(off_diagonal), std::move(diagonal)};
}

JacobiMatrix free_jacobi(std::int64_t length) {
  return make_jacobi(std::vector<double>(length - 1, 1.0), std::vector<double>(length, 0.0));
}

SparseSymmetric assemble(const SHTree& tree, LaplacianKind kind) {
  SparseSymmetric m;
  m.dimension = tree.vertex_count();
  m.entries.reserve(kind == LaplacianKind::Adjacency ? m.dimension - 1 : 2 * m.dimension - 1);
  if (kind == LaplacianKind::GraphLaplacian) {
    // Degree within the truncation: the parent edge plus, away from the
    // cut sphere, kappa_r children.
    for (std::int64_t r = 0; r <= tree.depth; ++r) {
      std::int64_t deg = (r > 0 ? 1 : 0) + (r < tree.depth ? kappa(tree.spec, r) : 0);
      if (deg == 0) continue;
      for (std::int64_t v = tree.sphere_begin(r); v < tree.sphere_end(r); ++v)
        m.entries.push_back({v, v, static_cast<double>(-deg)});
    }
  }
  for (std::int64_t v = 1; v < m.dimension; ++v)
    m.entries.push_back({tree.parent[v], v, 1.0});
  return m;
}

std::vector<double> matvec(const SparseSymmetric& m, const std::vector<double>& v) {
  if (static_cast<std::int64_t>(v.size()) != m.dimension)
    fail(Err::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                     " vs dimension " + std::to_string(m.dimension));
  std::vector<double> out(v.size(), 0.0);
  for (const auto& e : m.entries) {
    out[e.row] += e.value * v[e.col];
    if (e.row != e.col) out[e.col] += e.value * v[e.row];
  }
  return out;
}

std::vector<double> matvec(const JacobiMatrix& j, const std::vector<double>& v) {
  std::int64_t n = j.length();
  if (static_cast<std::int64_t>(v.size()) != n)
    fail(Err::DimensionMismatch, "vector length " + std::to_string(v.size()) + " vs truncation " +
                                     std::to_string(n));
  std::vector<double> out(n);
  for (std::int64_t i = 0; i < n; ++i) {
    double s = j.diagonal[i] * v[i];
    if (i > 0) s += j.off_diagonal[i - 1] * v[i - 1];
    if (i + 1 < n) s += j.off_diagonal[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

DenseMatrix to_dense(const SparseSymmetric& m) {
  DenseMatrix d(m.dimension);
  for (const auto& e : m.entries) {
    d.at(e.row, e.col) += e.value;
    if (e.row != e.col) d.at(e.col, e.row) += e.value;
  }
  return d;
}

std::int64_t level_radius(const TreeSpec& spec, std::int64_t level) {
  if (level < 0 || level > spec.levels())
    fail(Err::LevelOutOfRange,
         "level " + std::to_string(level) + " of " + std::to_string(spec.levels()));
  return level == 0 ? 0 : spec.branch_positions[level - 1] + 1;
}

JacobiMatrix jacobi_level(const TreeSpec& spec, std::int64_t level, std::int64_t length,
                          LaplacianKind kind) {
  if (length < 1) fail(Err::DimensionMismatch, "truncation length must be >= 1");
  std::int64_t first_radius = level_radius(spec, level);
  std::int64_t cut_radius = first_radius + length - 1;

  std::vector<double> a(length - 1, 1.0);
  std::vector<double> b(length, 0.0);
  // Off-diagonal a(j) couples radii first_radius+j-1 and first_radius+j, so
  // it is sqrt(k_m) exactly when that lower radius is a branch position.
  for (std::int64_t m = level; m < spec.levels(); ++m) {
    std::int64_t j = spec.branch_positions[m] - first_radius + 1;  // = R_m - R_level
    if (j >= 1 && j <= length - 1) a[j - 1] = std::sqrt(static_cast<double>(spec.branch_factors[m]));
  }
  if (kind == LaplacianKind::GraphLaplacian) {
    for (std::int64_t j = 1; j <= length; ++j) {
      std::int64_t r = first_radius + j - 1;
      std::int64_t deg = (r > 0 ? 1 : 0) + (r < cut_radius ? kappa(spec, r) : 0);
      b[j - 1] = static_cast<double>(-deg);
    }
  }
  return make_jacobi(std::move(a), std::move(b));
}

JacobiMatrix strip(const JacobiMatrix& j, std::int64_t m) {
  if (m < 0 || m >= j.length())
    fail(Err::StripTooLong, "cannot strip " + std::to_string(m) + " rows from a truncation of " +
                                std::to_string(j.length()));
  return JacobiMatrix{
      std::vector<double>(j.off_diagonal.begin() + m, j.off_diagonal.end()),
      std::vector<double>(j.diagonal.begin() + m, j.diagonal.end()),
  };
}

std::string to_csv(const JacobiMatrix& j) {
  std::ostringstream out;
  out << "j,a,b\n";
  for (std::int64_t row = 1; row <= j.length(); ++row) {
    out << row << ',';
    if (row < j.length()) out << fmt_double(j.a(row));
    out << ',' << fmt_double(j.b(row)) << '\n';
  }
  return out.str();
}

JacobiMatrix jacobi_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "j,a,b")
    fail(Err::SpecParseError, "expected header 'j,a,b'");
  std::vector<double> a, b;
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) fail(Err::SpecParseError, "expected 3 fields: '" + line + "'");
    ++row;
    if (std::stoll(fields[0]) != row) fail(Err::SpecParseError, "row indices must be 1,2,...");
    if (!fields[1].empty()) a.push_back(std::stod(fields[1]));
    b.push_back(std::stod(fields[2]));
  }
  return make_jacobi(std::move(a), std::move(b));
}

std::string to_coord_text(const SparseSymmetric& m) {
  std::ostringstream out;
  for (const auto& e : m.entries)
    out << e.row << ' ' << e.col << ' ' << fmt_double(e.value) << '\n';
  return out.str();
}

SparseSymmetric sparse_from_coord_text(const std::string& text) {
  SparseSymmetric m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    SparseSymmetric::Entry e;
    if (!(fields >> e.row >> e.col >> e.value))
      fail(Err::SpecParseError, "bad coordinate line '" + line + "'");
    m.entries.push_back(e);
    m.dimension = std::max(m.dimension, e.col + 1);
  }
  return m;
}

}  // namespace sts
