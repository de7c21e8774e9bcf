#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sts/tree.hpp"

namespace sts {

// The two natural operators on a non-regular tree: plain neighbor sums, or
// neighbor sums minus the degree on the diagonal.
enum class LaplacianKind { Adjacency, GraphLaplacian };

LaplacianKind parse_kind(const std::string& name);  // "adjacency" | "graphlap"

// Real symmetric matrix in upper-triangle coordinate form.
struct SparseSymmetric {
  struct Entry {
    std::int64_t row, col;  // row <= col
    double value;
  };
  std::int64_t dimension = 0;
  std::vector<Entry> entries;
};

struct DenseMatrix {
  std::int64_t n = 0;
  std::vector<double> data;  // row major, n*n

  explicit DenseMatrix(std::int64_t size = 0) : n(size), data(size * size, 0.0) {}
  double& at(std::int64_t i, std::int64_t j) { return data[i * n + j]; }
  double at(std::int64_t i, std::int64_t j) const { return data[i * n + j]; }
};

// Half-line Jacobi operator truncated to N rows: diagonal b(1..N) and
// off-diagonal a(1..N-1), all a(j) > 0.
struct JacobiMatrix {
  std::vector<double> off_diagonal;
  std::vector<double> diagonal;

  std::int64_t length() const { return static_cast<std::int64_t>(diagonal.size()); }
  double a(std::int64_t j) const { return off_diagonal[j - 1]; }  // 1 <= j <= N-1
  double b(std::int64_t j) const { return diagonal[j - 1]; }      // 1 <= j <= N
};

JacobiMatrix make_jacobi(std::vector<double> off_diagonal, std::vector<double> diagonal);
JacobiMatrix free_jacobi(std::int64_t length);  // a == 1, b == 0

SparseSymmetric assemble(const SHTree& tree, LaplacianKind kind);

std::vector<double> matvec(const SparseSymmetric& m, const std::vector<double>& v);
std::vector<double> matvec(const JacobiMatrix& j, const std::vector<double>& v);

DenseMatrix to_dense(const SparseSymmetric& m);

// R_n: the first radius strictly past branch level n (R_0 = 0).
std::int64_t level_radius(const TreeSpec& spec, std::int64_t level);

// The level-n Jacobi block of the decomposition, truncated to `length`
// rows; row j sits at tree radius R_n + j - 1, and the truncation
// corresponds to cutting the tree after sphere R_n + length - 1 (the last
// diagonal entry of the GraphLaplacian kind uses the cut degree).
JacobiMatrix jacobi_level(const TreeSpec& spec, std::int64_t level, std::int64_t length,
                          LaplacianKind kind);

// Drops the m leftmost rows and columns.
JacobiMatrix strip(const JacobiMatrix& j, std::int64_t m);

// CSV with header "j,a,b"; the last row has an empty a field.
std::string to_csv(const JacobiMatrix& j);
JacobiMatrix jacobi_from_csv(const std::string& text);

// Coordinate text, one "row col value" per line, zero-based.
std::string to_coord_text(const SparseSymmetric& m);
SparseSymmetric sparse_from_coord_text(const std::string& text);

}  // namespace sts
