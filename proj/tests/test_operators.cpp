#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sts/errors.hpp"
#include "sts/operators.hpp"

using namespace sts;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

SHTree k13() { return build_tree(validate_spec({1}, {2}), 2); }  // star around v_1

TreeSpec random_spec(std::mt19937_64& rng, int max_levels = 4) {
  std::uniform_int_distribution<int> nlev(0, max_levels), kdist(2, 5), gap(1, 4);
  std::vector<std::int64_t> L, k;
  std::int64_t pos = 0;
  int levels = nlev(rng);
  for (int i = 0; i < levels; ++i) {
    pos += gap(rng);
    L.push_back(pos);
    k.push_back(kdist(rng));
  }
  return validate_spec(L, k);
}

}  // namespace

TEST_CASE("adjacency of the two-vertex path") {
  SHTree path = build_tree(validate_spec({}, {}), 1);
  SparseSymmetric m = assemble(path, LaplacianKind::Adjacency);
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].row == 0);
  CHECK(m.entries[0].col == 1);
  CHECK(m.entries[0].value == 1.0);
}

TEST_CASE("adjacency and graph laplacian of the 4-vertex star") {
  SparseSymmetric adj = assemble(k13(), LaplacianKind::Adjacency);
  REQUIRE(adj.entries.size() == 3);
  DenseMatrix d = to_dense(adj);
  CHECK(d.at(0, 1) == 1.0);
  CHECK(d.at(1, 2) == 1.0);
  CHECK(d.at(1, 3) == 1.0);
  CHECK(d.at(0, 2) == 0.0);

  SparseSymmetric lap = assemble(k13(), LaplacianKind::GraphLaplacian);
  DenseMatrix dl = to_dense(lap);
  CHECK(dl.at(0, 0) == -1.0);
  CHECK(dl.at(1, 1) == -3.0);
  CHECK(dl.at(2, 2) == -1.0);
  CHECK(dl.at(3, 3) == -1.0);
  CHECK(dl.at(0, 1) == 1.0);
}

TEST_CASE("adjacency has exactly n-1 unit entries; laplacian = adjacency - degree") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    TreeSpec spec = random_spec(rng);
    std::uniform_int_distribution<std::int64_t> ddist(0, 7);
    SHTree tree = build_tree(spec, ddist(rng));
    SparseSymmetric adj = assemble(tree, LaplacianKind::Adjacency);
    CHECK(static_cast<std::int64_t>(adj.entries.size()) == tree.vertex_count() - 1);
    for (const auto& e : adj.entries) {
      CHECK(e.value == 1.0);
      CHECK(e.row < e.col);
    }
    // degree counted straight off the parent array
    std::vector<double> degree(tree.vertex_count(), 0.0);
    for (std::int64_t v = 1; v < tree.vertex_count(); ++v) {
      degree[v] += 1.0;
      degree[tree.parent[v]] += 1.0;
    }
    DenseMatrix da = to_dense(adj);
    DenseMatrix dl = to_dense(assemble(tree, LaplacianKind::GraphLaplacian));
    for (std::int64_t i = 0; i < da.n; ++i)
      for (std::int64_t j = 0; j < da.n; ++j)
        CHECK(dl.at(i, j) == da.at(i, j) - (i == j ? degree[i] : 0.0));
  }
}

TEST_CASE("matvec on the star") {
  SparseSymmetric adj = assemble(k13(), LaplacianKind::Adjacency);
  std::vector<double> delta_root = {1, 0, 0, 0};
  CHECK(matvec(adj, delta_root) == std::vector<double>{0, 1, 0, 0});
  std::vector<double> delta_center = {0, 1, 0, 0};
  CHECK(matvec(adj, delta_center) == std::vector<double>{1, 0, 1, 1});
  CHECK_THROWS_WITH_AS(matvec(adj, {1, 0}), doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("jacobi_level places sqrt(k_m) at j = R_m - R_n") {
  TreeSpec spec = validate_spec({2, 5}, {2, 3});
  JacobiMatrix j0 = jacobi_level(spec, 0, 10, LaplacianKind::Adjacency);
  for (std::int64_t j = 1; j <= 9; ++j) {
    double expect = j == 3 ? kSqrt2 : (j == 6 ? kSqrt3 : 1.0);
    CHECK(j0.a(j) == expect);
  }
  for (std::int64_t j = 1; j <= 10; ++j) CHECK(j0.b(j) == 0.0);

  JacobiMatrix j1 = jacobi_level(spec, 1, 5, LaplacianKind::Adjacency);
  for (std::int64_t j = 1; j <= 4; ++j) CHECK(j1.a(j) == (j == 3 ? kSqrt3 : 1.0));

  JacobiMatrix free = jacobi_level(validate_spec({}, {}), 0, 6, LaplacianKind::Adjacency);
  for (std::int64_t j = 1; j <= 5; ++j) CHECK(free.a(j) == 1.0);

  CHECK_THROWS_WITH_AS(jacobi_level(spec, 3, 5, LaplacianKind::Adjacency),
                       doctest::Contains("LevelOutOfRange"), Error);
}

TEST_CASE("graph laplacian blocks carry the truncated degrees") {
  TreeSpec spec = validate_spec({1}, {2});
  JacobiMatrix j0 = jacobi_level(spec, 0, 3, LaplacianKind::GraphLaplacian);
  CHECK(j0.diagonal == std::vector<double>{-1, -3, -1});
  CHECK(j0.off_diagonal == std::vector<double>{1.0, kSqrt2});
  JacobiMatrix j1 = jacobi_level(spec, 1, 1, LaplacianKind::GraphLaplacian);
  CHECK(j1.diagonal == std::vector<double>{-1});

  // depth-0 truncation is the isolated root
  JacobiMatrix root = jacobi_level(spec, 0, 1, LaplacianKind::GraphLaplacian);
  CHECK(root.diagonal == std::vector<double>{0});
}

TEST_CASE("strip drops leading rows and matches deeper levels exactly") {
  TreeSpec spec = validate_spec({2, 5}, {2, 3});
  JacobiMatrix j0 = jacobi_level(spec, 0, 10, LaplacianKind::Adjacency);
  JacobiMatrix same = strip(j0, 0);
  CHECK(same.diagonal == j0.diagonal);
  CHECK(same.off_diagonal == j0.off_diagonal);

  JacobiMatrix tail = strip(j0, 3);  // R_1 - R_0 = 3
  JacobiMatrix j1 = jacobi_level(spec, 1, 7, LaplacianKind::Adjacency);
  CHECK(tail.diagonal == j1.diagonal);
  CHECK(tail.off_diagonal == j1.off_diagonal);

  CHECK_THROWS_WITH_AS(strip(j0, 10), doctest::Contains("StripTooLong"), Error);
}

TEST_CASE("all level pairs are tails of each other, both kinds") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    TreeSpec spec = random_spec(rng);
    for (LaplacianKind kind : {LaplacianKind::Adjacency, LaplacianKind::GraphLaplacian}) {
      for (std::int64_t n2 = 0; n2 <= spec.levels(); ++n2) {
        for (std::int64_t n1 = n2 + 1; n1 <= spec.levels(); ++n1) {
          std::int64_t shift = level_radius(spec, n1) - level_radius(spec, n2);
          std::int64_t len = 12;
          JacobiMatrix deep = jacobi_level(spec, n1, len, kind);
          JacobiMatrix shallow = jacobi_level(spec, n2, len + shift, kind);
          JacobiMatrix stripped = strip(shallow, shift);
          CHECK(deep.diagonal == stripped.diagonal);
          CHECK(deep.off_diagonal == stripped.off_diagonal);
        }
      }
    }
  }
}

TEST_CASE("jacobi csv serialization round-trips") {
  TreeSpec spec = validate_spec({1}, {3});
  JacobiMatrix j = jacobi_level(spec, 0, 3, LaplacianKind::GraphLaplacian);
  std::string csv = to_csv(j);
  CHECK(csv ==
        "j,a,b\n"
        "1,1,-1\n"
        "2,1.7320508075688772,-4\n"
        "3,,-1\n");
  JacobiMatrix back = jacobi_from_csv(csv);
  CHECK(back.diagonal == j.diagonal);
  CHECK(back.off_diagonal == j.off_diagonal);
}

TEST_CASE("coordinate text round-trips") {
  SparseSymmetric m = assemble(k13(), LaplacianKind::GraphLaplacian);
  std::string text = to_coord_text(m);
  SparseSymmetric back = sparse_from_coord_text(text);
  CHECK(back.dimension == m.dimension);
  REQUIRE(back.entries.size() == m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    CHECK(back.entries[i].row == m.entries[i].row);
    CHECK(back.entries[i].col == m.entries[i].col);
    CHECK(back.entries[i].value == m.entries[i].value);
  }
  CHECK(to_coord_text(back) == text);
}
