#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sts/errors.hpp"
#include "sts/spec_file.hpp"
#include "sts/tree.hpp"

using namespace sts;

namespace {

TreeSpec figure1() { return validate_spec({1, 5}, {2, 2}, "figure1"); }

}  // namespace

TEST_CASE("validate_spec accepts the figure-1 tree and the bare half line") {
  TreeSpec f = figure1();
  CHECK(f.levels() == 2);
  TreeSpec empty = validate_spec({}, {});
  CHECK(empty.levels() == 0);
}

TEST_CASE("validate_spec rejects malformed sequences") {
  CHECK_THROWS_WITH_AS(validate_spec({3, 2}, {2, 2}), doctest::Contains("NonIncreasingPositions"),
                       Error);
  CHECK_THROWS_WITH_AS(validate_spec({1, 1}, {2, 2}), doctest::Contains("NonIncreasingPositions"),
                       Error);
  CHECK_THROWS_WITH_AS(validate_spec({1}, {1}), doctest::Contains("BranchFactorBelowTwo"), Error);
  CHECK_THROWS_WITH_AS(validate_spec({1, 2}, {2}), doctest::Contains("LengthMismatch"), Error);
  CHECK_THROWS_AS(validate_spec({0}, {2}), Error);          // root branching needs the flag
  CHECK_NOTHROW(validate_spec({0}, {2}, "", true));
}

TEST_CASE("kappa is the branch factor at branch positions and 1 elsewhere") {
  TreeSpec f = figure1();
  CHECK(kappa(f, 0) == 1);
  CHECK(kappa(f, 1) == 2);
  CHECK(kappa(f, 2) == 1);
  CHECK(kappa(f, 3) == 1);
  CHECK(kappa(f, 4) == 1);
  CHECK(kappa(f, 5) == 2);
  CHECK(kappa(f, 6) == 1);
  TreeSpec empty = validate_spec({}, {});
  CHECK(kappa(empty, 7) == 1);
}

TEST_CASE("sphere sizes multiply across branch positions") {
  TreeSpec f = figure1();
  CHECK(sphere_size(f, 0) == 1);
  CHECK(sphere_size(f, 1) == 1);
  CHECK(sphere_size(f, 2) == 2);
  CHECK(sphere_size(f, 5) == 2);
  CHECK(sphere_size(f, 6) == 4);
}

TEST_CASE("vertex counts") {
  CHECK(vertex_count(validate_spec({}, {}), 5) == 6);           // path graph
  CHECK(vertex_count(validate_spec({1}, {2}), 2) == 4);         // 1+1+2
  CHECK(vertex_count(figure1(), 6) == 14);                      // 1+1+2+2+2+2+4
  CHECK_THROWS_AS(vertex_count(figure1(), -1), Error);
}

TEST_CASE("build_tree produces canonical BFS layout") {
  SHTree t = build_tree(validate_spec({1}, {2}), 2);
  CHECK(t.vertex_count() == 4);
  CHECK(t.parent == std::vector<std::int64_t>{-1, 0, 1, 1});
  CHECK(t.sphere_offsets == std::vector<std::int64_t>{0, 1, 2, 4});

  SHTree path = build_tree(validate_spec({}, {}), 3);
  CHECK(path.parent == std::vector<std::int64_t>{-1, 0, 1, 2});

  SHTree f = build_tree(figure1(), 2);
  CHECK(f.parent == std::vector<std::int64_t>{-1, 0, 1, 1});
}

TEST_CASE("tree invariants hold on random specs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> nlev(0, 4), kdist(2, 5), gap(1, 4), ddist(0, 9);
    std::vector<std::int64_t> L, k;
    std::int64_t pos = 0;
    int levels = nlev(rng);
    for (int i = 0; i < levels; ++i) {
      pos += gap(rng);
      L.push_back(pos);
      k.push_back(kdist(rng));
    }
    TreeSpec spec = validate_spec(L, k);
    std::int64_t depth = ddist(rng);

    std::int64_t total = 0;
    for (std::int64_t r = 0; r <= depth; ++r) {
      total += sphere_size(spec, r);
      CHECK(sphere_size(spec, r + 1) == sphere_size(spec, r) * kappa(spec, r));
    }
    CHECK(vertex_count(spec, depth) == total);

    SHTree tree = build_tree(spec, depth);
    CHECK(tree.vertex_count() == total);
    for (std::int64_t r = 1; r <= depth; ++r) {
      CHECK(tree.sphere_end(r) - tree.sphere_begin(r) == sphere_size(spec, r));
      std::vector<std::int64_t> child_count(total, 0);
      for (std::int64_t v = tree.sphere_begin(r); v < tree.sphere_end(r); ++v) {
        std::int64_t p = tree.parent[v];
        CHECK(p >= tree.sphere_begin(r - 1));
        CHECK(p < tree.sphere_end(r - 1));
        ++child_count[p];
      }
      for (std::int64_t p = tree.sphere_begin(r - 1); p < tree.sphere_end(r - 1); ++p)
        CHECK(child_count[p] == kappa(spec, r - 1));
    }
  }
}

TEST_CASE("normality heuristic") {
  CHECK(is_normal_prefix(validate_spec({1, 3, 7, 15}, {2, 2, 2, 2})).is_normal_prefix);
  NormalityVerdict bad = is_normal_prefix(validate_spec({1, 2, 3, 4}, {2, 4, 8, 16}));
  CHECK_FALSE(bad.is_normal_prefix);
  CHECK(bad.witness.find("gaps") != std::string::npos);
  CHECK(is_normal_prefix(validate_spec({1, 3, 7, 15}, {2, 4, 8, 16})).is_normal_prefix);
}

TEST_CASE("bounded_k preset follows doubling gaps") {
  TreeSpec spec = preset("bounded_k", {{"k0", 2}, {"levels", 5}});
  CHECK(spec.branch_positions == std::vector<std::int64_t>{1, 3, 7, 15, 31});
  CHECK(spec.branch_factors == std::vector<std::int64_t>{2, 2, 2, 2, 2});
  CHECK_THROWS_AS(preset("bounded_k", {}), Error);  // k0 required
}

TEST_CASE("unbounded_k preset gaps equal alpha_n^2") {
  TreeSpec spec = preset("unbounded_k", {{"levels", 5}});
  REQUIRE(spec.levels() == 5);
  std::int64_t alpha = 1;
  for (std::int64_t n = 1; n < spec.levels(); ++n) {
    CHECK(spec.branch_factors[n - 1] == n + 1);
    alpha *= n + 1;
    CHECK(spec.branch_positions[n] - spec.branch_positions[n - 1] == alpha * alpha);
  }
}

TEST_CASE("jl_beta preset matches the documented desk clamping") {
  TreeSpec spec = preset("jl_beta", {{"beta", 1.0}, {"cap", 1e6}, {"levels", 3}});
  CHECK(spec.branch_positions == std::vector<std::int64_t>{2, 16, 65536});
  CHECK(spec.branch_factors == std::vector<std::int64_t>{2, 16, 65536});
  CHECK(spec.label.find("clamped") != std::string::npos);

  TreeSpec quartic = preset("jl_beta", {{"beta", 4.0}, {"cap", 1024}, {"levels", 3}});
  CHECK(quartic.branch_positions == std::vector<std::int64_t>{2, 16, 1024});
  for (std::size_t i = 0; i < quartic.branch_factors.size(); ++i) {
    double expect = std::floor(std::pow(static_cast<double>(quartic.branch_positions[i]), 4.0));
    CHECK(static_cast<double>(quartic.branch_factors[i]) == expect);
  }
}

TEST_CASE("jl_beta_c uses the super-exponential exponent schedule") {
  TreeSpec spec = preset("jl_beta_c", {{"c", 0.5}, {"cap", 1e4}, {"levels", 2}});
  REQUIRE(spec.levels() >= 2);
  // beta_1 = c * 2^2 / 1 = 2, beta_2 = c * 27/4 = 3.375
  CHECK(spec.branch_factors[0] == static_cast<std::int64_t>(std::floor(std::pow(2.0, 2.0))));
  CHECK(spec.branch_factors[1] == static_cast<std::int64_t>(std::floor(std::pow(16.0, 3.375))));
  CHECK_THROWS_AS(preset("jl_beta_c", {{"c", 1.5}}), Error);
}

TEST_CASE("unknown preset errors") {
  CHECK_THROWS_WITH_AS(preset("nope", {}), doctest::Contains("UnknownPreset"), Error);
}

TEST_CASE("spec files parse per the key-value grammar") {
  SpecConfig c = parse_spec_text("# figure 1\nL = 1,5\nk = 2,2\ndepth = 9\n");
  CHECK(c.spec.branch_positions == std::vector<std::int64_t>{1, 5});
  CHECK(c.spec.branch_factors == std::vector<std::int64_t>{2, 2});
  REQUIRE(c.depth.has_value());
  CHECK(*c.depth == 9);

  SpecConfig p = parse_spec_text("preset = jl_beta\nbeta = 1.0\ncap = 1000000\nlevels=3\n");
  CHECK(p.spec.branch_positions == std::vector<std::int64_t>{2, 16, 65536});

  SpecConfig empty = parse_spec_text("depth = 5\n");
  CHECK(empty.spec.levels() == 0);
}

TEST_CASE("spec file errors") {
  CHECK_THROWS_AS(parse_spec_text("L = 1,5,\nk = 2,2,\n"), Error);   // trailing comma
  CHECK_THROWS_AS(parse_spec_text("bogus = 1\n"), Error);            // unknown key
  CHECK_THROWS_AS(parse_spec_text("L 1,5\n"), Error);                // missing '='
  CHECK_THROWS_AS(parse_spec_text("L = 1,5\nL = 2,6\nk = 2,2\n"), Error);  // duplicate
  CHECK_THROWS_AS(parse_spec_text("preset = jl_beta\nbeta = 1\nL = 1\nk = 2\n"), Error);
  CHECK_THROWS_AS(parse_spec_text("L = 1,x\nk = 2\n"), Error);
}
