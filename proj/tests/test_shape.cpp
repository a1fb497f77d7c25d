#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "infcat/shape.hpp"

using namespace infcat;

TEST_CASE("compose: identities and pointwise evaluation") {
  auto id2 = SimplexMap::identity(2);
  CHECK(compose(id2, id2) == id2);

  // <1> : [0]->[1] then d^0 : [1]->[2] picks vertex 2
  auto v1 = SimplexMap::vertex(1, 1);
  auto d0 = SimplexMap::coface(2, 0);
  auto c = compose(v1, d0);
  CHECK(c.source_rank == 0);
  CHECK(c.target_rank == 2);
  CHECK(c.values == std::vector<int>{2});

  // s^0 : [1]->[0] then <0> : [0]->[1] is the constant-0 map [1]->[1]
  auto s0 = SimplexMap::codegeneracy(0, 0);
  auto v0 = SimplexMap::vertex(1, 0);
  auto c2 = compose(s0, v0);
  CHECK(c2.values == std::vector<int>{0, 0});

  CHECK_THROWS_AS(compose(v0, v0), domain_error);
}

TEST_CASE("epi_mono_factor: examples") {
  auto id3 = SimplexMap::identity(3);
  auto [e, m] = epi_mono_factor(id3);
  CHECK(e == id3);
  CHECK(m == id3);

  auto c0 = SimplexMap::constant(2, 1, 0);
  auto [e2, m2] = epi_mono_factor(c0);
  CHECK(e2 == SimplexMap::constant(2, 0, 0));
  CHECK(m2 == SimplexMap::vertex(1, 0));

  auto f = SimplexMap(1, 2, {0, 2});
  auto [e3, m3] = epi_mono_factor(f);
  CHECK(e3 == SimplexMap::identity(1));
  CHECK(m3 == f);
}

TEST_CASE("monotone composition is associative, ranks <= 4 (exhaustive)") {
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int cdim = 0; cdim <= 4; ++cdim)
        for (int d = 0; d <= 4; ++d) {
          auto fs = all_monotone(a, b);
          auto gs = all_monotone(b, cdim);
          auto hs = all_monotone(cdim, d);
          for (const auto& f : fs)
            for (const auto& g : gs) {
              auto gf = compose(f, g);
              for (const auto& h : hs) {
                CHECK(compose(gf, h) == compose(f, compose(g, h)));
              }
            }
        }
}

TEST_CASE("epi_mono_factor recomposes to the input, ranks <= 4 (exhaustive)") {
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (const auto& f : all_monotone(a, b)) {
        auto [e, m] = epi_mono_factor(f);
        CHECK(e.is_epi());
        CHECK(m.is_mono());
        CHECK(compose(e, m) == f);
      }
}

TEST_CASE("index shapes and multi-indices") {
  auto s1 = IndexShape::n1();
  CHECK(s1.arity() == 2);
  CHECK(s1.outer_factor() == 0);
  CHECK(s1.theta_shape().factors == std::vector<FactorKind>{FactorKind::InnerDelta});

  auto s2 = IndexShape::n2();
  CHECK(s2.arity() == 3);

  MultiIndex I({2, 1});
  CHECK(I.str() == "(2,1)");
  CHECK(MultiIndex::parse("(2,1)") == I);
  CHECK(I.within({3, 1}));
  CHECK(!I.within({1, 1}));
  CHECK(I.shifted(0, -1) == MultiIndex({1, 1}));
}

TEST_CASE("all_monotone counts") {
  // |[a] -> [b]| = C(a+b+1, a+1)
  CHECK(all_monotone(0, 0).size() == 1);
  CHECK(all_monotone(1, 1).size() == 3);
  CHECK(all_monotone(2, 1).size() == 4);
  CHECK(all_monotone(1, 2).size() == 6);
  CHECK(all_monotone(4, 4).size() == 126);
}
