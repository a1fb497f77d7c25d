#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "infcat/limits.hpp"
#include "infcat/presheaf.hpp"

using namespace infcat;

namespace {

const IndexShape S1 = IndexShape::n1();

PSh F(int m, std::vector<int> cap = {}) {
  return share(representable(S1, MultiIndex({m, 0}), std::move(cap)));
}

int nondeg_at_outer(const FinitePresheaf& X, int m) {
  int n = 0;
  for (const CellRef& z : X.nondegenerate_cells())
    if (z.idx[0] == m) ++n;
  return n;
}

// The degenerate image of a 0-cell at an arbitrary level.
CellRef degenerate_at(const FinitePresheaf& X, int vertex, const MultiIndex& I) {
  MultiMap u;
  for (int r : I.coords) u.parts.push_back(SimplexMap::constant(r, 0, 0));
  return X.act(u, CellRef{MultiIndex::zero(X.shape), vertex});
}

// Constant map X -> pt.
PresheafMap to_terminal(PSh X, PSh T) {
  PresheafMap m(X, T);
  for (const MultiIndex& I : X->indices())
    m.set(I, std::vector<int>(static_cast<size_t>(X->cell_count(I)), 0));
  return m;
}

// Map pt -> X picking a 0-cell.
PresheafMap from_point(PSh P, PSh X, int vertex) {
  PresheafMap m(P, X);
  for (const MultiIndex& I : P->indices()) m.set(I, {degenerate_at(*X, vertex, I).cell});
  return m;
}

PresheafMap empty_to(PSh E, PSh X) {
  PresheafMap m(E, X);
  for (const MultiIndex& I : E->indices()) m.set(I, {});
  return m;
}

}  // namespace

TEST_CASE("representables: cell counts and validation") {
  auto F1 = F(1);
  F1->validate();
  CHECK(F1->cell_count(MultiIndex({0, 0})) == 2);
  CHECK(nondeg_at_outer(*F1, 1) == 1);

  auto F0 = F(0, {2, 2});
  F0->validate();
  for (const MultiIndex& I : F0->indices()) {
    CHECK(F0->cell_count(I) == 1);
    if (I.total() > 0) CHECK(F0->is_degenerate(CellRef{I, 0}));
  }

  auto F2 = F(2, {3, 1});
  F2->validate();
  CHECK(nondeg_at_outer(*F2, 0) == 3);
  CHECK(nondeg_at_outer(*F2, 1) == 3);
  CHECK(nondeg_at_outer(*F2, 2) == 1);
  CHECK(nondeg_at_outer(*F2, 3) == 0);
}

TEST_CASE("representables at n=2") {
  auto S2 = IndexShape::n2();
  auto R = representable(S2, MultiIndex({1, 1, 0}));
  R.validate();
  CHECK(R.cell_count(MultiIndex({0, 0, 0})) == 4);
  CHECK(R.complete);
}

TEST_CASE("Eilenberg-Zilber: unique normal form and counting") {
  auto F2 = F(2, {3, 2});
  auto nd = F2->nondegenerate_cells();
  for (const MultiIndex& I : F2->indices()) {
    long long expect = 0;
    for (const CellRef& z : nd) {
      long long ways = 1;
      for (size_t f = 0; f < 2 && ways; ++f) {
        if (z.idx[f] > I[f]) {
          ways = 0;
          break;
        }
        long long cnt = 0;
        for (const auto& u : all_monotone(I[f], z.idx[f]))
          if (u.is_epi()) ++cnt;
        ways *= cnt;
      }
      expect += ways;
    }
    CHECK(expect == F2->cell_count(I));
  }
  for (const MultiIndex& I : F2->indices())
    for (int c = 0; c < F2->cell_count(I); ++c) {
      auto nf = F2->normal_form(CellRef{I, c});
      CHECK(!F2->is_degenerate(nf.core));
      CHECK(F2->act(nf.epi_word, nf.core) == CellRef{I, c});
    }
}

TEST_CASE("extension of complete presheaves agrees with the representable") {
  auto small = representable(S1, MultiIndex({2, 0}), {2, 0});
  auto ext = small.extended({4, 1});
  ext.validate();
  auto big = F(2, {4, 1});
  for (const MultiIndex& I : big->indices()) CHECK(ext.cell_count(I) == big->cell_count(I));
  CHECK(is_isomorphic(share(ext), big).has_value());
}

TEST_CASE("boundary of F[2] and connectivity") {
  auto B = boundary_representable(S1, MultiIndex({2, 0}));
  B.validate();
  CHECK(nondeg_at_outer(B, 0) == 3);
  CHECK(nondeg_at_outer(B, 1) == 3);
  CHECK(nondeg_at_outer(B, 2) == 0);
  CHECK(is_connected(B));
  CHECK(is_connected(*F(3)));

  auto two = coproduct(F(0), F(0));
  CHECK(component_count(*two.object) == 2);
  CHECK(!is_connected(*two.object));
}

TEST_CASE("poset nerve of a chain is a representable") {
  std::vector<std::vector<bool>> leq = {{true, true}, {false, true}};
  auto N = poset_nerve(S1, 2, leq, {2, 1});
  N.validate();
  CHECK(is_isomorphic(share(N), F(1, {2, 1})).has_value());
}

TEST_CASE("pushout: disjoint union for empty apex") {
  auto A = F(1);
  auto B = F(2, A->cap);
  auto E = share(empty_presheaf(S1, A->cap));
  auto P = pushout(Span{empty_to(E, A), empty_to(E, B)});
  auto C = coproduct(A, B);
  for (const MultiIndex& I : P.object->indices())
    CHECK(P.object->cell_count(I) == C.object->cell_count(I));
  CHECK(P.left_leg.is_mono());
  CHECK(P.right_leg.is_mono());
}

TEST_CASE("pushout: collapsing both endpoints of F[1] gives a circle-like object") {
  auto A = F(1, {2, 0});
  auto pt = F(0, {2, 0});
  auto two = coproduct(pt, pt);
  PresheafMap f(two.object, A);
  PresheafMap g(two.object, pt);
  for (const MultiIndex& I : two.object->indices()) {
    f.set(I, {degenerate_at(*A, 0, I).cell, degenerate_at(*A, 1, I).cell});
    g.set(I, {0, 0});
  }
  f.validate();
  g.validate();
  auto P = pushout(Span{f, g});
  P.object->validate();
  CHECK(P.object->cell_count(MultiIndex({0, 0})) == 1);
  int nd1 = 0;
  for (const CellRef& z : P.object->nondegenerate_cells())
    if (z.idx == MultiIndex({1, 0})) ++nd1;
  CHECK(nd1 == 1);
}

TEST_CASE("pullback: terminal base gives the product, identity cospan gives Z") {
  auto A = F(1);
  auto B = F(1);
  auto T = share(terminal_presheaf(S1, A->cap));
  auto PB = pullback(Cospan{to_terminal(A, T), to_terminal(B, T)});
  auto PR = product(A, B);
  for (const MultiIndex& I : PB.object->indices())
    CHECK(PB.object->cell_count(I) == PR.object->cell_count(I));

  auto Z = F(2);
  auto idz = PresheafMap::identity(Z);
  auto PB2 = pullback(Cospan{idz, idz});
  CHECK(is_isomorphic(PB2.object, Z).has_value());
}

TEST_CASE("pushout and pullback universal properties (exhaustive mediators)") {
  auto A = F(1, {1, 0});
  auto pt = F(0, {1, 0});
  PresheafMap f = from_point(pt, A, 0);
  PresheafMap g = PresheafMap::identity(pt);
  auto P = pushout(Span{f, g});

  auto Q = F(1, {1, 0});
  auto qas = enumerate_maps(A, Q);
  auto qbs = enumerate_maps(pt, Q);
  auto palls = enumerate_maps(P.object, Q);
  int checked = 0;
  for (const auto& qa : qas)
    for (const auto& qb : qbs) {
      if (!same_map(compose(f, qa), compose(g, qb))) continue;
      ++checked;
      auto med = P.mediate(qa, qb);
      CHECK(med.commutes());
      CHECK(same_map(compose(P.left_leg, med), qa));
      CHECK(same_map(compose(P.right_leg, med), qb));
      int count = 0;
      for (const auto& h : palls)
        if (same_map(compose(P.left_leg, h), qa) && same_map(compose(P.right_leg, h), qb)) ++count;
      CHECK(count == 1);
    }
  CHECK(checked > 0);

  auto Z = F(1, {1, 0});
  auto idz = PresheafMap::identity(Z);
  auto PB = pullback(Cospan{idz, idz});
  for (const auto& qa : enumerate_maps(pt, Z)) {
    auto med = PB.mediate(qa, qa);
    CHECK(med.commutes());
    CHECK(same_map(compose(med, PB.left_leg), qa));
    int count = 0;
    for (const auto& h : enumerate_maps(pt, PB.object))
      if (same_map(compose(h, PB.left_leg), qa) && same_map(compose(h, PB.right_leg), qa)) ++count;
    CHECK(count == 1);
  }
}

TEST_CASE("exponentials: unit exponent, terminal target, N[1]^N[1]") {
  auto Z = F(1, {2, 1});
  auto E = exponential(Z, F(0, {2, 1}), {2, 1});
  CHECK(is_isomorphic(E, Z).has_value());

  auto T = share(terminal_presheaf(S1, {2, 1}));
  auto E2 = exponential(T, F(1, {2, 1}), {2, 1});
  CHECK(is_isomorphic(E2, T).has_value());

  auto E3 = exponential(Z, Z, {1, 1});
  CHECK(E3->cell_count(MultiIndex({0, 0})) == 3);
}

TEST_CASE("exponential adjunction Hom(B, Z^A) = Hom(B x A, Z) on small instances") {
  std::vector<PSh> objs = {F(0, {2, 1}), F(1, {2, 1}),
                           share(boundary_representable(S1, MultiIndex({2, 0}), {2, 1}))};
  for (const PSh& A : objs)
    for (const PSh& B : objs)
      for (const PSh& Z : objs) {
        auto ZA = exponential(Z, A, {2, 1});
        auto lhs = enumerate_maps(B, ZA).size();
        auto BA = product(B, A);
        PSh Zx = share(Z->extended({4, 2}));
        auto rhs = enumerate_maps(BA.object, Zx).size();
        CHECK(lhs == rhs);
      }
}

TEST_CASE("is_isomorphic basics") {
  auto A = F(2);
  CHECK(is_isomorphic(A, A).has_value());
  CHECK(!is_isomorphic(F(1), F(0)).has_value());
  auto B = share(boundary_representable(S1, MultiIndex({2, 0})));
  CHECK(!is_isomorphic(A, B).has_value());
  CHECK(!is_isomorphic(B, A).has_value());
}

TEST_CASE("discretize_L: unit on discrete-level-0 objects, collapses F[0,X]") {
  auto Fm = F(2);
  auto L1 = discretize_L(*Fm);
  for (const MultiIndex& I : Fm->indices()) CHECK(L1.cell_count(I) == Fm->cell_count(I));

  auto X = representable(S1, MultiIndex({0, 1}));
  auto LX = discretize_L(X);
  CHECK(is_isomorphic(share(LX), share(terminal_presheaf(S1, LX.cap))).has_value());
}

TEST_CASE("outer_zero_part and const_outer_embed round-trip") {
  auto X = representable(S1, MultiIndex({0, 1}));
  auto Y = outer_zero_part(X);
  CHECK(Y.shape.arity() == 1);
  CHECK(Y.cell_count(MultiIndex({1})) == 3);
  auto Z = const_outer_embed(Y, S1, 2);
  Z.validate();
  CHECK(Z.cell_count(MultiIndex({2, 1})) == 3);
}

TEST_CASE("reversed_outer is an involution and stays valid") {
  auto B = boundary_representable(S1, MultiIndex({2, 0}));
  auto R = B.reversed_outer();
  R.validate();
  CHECK(R.reversed_outer().same_data(B));
}
