#ifndef INFCAT_LIMITS_HPP
#define INFCAT_LIMITS_HPP

#include <functional>
#include <optional>

#include "infcat/presheaf.hpp"

namespace infcat {

struct Span {
  PresheafMap left;   // C -> A
  PresheafMap right;  // C -> B
};

struct Cospan {
  PresheafMap left;   // A -> Z
  PresheafMap right;  // B -> Z
};

struct PushoutResult {
  PSh object;
  PresheafMap left_leg;   // A -> P
  PresheafMap right_leg;  // B -> P
  std::map<MultiIndex, std::vector<std::pair<int, int>>> reps_;  // class -> (side, cell)
  // Mediating map for a cocone (qa : A -> Q, qb : B -> Q) with qa.f = qb.g.
  PresheafMap mediate(const PresheafMap& qa, const PresheafMap& qb) const;
};

struct PullbackResult {
  PSh object;
  PresheafMap left_leg;   // P -> A
  PresheafMap right_leg;  // P -> B
  std::map<MultiIndex, std::vector<std::pair<int, int>>> pairs_;  // cell -> (a, b)
  PresheafMap mediate(const PresheafMap& qa, const PresheafMap& qb) const;
};

struct CoproductResult {
  PSh object;
  PresheafMap left_leg, right_leg;
};

struct ProductResult {
  PSh object;
  PresheafMap left_leg, right_leg;  // projections
  PresheafMap pair(const PresheafMap& qa, const PresheafMap& qb) const;
  int pair_cell(const MultiIndex& I, int a, int b) const;
};

CoproductResult coproduct(PSh A, PSh B);
ProductResult product(PSh A, PSh B);
PushoutResult pushout(const Span& span);
PullbackResult pullback(const Cospan& cospan);

// Induced map on products from f : A -> A' and g : B -> B'.
PresheafMap product_map(const ProductResult& src, const ProductResult& dst,
                        const PresheafMap& f, const PresheafMap& g);

// Pinned-cell constraint for map enumeration.
struct MapPin {
  CellRef at;
  CellRef to;
};

// Enumerate all presheaf maps X -> Z within X's cap (Z must cover it).
std::vector<PresheafMap> enumerate_maps(PSh X, PSh Z, const std::vector<MapPin>& pins = {},
                                        Budget* budget = nullptr, size_t max_results = SIZE_MAX);

// Z^A truncated at cap: cells at index I are maps A x F[I] -> Z.
struct ExponentialResult {
  PSh object;
  std::map<MultiIndex, ProductResult> domains;  // per level I: A_ext x F[I]
  std::map<MultiIndex, PSh> exponents;          // per level I: F[I]
  std::map<CellRef, PresheafMap> maps;          // cell -> underlying map
};
ExponentialResult exponential_full(PSh Z, PSh A, const std::vector<int>& cap, Budget* budget = nullptr);
PSh exponential(PSh Z, PSh A, const std::vector<int>& cap, Budget* budget = nullptr);

// Backtracking isomorphism search over nondegenerate cells.
std::optional<PresheafMap> is_isomorphic(PSh A, PSh B, Budget* budget = nullptr);

}  // namespace infcat

#endif
