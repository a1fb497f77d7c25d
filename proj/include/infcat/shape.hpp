#ifndef INFCAT_SHAPE_HPP
#define INFCAT_SHAPE_HPP

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "infcat/budget.hpp"

namespace infcat {

// A morphism [source_rank] -> [target_rank] of the simplex category:
// a weakly monotone map on vertices.
struct SimplexMap {
  int source_rank = 0;
  int target_rank = 0;
  std::vector<int> values;  // length source_rank+1, entries in [0, target_rank]

  SimplexMap() : values{0} {}
  SimplexMap(int src, int dst, std::vector<int> vals);

  static SimplexMap identity(int rank);
  // Coface d^i : [rank-1] -> [rank], skipping i.
  static SimplexMap coface(int rank, int i);
  // Codegeneracy s^i : [rank+1] -> [rank], repeating i.
  static SimplexMap codegeneracy(int rank, int i);
  // <v> : [0] -> [rank] picking the vertex v.
  static SimplexMap vertex(int rank, int v);
  static SimplexMap constant(int src, int dst, int v);

  int operator()(int i) const { return values[static_cast<size_t>(i)]; }
  bool is_identity() const;
  bool is_mono() const;
  bool is_epi() const;

  auto operator<=>(const SimplexMap&) const = default;
  std::string str() const;
};

// Pointwise composite g . f (first f, then g).
SimplexMap compose(const SimplexMap& f, const SimplexMap& g);

// Unique factorization f = mono . epi.
std::pair<SimplexMap, SimplexMap> epi_mono_factor(const SimplexMap& f);

enum class FactorKind { OuterDelta, ThetaZero, ThetaOneDelta, InnerDelta };

const char* factor_kind_name(FactorKind k);
FactorKind factor_kind_from_name(const std::string& name);

// The index category: an ordered product of simplex-like factors.  n=1 is
// [OuterDelta, InnerDelta], n=2 is [OuterDelta, ThetaOneDelta, InnerDelta].
struct IndexShape {
  std::vector<FactorKind> factors;

  static IndexShape n1() { return IndexShape{{FactorKind::OuterDelta, FactorKind::InnerDelta}}; }
  static IndexShape n2() {
    return IndexShape{{FactorKind::OuterDelta, FactorKind::ThetaOneDelta, FactorKind::InnerDelta}};
  }

  size_t arity() const { return factors.size(); }
  int outer_factor() const;  // position of the OuterDelta factor; -1 if absent
  // Shape of Theta-direction objects: this shape with the outer factor removed.
  IndexShape theta_shape() const;

  auto operator<=>(const IndexShape&) const = default;
  std::string str() const;
};

// One rank per factor of the owning shape.
struct MultiIndex {
  std::vector<int> coords;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> c) : coords(std::move(c)) {}
  static MultiIndex zero(const IndexShape& shape) {
    return MultiIndex(std::vector<int>(shape.arity(), 0));
  }

  int operator[](size_t f) const { return coords[f]; }
  int& operator[](size_t f) { return coords[f]; }
  size_t size() const { return coords.size(); }
  int total() const;

  MultiIndex shifted(size_t f, int delta) const;
  bool within(const std::vector<int>& cap) const;

  auto operator<=>(const MultiIndex&) const = default;
  std::string str() const;  // "(m,k)" / "(m,t,k)"
  static MultiIndex parse(const std::string& s);
};

// A morphism of the index category: one SimplexMap per factor.
struct MultiMap {
  std::vector<SimplexMap> parts;

  MultiIndex source() const;
  MultiIndex target() const;
  static MultiMap identity(const MultiIndex& at);
  static MultiMap generator_coface(const MultiIndex& at, size_t f, int i);
  static MultiMap generator_codegeneracy(const MultiIndex& at, size_t f, int i);
  auto operator<=>(const MultiMap&) const = default;
};

MultiMap compose(const MultiMap& f, const MultiMap& g);

// All monotone maps [src] -> [dst].
std::vector<SimplexMap> all_monotone(int src, int dst);
// All multimaps between two indices of the same arity.
std::vector<MultiMap> all_multimaps(const MultiIndex& src, const MultiIndex& dst);

}  // namespace infcat

#endif
