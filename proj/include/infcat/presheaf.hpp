#ifndef INFCAT_PRESHEAF_HPP
#define INFCAT_PRESHEAF_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infcat/shape.hpp"

namespace infcat {

class FinitePresheaf;
using PSh = std::shared_ptr<const FinitePresheaf>;

struct CellRef {
  MultiIndex idx;
  int cell = 0;
  auto operator<=>(const CellRef&) const = default;
};

// Eilenberg-Zilber normal form: cell = core acted on by a multi-epi.
struct CellNormalForm {
  CellRef core;      // jointly nondegenerate
  MultiMap epi_word; // idx -> core.idx, each part epi
};

// A finite truncated presheaf over an IndexShape.  Levels are stored
// explicitly for every multi-index within `cap`; actions are tabulated on the
// face/degeneracy generators of each factor.  `complete` records that the
// underlying (untruncated) object has no jointly-nondegenerate cell outside
// the stored levels, so higher levels are determined by degeneracies.
class FinitePresheaf {
 public:
  IndexShape shape;
  std::vector<int> cap;
  bool complete = false;

  FinitePresheaf() = default;
  FinitePresheaf(IndexShape s, std::vector<int> c);

  // --- structure access -------------------------------------------------
  const std::vector<std::string>& cells(const MultiIndex& I) const;
  int cell_count(const MultiIndex& I) const { return static_cast<int>(cells(I).size()); }
  int cell_index(const MultiIndex& I, const std::string& name) const;
  const std::string& cell_name(const CellRef& c) const;
  std::vector<MultiIndex> indices() const;

  int face(const MultiIndex& I, size_t f, int i, int cell) const;
  int degen(const MultiIndex& I, size_t f, int i, int cell) const;
  // Contravariant action of u : I' -> I, mapping cells at I to cells at I'.
  CellRef act(const MultiMap& u, const CellRef& z) const;

  bool is_degenerate_via(const CellRef& z, size_t f, int i) const;
  bool is_degenerate(const CellRef& z) const;
  CellNormalForm normal_form(const CellRef& z) const;
  std::vector<CellRef> nondegenerate_cells() const;  // by (total dim, index, cell)
  std::vector<CellRef> all_cells() const;

  // Per-factor maximum coordinate over jointly nondegenerate cells.
  std::vector<int> support() const;
  bool empty() const;
  long long total_cells() const;

  // --- construction helpers (used by the operation modules) --------------
  void ensure_level(const MultiIndex& I);
  int add_cell(const MultiIndex& I, const std::string& name);
  void set_face(const MultiIndex& I, size_t f, int i, std::vector<int> table);
  void set_degen(const MultiIndex& I, size_t f, int i, std::vector<int> table);
  void validate() const;  // simplicial identities + table shape, throws

  // Fill all degeneracy/face tables from a callback giving generator actions.
  // (Most builders fill tables directly; this is for simple cases.)

  // --- derived objects ----------------------------------------------------
  // Copy with cells renamed to construction order ("0","1",...) per level.
  FinitePresheaf canonicalized() const;
  // Copy truncated to a smaller cap.
  FinitePresheaf restricted(const std::vector<int>& new_cap) const;
  // Degeneracy-determined extension to a larger cap (requires complete).
  FinitePresheaf extended(const std::vector<int>& new_cap) const;
  // Reverse the outer simplicial direction.
  FinitePresheaf reversed_outer() const;

  bool same_data(const FinitePresheaf& other) const;

 private:
  struct ActionKey {
    MultiIndex idx;
    int factor;
    int i;
    auto operator<=>(const ActionKey&) const = default;
  };
  std::map<MultiIndex, std::vector<std::string>> levels_;
  std::map<MultiIndex, std::map<std::string, int>> index_;
  std::map<ActionKey, std::vector<int>> faces_;
  std::map<ActionKey, std::vector<int>> degens_;

  friend class PresheafBuilder;
};

PSh share(FinitePresheaf p);

// A map of presheaves: levelwise functions commuting with the actions.
// Components are stored for every index within min(source cap, target cap).
class PresheafMap {
 public:
  PSh source, target;
  std::map<MultiIndex, std::vector<int>> components;

  PresheafMap() = default;
  PresheafMap(PSh src, PSh dst);

  int operator()(const MultiIndex& I, int cell) const;
  CellRef apply(const CellRef& z) const;
  void set(const MultiIndex& I, std::vector<int> comp);

  static PresheafMap identity(PSh X);
  bool is_mono() const;
  bool is_epi() const;
  bool is_iso() const;
  void validate() const;  // commutation with generators, throws
  bool commutes() const;  // same check, no throw
  std::vector<int> common_cap() const;
};

PresheafMap compose(const PresheafMap& f, const PresheafMap& g);
bool same_map(const PresheafMap& f, const PresheafMap& g);

// --- basic objects --------------------------------------------------------

// Representable at the given coords, truncated at `cap` (defaults to
// coords + 1 headroom in every factor so degeneracy structure is visible).
FinitePresheaf representable(const IndexShape& shape, const MultiIndex& coords,
                             std::vector<int> cap = {});
// Boundary of the representable in the outer direction.
FinitePresheaf boundary_representable(const IndexShape& shape, const MultiIndex& coords,
                                      std::vector<int> cap = {});
FinitePresheaf empty_presheaf(const IndexShape& shape, std::vector<int> cap);
FinitePresheaf terminal_presheaf(const IndexShape& shape, std::vector<int> cap);

// Nerve of a finite poset, constant outside the outer direction.
// Elements are 0..n-1; leq(a,b) must be reflexive/transitive/antisymmetric.
FinitePresheaf poset_nerve(const IndexShape& shape, int n,
                           const std::vector<std::vector<bool>>& leq, std::vector<int> cap = {});

// Deterministic name of a representable cell (used by representable()).
std::string multimap_cell_name(const MultiMap& m);

// A presheaf refitted to prescribed caps, with the translation data back to
// the original: extension in factors where caps grow (requires complete),
// truncation where they shrink.
struct Extension {
  PSh object;
  PSh original;
  std::map<CellRef, CellNormalForm> dict;  // object cell -> core in ORIGINAL + epi
  PresheafMap include;                     // original -> object, within shared caps
  CellRef transport(const CellRef& orig_cell) const;  // original cell -> object cell
};
Extension fit_presheaf(PSh X, const std::vector<int>& caps);
// Transport a map along fitted source and target.
PresheafMap fit_map(const PresheafMap& f, const Extension& src, const Extension& dst);

// pi_0: set of connected components (cell class per 0-index cell).
int component_count(const FinitePresheaf& X);
bool is_connected(const FinitePresheaf& X);

// The discretization L: pushout X cup_{c X_0} c(pi_0 X_0); result has
// discrete level 0 in the outer direction.
FinitePresheaf discretize_L(const FinitePresheaf& X);

// Theta-direction restriction at outer rank 0 (shape loses the outer factor).
FinitePresheaf outer_zero_part(const FinitePresheaf& X);
// Embed a theta-shape object as a constant-outer object of the full shape.
FinitePresheaf const_outer_embed(const FinitePresheaf& Y, const IndexShape& full_shape, int outer_cap);

}  // namespace infcat

#endif
