#include "infcat/presheaf.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace infcat {

namespace {

// Union-find with deterministic canonical representatives.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);  // keep the smaller id as root
    parent[static_cast<size_t>(a)] = b;
  }
};

std::vector<MultiIndex> indices_within(size_t arity, const std::vector<int>& cap) {
  std::vector<MultiIndex> out;
  MultiIndex cur(std::vector<int>(arity, 0));
  while (true) {
    out.push_back(cur);
    size_t f = arity;
    while (f > 0 && cur[f - 1] == cap[f - 1]) --f;
    if (f == 0) break;
    ++cur[f - 1];
    for (size_t g = f; g < arity; ++g) cur[g] = 0;
  }
  return out;
}

}  // namespace

FinitePresheaf::FinitePresheaf(IndexShape s, std::vector<int> c) : shape(std::move(s)), cap(std::move(c)) {
  if (cap.size() != shape.arity()) throw domain_error("FinitePresheaf: cap arity mismatch");
  for (size_t f = 0; f < shape.arity(); ++f) {
    if (cap[f] < 0) throw domain_error("FinitePresheaf: negative cap");
    if (shape.factors[f] == FactorKind::ThetaZero && cap[f] != 0)
      throw domain_error("FinitePresheaf: ThetaZero factor must have cap 0");
  }
  for (const MultiIndex& I : indices_within(shape.arity(), cap)) levels_[I];
}

const std::vector<std::string>& FinitePresheaf::cells(const MultiIndex& I) const {
  auto it = levels_.find(I);
  if (it == levels_.end()) throw domain_error("cells: index " + I.str() + " outside cap");
  return it->second;
}

int FinitePresheaf::cell_index(const MultiIndex& I, const std::string& name) const {
  auto it = index_.find(I);
  if (it == index_.end()) throw domain_error("cell_index: index outside cap");
  auto jt = it->second.find(name);
  if (jt == it->second.end()) throw domain_error("cell_index: no cell '" + name + "' at " + I.str());
  return jt->second;
}

const std::string& FinitePresheaf::cell_name(const CellRef& c) const { return cells(c.idx)[static_cast<size_t>(c.cell)]; }

std::vector<MultiIndex> FinitePresheaf::indices() const {
  std::vector<MultiIndex> out;
  out.reserve(levels_.size());
  for (const auto& [I, _] : levels_) out.push_back(I);
  return out;
}

int FinitePresheaf::face(const MultiIndex& I, size_t f, int i, int cell) const {
  auto it = faces_.find(ActionKey{I, static_cast<int>(f), i});
  if (it == faces_.end()) throw domain_error("face: missing table at " + I.str());
  return it->second[static_cast<size_t>(cell)];
}

int FinitePresheaf::degen(const MultiIndex& I, size_t f, int i, int cell) const {
  auto it = degens_.find(ActionKey{I, static_cast<int>(f), i});
  if (it == degens_.end()) throw domain_error("degen: missing table at " + I.str());
  return it->second[static_cast<size_t>(cell)];
}

CellRef FinitePresheaf::act(const MultiMap& u, const CellRef& z) const {
  if (u.target() != z.idx) throw domain_error("act: map target does not match cell index");
  CellRef cur = z;
  for (size_t f = 0; f < u.parts.size(); ++f) {
    auto [epi, mono] = epi_mono_factor(u.parts[f]);
    // Faces first (mono part), largest skipped value first.
    std::vector<int> skips;
    {
      std::vector<bool> hit(static_cast<size_t>(mono.target_rank) + 1, false);
      for (int v : mono.values) hit[static_cast<size_t>(v)] = true;
      for (int v = mono.target_rank; v >= 0; --v)
        if (!hit[static_cast<size_t>(v)]) skips.push_back(v);
    }
    for (int s : skips) {
      cur.cell = face(cur.idx, f, s, cur.cell);
      cur.idx = cur.idx.shifted(f, -1);
    }
    // Then degeneracies (epi part), lowest duplicate first.
    std::vector<int> dups;
    for (int j = 0; j < epi.source_rank; ++j)
      if (epi.values[static_cast<size_t>(j)] == epi.values[static_cast<size_t>(j) + 1]) dups.push_back(j);
    for (int j : dups) {
      cur.cell = degen(cur.idx, f, j, cur.cell);
      cur.idx = cur.idx.shifted(f, +1);
    }
  }
  return cur;
}

bool FinitePresheaf::is_degenerate_via(const CellRef& z, size_t f, int i) const {
  if (z.idx[f] < 1) return false;
  int y = face(z.idx, f, i, z.cell);
  MultiIndex lower = z.idx.shifted(f, -1);
  return degen(lower, f, i, y) == z.cell;
}

bool FinitePresheaf::is_degenerate(const CellRef& z) const {
  for (size_t f = 0; f < shape.arity(); ++f)
    for (int i = 0; i < z.idx[f]; ++i)
      if (is_degenerate_via(z, f, i)) return true;
  return false;
}

CellNormalForm FinitePresheaf::normal_form(const CellRef& z) const {
  // Peel degeneracies one at a time; invariant: z = X(epi_word)(cur).
  CellRef cur = z;
  MultiMap epi_word = MultiMap::identity(z.idx);
  bool again = true;
  while (again) {
    again = false;
    for (size_t f = 0; f < shape.arity() && !again; ++f) {
      for (int i = 0; i < cur.idx[f] && !again; ++i) {
        if (is_degenerate_via(cur, f, i)) {
          int y = face(cur.idx, f, i, cur.cell);
          MultiIndex lower = cur.idx.shifted(f, -1);
          MultiMap step = MultiMap::identity(cur.idx);
          step.parts[f] = SimplexMap::codegeneracy(lower[f], i);  // cur.idx -> lower
          epi_word = compose(epi_word, step);
          cur = CellRef{lower, y};
          again = true;
        }
      }
    }
  }
  return CellNormalForm{cur, epi_word};
}

std::vector<CellRef> FinitePresheaf::nondegenerate_cells() const {
  std::vector<CellRef> out;
  for (const auto& [I, lvl] : levels_)
    for (int c = 0; c < static_cast<int>(lvl.size()); ++c) {
      CellRef z{I, c};
      if (!is_degenerate(z)) out.push_back(z);
    }
  std::stable_sort(out.begin(), out.end(), [](const CellRef& a, const CellRef& b) {
    if (a.idx.total() != b.idx.total()) return a.idx.total() < b.idx.total();
    return a < b;
  });
  return out;
}

std::vector<CellRef> FinitePresheaf::all_cells() const {
  std::vector<CellRef> out;
  for (const auto& [I, lvl] : levels_)
    for (int c = 0; c < static_cast<int>(lvl.size()); ++c) out.push_back(CellRef{I, c});
  return out;
}

std::vector<int> FinitePresheaf::support() const {
  std::vector<int> s(shape.arity(), 0);
  for (const CellRef& z : nondegenerate_cells())
    for (size_t f = 0; f < shape.arity(); ++f) s[f] = std::max(s[f], z.idx[f]);
  return s;
}

bool FinitePresheaf::empty() const {
  for (const auto& [I, lvl] : levels_)
    if (!lvl.empty()) return false;
  return true;
}

long long FinitePresheaf::total_cells() const {
  long long n = 0;
  for (const auto& [I, lvl] : levels_) n += static_cast<long long>(lvl.size());
  return n;
}

void FinitePresheaf::ensure_level(const MultiIndex& I) {
  if (!I.within(cap)) throw domain_error("ensure_level: index outside cap");
  levels_[I];
}

int FinitePresheaf::add_cell(const MultiIndex& I, const std::string& name) {
  ensure_level(I);
  auto& idx = index_[I];
  if (idx.count(name)) throw domain_error("add_cell: duplicate cell name '" + name + "' at " + I.str());
  int id = static_cast<int>(levels_[I].size());
  levels_[I].push_back(name);
  idx[name] = id;
  return id;
}

void FinitePresheaf::set_face(const MultiIndex& I, size_t f, int i, std::vector<int> table) {
  faces_[ActionKey{I, static_cast<int>(f), i}] = std::move(table);
}

void FinitePresheaf::set_degen(const MultiIndex& I, size_t f, int i, std::vector<int> table) {
  degens_[ActionKey{I, static_cast<int>(f), i}] = std::move(table);
}

void FinitePresheaf::validate() const {
  auto in_range = [](const std::vector<int>& t, size_t n) {
    for (int v : t)
      if (v < 0 || v >= static_cast<int>(n)) return false;
    return true;
  };
  for (const auto& [I, lvl] : levels_) {
    for (size_t f = 0; f < shape.arity(); ++f) {
      if (I[f] >= 1) {
        for (int i = 0; i <= I[f]; ++i) {
          auto it = faces_.find(ActionKey{I, static_cast<int>(f), i});
          if (it == faces_.end() || it->second.size() != lvl.size())
            throw domain_error("validate: missing/mis-sized face table at " + I.str());
          if (!in_range(it->second, cells(I.shifted(f, -1)).size()))
            throw domain_error("validate: face table out of range at " + I.str());
        }
      }
      if (I[f] + 1 <= cap[f]) {
        for (int i = 0; i <= I[f]; ++i) {
          auto it = degens_.find(ActionKey{I, static_cast<int>(f), i});
          if (it == degens_.end() || it->second.size() != lvl.size())
            throw domain_error("validate: missing/mis-sized degeneracy table at " + I.str());
          if (!in_range(it->second, cells(I.shifted(f, +1)).size()))
            throw domain_error("validate: degeneracy table out of range at " + I.str());
        }
      }
    }
  }
  // Simplicial identities per factor, and cross-factor commutation, checked
  // cellwise within cap.
  for (const auto& [I, lvl] : levels_) {
    int n = static_cast<int>(lvl.size());
    for (size_t f = 0; f < shape.arity(); ++f) {
      int r = I[f];
      for (int c = 0; c < n; ++c) {
        // d_i d_j = d_{j-1} d_i (i < j)
        if (r >= 2)
          for (int j = 1; j <= r; ++j)
            for (int i = 0; i < j; ++i) {
              int a = face(I.shifted(f, -1), f, i, face(I, f, j, c));
              int b = face(I.shifted(f, -1), f, j - 1, face(I, f, i, c));
              if (a != b) throw domain_error("validate: d_i d_j identity fails at " + I.str());
            }
        // s_i s_j = s_{j+1} s_i (i <= j)
        if (r + 2 <= cap[f])
          for (int j = 0; j <= r; ++j)
            for (int i = 0; i <= j; ++i) {
              int a = degen(I.shifted(f, +1), f, i, degen(I, f, j, c));
              int b = degen(I.shifted(f, +1), f, j + 1, degen(I, f, i, c));
              if (a != b) throw domain_error("validate: s_i s_j identity fails at " + I.str());
            }
        // d_i s_j relations
        if (r + 1 <= cap[f])
          for (int j = 0; j <= r; ++j) {
            int sj = degen(I, f, j, c);
            for (int i = 0; i <= r + 1; ++i) {
              int got = face(I.shifted(f, +1), f, i, sj);
              int want;
              if (i == j || i == j + 1) want = c;
              else if (i < j) want = degen(I.shifted(f, -1), f, j - 1, face(I, f, i, c));
              else want = degen(I.shifted(f, -1), f, j, face(I, f, i - 1, c));
              if (got != want) throw domain_error("validate: d_i s_j identity fails at " + I.str());
            }
          }
        // cross-factor commutation
        for (size_t g = f + 1; g < shape.arity(); ++g) {
          for (int i = 0; i <= r && r >= 1; ++i) {
            int fi = face(I, f, i, c);
            if (I[g] >= 1)
              for (int j = 0; j <= I[g]; ++j) {
                int a = face(I.shifted(f, -1), g, j, fi);
                int b = face(I.shifted(g, -1), f, i, face(I, g, j, c));
                if (a != b) throw domain_error("validate: cross-face identity fails at " + I.str());
              }
            if (I[g] + 1 <= cap[g])
              for (int j = 0; j <= I[g]; ++j) {
                int a = degen(I.shifted(f, -1), g, j, fi);
                int b = face(I.shifted(g, +1), f, i, degen(I, g, j, c));
                if (a != b) throw domain_error("validate: cross face/degen identity fails at " + I.str());
              }
          }
          if (I[f] + 1 <= cap[f] && I[g] + 1 <= cap[g])
            for (int i = 0; i <= r; ++i)
              for (int j = 0; j <= I[g]; ++j) {
                int a = degen(I.shifted(f, +1), g, j, degen(I, f, i, c));
                int b = degen(I.shifted(g, +1), f, i, degen(I, g, j, c));
                if (a != b) throw domain_error("validate: cross-degen identity fails at " + I.str());
              }
        }
      }
    }
  }
}

FinitePresheaf FinitePresheaf::canonicalized() const {
  FinitePresheaf out(shape, cap);
  out.complete = complete;
  for (const auto& [I, lvl] : levels_)
    for (size_t c = 0; c < lvl.size(); ++c) out.add_cell(I, std::to_string(c));
  out.faces_ = faces_;
  out.degens_ = degens_;
  return out;
}

FinitePresheaf FinitePresheaf::restricted(const std::vector<int>& new_cap) const {
  if (new_cap.size() != cap.size()) throw domain_error("restricted: cap arity mismatch");
  for (size_t f = 0; f < cap.size(); ++f)
    if (new_cap[f] > cap[f]) throw domain_error("restricted: cap must shrink");
  FinitePresheaf out(shape, new_cap);
  out.complete = false;
  for (const auto& [I, lvl] : levels_) {
    if (!I.within(new_cap)) continue;
    for (const auto& nm : lvl) out.add_cell(I, nm);
  }
  for (const auto& [k, t] : faces_)
    if (k.idx.within(new_cap)) out.faces_[k] = t;
  for (const auto& [k, t] : degens_) {
    if (!k.idx.within(new_cap)) continue;
    MultiIndex up = k.idx.shifted(static_cast<size_t>(k.factor), +1);
    if (up.within(new_cap)) out.degens_[k] = t;
  }
  // Completeness survives when nothing nondegenerate was cut off.
  if (complete) {
    bool kept = true;
    std::vector<int> s = support();
    for (size_t f = 0; f < s.size(); ++f)
      if (s[f] > new_cap[f]) kept = false;
    out.complete = kept;
  }
  return out;
}

FinitePresheaf FinitePresheaf::extended(const std::vector<int>& new_cap) const {
  if (!complete) throw domain_error("extended: presheaf is not complete");
  if (new_cap.size() != cap.size()) throw domain_error("extended: cap arity mismatch");
  FinitePresheaf out(shape, new_cap);
  out.complete = true;

  // Cells at I = (nondegenerate core at J, multi-epi I ->> J), named by the
  // core name and the epi word.
  auto nd = nondegenerate_cells();
  auto encode = [&](const CellRef& core, const MultiMap& epi) {
    std::ostringstream os;
    os << cell_name(core) << "@" << core.idx.str();
    bool allid = true;
    for (const auto& p : epi.parts)
      if (!p.is_identity()) allid = false;
    if (!allid) {
      os << "~";
      for (const auto& p : epi.parts) os << p.str();
    }
    return os.str();
  };
  struct Entry {
    CellRef core;
    MultiMap epi;
  };
  std::map<MultiIndex, std::vector<Entry>> entries;
  for (const MultiIndex& I : indices_within(shape.arity(), new_cap)) {
    std::vector<Entry> here;
    for (const CellRef& core : nd) {
      // enumerate multi-epis I ->> core.idx
      bool fits = true;
      for (size_t f = 0; f < shape.arity(); ++f)
        if (core.idx[f] > I[f]) fits = false;
      if (!fits) continue;
      std::vector<MultiMap> epis{MultiMap{}};
      for (size_t f = 0; f < shape.arity(); ++f) {
        std::vector<MultiMap> next;
        for (const auto& m : epis)
          for (const auto& p : all_monotone(I[f], core.idx[f]))
            if (p.is_epi()) {
              MultiMap n = m;
              n.parts.push_back(p);
              next.push_back(std::move(n));
            }
        epis = std::move(next);
      }
      for (auto& e : epis) here.push_back(Entry{core, std::move(e)});
    }
    for (const auto& e : here) out.add_cell(I, encode(e.core, e.epi));
    entries[I] = std::move(here);
  }

  // The action of a generator u on (core, eta) is the normal form of the
  // composite eta . u, with the mono part pushed into the core.
  auto locate = [&](const MultiIndex& I, const CellRef& core, const MultiMap& epi) {
    return out.cell_index(I, encode(core, epi));
  };
  auto act_entry = [&](const MultiIndex& I, const Entry& e, const MultiMap& u) {
    MultiMap comp = compose(u, e.epi);  // u : I' -> I, epi : I -> J
    // split each part
    MultiMap epi_part, mono_part;
    for (const auto& p : comp.parts) {
      auto [ep, mo] = epi_mono_factor(p);
      epi_part.parts.push_back(ep);
      mono_part.parts.push_back(mo);
    }
    CellRef w = act(mono_part, e.core);  // lives within the original levels
    CellNormalForm nf = normal_form(w);
    MultiMap total = compose(epi_part, nf.epi_word);
    return std::pair<CellRef, MultiMap>(nf.core, total);
  };
  for (const auto& [I, here] : entries) {
    for (size_t f = 0; f < shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          MultiMap u = MultiMap::generator_coface(I, f, i);
          std::vector<int> table;
          table.reserve(here.size());
          for (const auto& e : here) {
            auto [core, epi] = act_entry(I, e, u);
            table.push_back(locate(I.shifted(f, -1), core, epi));
          }
          out.set_face(I, f, i, std::move(table));
        }
      if (I[f] + 1 <= new_cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          MultiMap u = MultiMap::generator_codegeneracy(I.shifted(f, +1), f, i);
          std::vector<int> table;
          table.reserve(here.size());
          for (const auto& e : here) {
            auto [core, epi] = act_entry(I, e, u);
            table.push_back(locate(I.shifted(f, +1), core, epi));
          }
          out.set_degen(I, f, i, std::move(table));
        }
    }
  }
  return out;
}

FinitePresheaf FinitePresheaf::reversed_outer() const {
  int of = shape.outer_factor();
  if (of < 0) return *this;
  FinitePresheaf out(shape, cap);
  out.complete = complete;
  out.levels_ = levels_;
  out.index_ = index_;
  for (const auto& [k, t] : faces_) {
    ActionKey nk = k;
    if (k.factor == of) nk.i = k.idx[static_cast<size_t>(of)] - k.i;
    out.faces_[nk] = t;
  }
  for (const auto& [k, t] : degens_) {
    ActionKey nk = k;
    if (k.factor == of) nk.i = k.idx[static_cast<size_t>(of)] - k.i;
    out.degens_[nk] = t;
  }
  return out;
}

bool FinitePresheaf::same_data(const FinitePresheaf& other) const {
  return shape == other.shape && cap == other.cap && levels_ == other.levels_ &&
         faces_ == other.faces_ && degens_ == other.degens_;
}

PSh share(FinitePresheaf p) { return std::make_shared<const FinitePresheaf>(std::move(p)); }

// --- PresheafMap ------------------------------------------------------------

PresheafMap::PresheafMap(PSh src, PSh dst) : source(std::move(src)), target(std::move(dst)) {
  if (source->shape != target->shape) throw domain_error("PresheafMap: shape mismatch");
}

std::vector<int> PresheafMap::common_cap() const {
  std::vector<int> c(source->cap.size());
  for (size_t f = 0; f < c.size(); ++f) c[f] = std::min(source->cap[f], target->cap[f]);
  return c;
}

int PresheafMap::operator()(const MultiIndex& I, int cell) const {
  auto it = components.find(I);
  if (it == components.end()) throw domain_error("PresheafMap: no component at " + I.str());
  return it->second[static_cast<size_t>(cell)];
}

CellRef PresheafMap::apply(const CellRef& z) const { return CellRef{z.idx, (*this)(z.idx, z.cell)}; }

void PresheafMap::set(const MultiIndex& I, std::vector<int> comp) { components[I] = std::move(comp); }

PresheafMap PresheafMap::identity(PSh X) {
  PresheafMap m(X, X);
  for (const MultiIndex& I : X->indices()) {
    std::vector<int> comp(static_cast<size_t>(X->cell_count(I)));
    std::iota(comp.begin(), comp.end(), 0);
    m.set(I, std::move(comp));
  }
  return m;
}

bool PresheafMap::is_mono() const {
  for (const auto& [I, comp] : components) {
    std::set<int> seen;
    for (int v : comp)
      if (!seen.insert(v).second) return false;
  }
  return true;
}

bool PresheafMap::is_epi() const {
  for (const auto& [I, comp] : components) {
    std::set<int> seen(comp.begin(), comp.end());
    if (static_cast<int>(seen.size()) != target->cell_count(I)) return false;
  }
  return true;
}

bool PresheafMap::is_iso() const { return is_mono() && is_epi(); }

bool PresheafMap::commutes() const {
  std::vector<int> cc = common_cap();
  for (const auto& [I, comp] : components) {
    if (comp.size() != static_cast<size_t>(source->cell_count(I))) return false;
    for (size_t f = 0; f < source->shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          MultiIndex lo = I.shifted(f, -1);
          for (int c = 0; c < source->cell_count(I); ++c) {
            int a = (*this)(lo, source->face(I, f, i, c));
            int b = target->face(I, f, i, comp[static_cast<size_t>(c)]);
            if (a != b) return false;
          }
        }
      if (I[f] + 1 <= cc[f])
        for (int i = 0; i <= I[f]; ++i) {
          MultiIndex hi = I.shifted(f, +1);
          for (int c = 0; c < source->cell_count(I); ++c) {
            int a = (*this)(hi, source->degen(I, f, i, c));
            int b = target->degen(I, f, i, comp[static_cast<size_t>(c)]);
            if (a != b) return false;
          }
        }
    }
  }
  return true;
}

void PresheafMap::validate() const {
  std::vector<int> cc = common_cap();
  for (const MultiIndex& I : indices_within(source->shape.arity(), cc))
    if (!components.count(I)) throw domain_error("PresheafMap: missing component at " + I.str());
  if (!commutes()) throw domain_error("PresheafMap: does not commute with actions");
}

PresheafMap compose(const PresheafMap& f, const PresheafMap& g) {
  if (f.target.get() != g.source.get() && !f.target->same_data(*g.source))
    throw domain_error("compose(PresheafMap): middle object mismatch");
  PresheafMap h(f.source, g.target);
  for (const auto& [I, comp] : f.components) {
    if (!g.components.count(I)) continue;
    std::vector<int> out(comp.size());
    for (size_t c = 0; c < comp.size(); ++c) out[c] = g(I, comp[c]);
    h.set(I, std::move(out));
  }
  return h;
}

bool same_map(const PresheafMap& f, const PresheafMap& g) {
  return f.components == g.components;
}

// --- representables ---------------------------------------------------------

namespace {

std::vector<int> default_rep_cap(const IndexShape& shape, const MultiIndex& coords) {
  std::vector<int> cap(shape.arity());
  for (size_t f = 0; f < shape.arity(); ++f)
    cap[f] = shape.factors[f] == FactorKind::ThetaZero ? 0 : coords[f] + 1;
  return cap;
}

std::string multimap_cell_name_impl(const MultiMap& m) {
  std::string s;
  for (size_t f = 0; f < m.parts.size(); ++f) {
    if (f) s += "|";
    const auto& vals = m.parts[f].values;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) s += " ";
      s += std::to_string(vals[i]);
    }
  }
  return s;
}

// Generic builder for subfunctors of a representable: keep(u) must be closed
// under precomposition.
FinitePresheaf representable_like(const IndexShape& shape, const MultiIndex& coords,
                                  std::vector<int> cap,
                                  const std::function<bool(const MultiMap&)>& keep) {
  if (coords.size() != shape.arity()) throw domain_error("representable: coord arity mismatch");
  for (size_t f = 0; f < shape.arity(); ++f) {
    if (coords[f] < 0) throw domain_error("representable: negative coordinate");
    if (shape.factors[f] == FactorKind::ThetaZero && coords[f] != 0)
      throw domain_error("representable: ThetaZero coordinate must be 0");
  }
  if (cap.empty()) cap = default_rep_cap(shape, coords);
  if (!coords.within(cap)) throw domain_error("representable: cap exceeded");
  FinitePresheaf X(shape, cap);
  X.complete = true;
  std::map<MultiIndex, std::vector<MultiMap>> cells;
  for (const MultiIndex& I : indices_within(shape.arity(), cap)) {
    std::vector<MultiMap> here;
    for (const MultiMap& u : all_multimaps(I, coords))
      if (keep(u)) here.push_back(u);
    for (const MultiMap& u : here) X.add_cell(I, multimap_cell_name(u));
    cells[I] = std::move(here);
  }
  auto locate = [&](const MultiIndex& I, const MultiMap& u) {
    return X.cell_index(I, multimap_cell_name(u));
  };
  for (const auto& [I, here] : cells) {
    for (size_t f = 0; f < shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          MultiMap g = MultiMap::generator_coface(I, f, i);
          std::vector<int> table;
          for (const MultiMap& u : here) table.push_back(locate(I.shifted(f, -1), compose(g, u)));
          X.set_face(I, f, i, std::move(table));
        }
      if (I[f] + 1 <= cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          MultiMap g = MultiMap::generator_codegeneracy(I.shifted(f, +1), f, i);
          std::vector<int> table;
          for (const MultiMap& u : here) table.push_back(locate(I.shifted(f, +1), compose(g, u)));
          X.set_degen(I, f, i, std::move(table));
        }
    }
  }
  return X;
}

}  // namespace

std::string multimap_cell_name(const MultiMap& m) { return multimap_cell_name_impl(m); }

FinitePresheaf representable(const IndexShape& shape, const MultiIndex& coords, std::vector<int> cap) {
  return representable_like(shape, coords, std::move(cap), [](const MultiMap&) { return true; });
}

FinitePresheaf boundary_representable(const IndexShape& shape, const MultiIndex& coords,
                                      std::vector<int> cap) {
  int of = shape.outer_factor();
  if (of < 0) throw domain_error("boundary_representable: no outer factor");
  return representable_like(shape, coords, std::move(cap), [of](const MultiMap& u) {
    return !u.parts[static_cast<size_t>(of)].is_epi();
  });
}

FinitePresheaf empty_presheaf(const IndexShape& shape, std::vector<int> cap) {
  FinitePresheaf X(shape, std::move(cap));
  X.complete = true;
  for (const MultiIndex& I : X.indices()) {
    for (size_t f = 0; f < shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) X.set_face(I, f, i, {});
      if (I[f] + 1 <= X.cap[f])
        for (int i = 0; i <= I[f]; ++i) X.set_degen(I, f, i, {});
    }
  }
  return X;
}

FinitePresheaf terminal_presheaf(const IndexShape& shape, std::vector<int> cap) {
  return representable(shape, MultiIndex::zero(shape), std::move(cap));
}

FinitePresheaf poset_nerve(const IndexShape& shape, int n, const std::vector<std::vector<bool>>& leq,
                           std::vector<int> cap) {
  int of = shape.outer_factor();
  if (of < 0) throw domain_error("poset_nerve: no outer factor");
  if (cap.empty()) {
    cap.assign(shape.arity(), 1);
    for (size_t f = 0; f < shape.arity(); ++f)
      if (shape.factors[f] == FactorKind::ThetaZero) cap[f] = 0;
    cap[static_cast<size_t>(of)] = std::max(2, n);
  }
  FinitePresheaf X(shape, cap);
  X.complete = true;
  // cells at I: weakly increasing chains of length I[outer]+1 (other factors
  // carry the chain unchanged).
  std::map<MultiIndex, std::vector<std::vector<int>>> chains;
  auto chain_name = [](const std::vector<int>& ch) {
    std::string s;
    for (size_t i = 0; i < ch.size(); ++i) {
      if (i) s += " ";
      s += std::to_string(ch[i]);
    }
    return s;
  };
  for (const MultiIndex& I : X.indices()) {
    int len = I[static_cast<size_t>(of)] + 1;
    std::vector<std::vector<int>> here;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int depth) {
      if (depth == len) {
        here.push_back(cur);
        return;
      }
      for (int v = 0; v < n; ++v) {
        if (!cur.empty() && !leq[static_cast<size_t>(cur.back())][static_cast<size_t>(v)]) continue;
        cur.push_back(v);
        rec(depth + 1);
        cur.pop_back();
      }
    };
    rec(0);
    for (const auto& ch : here) X.add_cell(I, chain_name(ch));
    chains[I] = std::move(here);
  }
  for (const auto& [I, here] : chains) {
    for (size_t f = 0; f < shape.arity(); ++f) {
      bool outer = static_cast<int>(f) == of;
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> table;
          for (const auto& ch : here) {
            std::vector<int> img = ch;
            if (outer) img.erase(img.begin() + i);
            table.push_back(X.cell_index(I.shifted(f, -1), chain_name(img)));
          }
          X.set_face(I, f, i, std::move(table));
        }
      if (I[f] + 1 <= X.cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> table;
          for (const auto& ch : here) {
            std::vector<int> img = ch;
            if (outer) img.insert(img.begin() + i, ch[static_cast<size_t>(i)]);
            table.push_back(X.cell_index(I.shifted(f, +1), chain_name(img)));
          }
          X.set_degen(I, f, i, std::move(table));
        }
    }
  }
  return X;
}

// --- connectivity and L -----------------------------------------------------

namespace {

// Union-find over the 0-index cells identifying the components of X.
std::pair<std::vector<int>, int> component_classes(const FinitePresheaf& X) {
  MultiIndex zero = MultiIndex::zero(X.shape);
  int n0 = X.cell_count(zero);
  UnionFind uf(n0);
  for (const MultiIndex& I : X.indices()) {
    int cnt = X.cell_count(I);
    if (I.total() == 0 || cnt == 0) continue;
    for (int c = 0; c < cnt; ++c) {
      // unify all vertices of the cell
      int first = -1;
      std::vector<MultiMap> verts = all_multimaps(zero, I);
      for (const MultiMap& v : verts) {
        CellRef w = X.act(v, CellRef{I, c});
        if (first < 0) first = w.cell;
        else uf.unite(first, w.cell);
      }
    }
  }
  std::vector<int> cls(static_cast<size_t>(n0));
  std::map<int, int> renum;
  int k = 0;
  for (int c = 0; c < n0; ++c) {
    int r = uf.find(c);
    if (!renum.count(r)) renum[r] = k++;
    cls[static_cast<size_t>(c)] = renum[r];
  }
  return {cls, k};
}

}  // namespace

int component_count(const FinitePresheaf& X) { return component_classes(X).second; }

bool is_connected(const FinitePresheaf& X) { return component_count(X) == 1; }

FinitePresheaf outer_zero_part(const FinitePresheaf& X) {
  int of = X.shape.outer_factor();
  if (of < 0) throw domain_error("outer_zero_part: no outer factor");
  IndexShape ts = X.shape.theta_shape();
  std::vector<int> tcap;
  for (size_t f = 0; f < X.shape.arity(); ++f)
    if (static_cast<int>(f) != of) tcap.push_back(X.cap[f]);
  FinitePresheaf Y(ts, tcap);
  Y.complete = false;
  auto lift = [&](const MultiIndex& J) {
    MultiIndex I;
    size_t g = 0;
    for (size_t f = 0; f < X.shape.arity(); ++f) {
      if (static_cast<int>(f) == of) I.coords.push_back(0);
      else I.coords.push_back(J[g++]);
    }
    return I;
  };
  for (const MultiIndex& J : Y.indices()) {
    MultiIndex I = lift(J);
    for (const auto& nm : X.cells(I)) Y.add_cell(J, nm);
  }
  for (const MultiIndex& J : Y.indices()) {
    MultiIndex I = lift(J);
    for (size_t g = 0; g < ts.arity(); ++g) {
      size_t f = g + (static_cast<int>(g) >= of ? 1 : 0);
      if (J[g] >= 1)
        for (int i = 0; i <= J[g]; ++i) {
          std::vector<int> table;
          for (int c = 0; c < X.cell_count(I); ++c) table.push_back(X.face(I, f, i, c));
          Y.set_face(J, g, i, std::move(table));
        }
      if (J[g] + 1 <= Y.cap[g])
        for (int i = 0; i <= J[g]; ++i) {
          std::vector<int> table;
          for (int c = 0; c < X.cell_count(I); ++c) table.push_back(X.degen(I, f, i, c));
          Y.set_degen(J, g, i, std::move(table));
        }
    }
  }
  return Y;
}

FinitePresheaf const_outer_embed(const FinitePresheaf& Y, const IndexShape& full_shape, int outer_cap) {
  int of = full_shape.outer_factor();
  if (of < 0) throw domain_error("const_outer_embed: no outer factor");
  if (Y.shape != full_shape.theta_shape()) throw domain_error("const_outer_embed: shape mismatch");
  std::vector<int> cap;
  {
    size_t g = 0;
    for (size_t f = 0; f < full_shape.arity(); ++f) {
      if (static_cast<int>(f) == of) cap.push_back(outer_cap);
      else cap.push_back(Y.cap[g++]);
    }
  }
  FinitePresheaf X(full_shape, cap);
  X.complete = Y.complete;
  auto drop = [&](const MultiIndex& I) {
    MultiIndex J;
    for (size_t f = 0; f < full_shape.arity(); ++f)
      if (static_cast<int>(f) != of) J.coords.push_back(I[f]);
    return J;
  };
  for (const MultiIndex& I : X.indices()) {
    MultiIndex J = drop(I);
    for (const auto& nm : Y.cells(J)) X.add_cell(I, nm);
  }
  for (const MultiIndex& I : X.indices()) {
    MultiIndex J = drop(I);
    int cnt = X.cell_count(I);
    for (size_t f = 0; f < full_shape.arity(); ++f) {
      bool outer = static_cast<int>(f) == of;
      size_t g = outer ? 0 : (f - (static_cast<int>(f) > of ? 1 : 0));
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> table(static_cast<size_t>(cnt));
          for (int c = 0; c < cnt; ++c) table[static_cast<size_t>(c)] = outer ? c : Y.face(J, g, i, c);
          X.set_face(I, f, i, std::move(table));
        }
      if (I[f] + 1 <= cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> table(static_cast<size_t>(cnt));
          for (int c = 0; c < cnt; ++c) table[static_cast<size_t>(c)] = outer ? c : Y.degen(J, g, i, c);
          X.set_degen(I, f, i, std::move(table));
        }
    }
  }
  return X;
}

FinitePresheaf discretize_L(const FinitePresheaf& X) {
  int of = X.shape.outer_factor();
  if (of < 0) throw domain_error("discretize_L: no outer factor");
  // Quotient: a cell that is an outer-total degeneracy of a level-0 cell is
  // identified with the degeneracy of its component's canonical point.
  auto cls = component_classes(outer_zero_part(X)).first;
  FinitePresheaf out(X.shape, X.cap);
  out.complete = X.complete;

  // A cell collapses iff its nondegenerate core sits at outer level 0, i.e.
  // it is in the image of c(X_0); it then lands on its component's point.
  std::map<MultiIndex, std::vector<int>> quot;      // cell -> new id
  size_t of_s = static_cast<size_t>(of);
  for (const MultiIndex& I : X.indices()) {
    int cnt = X.cell_count(I);
    std::vector<int> q(static_cast<size_t>(cnt), -1);
    std::vector<std::string> nm;
    std::set<std::string> used;
    std::map<int, int> comp_id;
    for (int c = 0; c < cnt; ++c) {
      CellNormalForm nf = X.normal_form(CellRef{I, c});
      if (nf.core.idx[of_s] == 0) {
        MultiMap v;
        for (int r : nf.core.idx.coords) v.parts.push_back(SimplexMap::constant(0, r, 0));
        CellRef vx = X.act(v, nf.core);
        int k = cls[static_cast<size_t>(vx.cell)];
        if (!comp_id.count(k)) {
          comp_id[k] = static_cast<int>(nm.size());
          std::string s = "~pt" + std::to_string(k);
          while (used.count(s)) s += "'";
          used.insert(s);
          nm.push_back(s);
        }
        q[static_cast<size_t>(c)] = comp_id[k];
      }
    }
    for (int c = 0; c < cnt; ++c) {
      if (q[static_cast<size_t>(c)] >= 0) continue;
      q[static_cast<size_t>(c)] = static_cast<int>(nm.size());
      std::string s = X.cells(I)[static_cast<size_t>(c)];
      while (used.count(s)) s += "'";
      used.insert(s);
      nm.push_back(s);
    }
    for (const auto& s : nm) out.add_cell(I, s);
    quot[I] = std::move(q);
  }
  for (const MultiIndex& I : X.indices()) {
    const auto& q = quot[I];
    int cnt = X.cell_count(I);
    int outcnt = out.cell_count(I);
    for (size_t f = 0; f < X.shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> table(static_cast<size_t>(outcnt), -1);
          const auto& ql = quot[I.shifted(f, -1)];
          for (int c = 0; c < cnt; ++c)
            table[static_cast<size_t>(q[static_cast<size_t>(c)])] = ql[static_cast<size_t>(X.face(I, f, i, c))];
          out.set_face(I, f, i, std::move(table));
        }
      if (I[f] + 1 <= X.cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> table(static_cast<size_t>(outcnt), -1);
          const auto& qh = quot[I.shifted(f, +1)];
          for (int c = 0; c < cnt; ++c)
            table[static_cast<size_t>(q[static_cast<size_t>(c)])] = qh[static_cast<size_t>(X.degen(I, f, i, c))];
          out.set_degen(I, f, i, std::move(table));
        }
    }
  }
  out.validate();
  return out;
}


// --- refitting ----------------------------------------------------------------

CellRef Extension::transport(const CellRef& orig_cell) const {
  return include.apply(orig_cell);
}

Extension fit_presheaf(PSh X, const std::vector<int>& caps) {
  bool grow = false;
  for (size_t f = 0; f < caps.size(); ++f)
    if (caps[f] > X->cap[f]) grow = true;

  Extension E;
  E.original = X;

  if (!grow) {
    PSh obj = (caps == X->cap) ? X : share(X->restricted(caps));
    E.object = obj;
    for (const MultiIndex& I : obj->indices())
      for (int c = 0; c < obj->cell_count(I); ++c)
        E.dict.emplace(CellRef{I, c}, X->normal_form(CellRef{I, c}));
    E.include = PresheafMap(X, obj);
    for (const MultiIndex& I : obj->indices()) {
      std::vector<int> t(static_cast<size_t>(X->cell_count(I)));
      std::iota(t.begin(), t.end(), 0);
      E.include.set(I, std::move(t));
    }
    return E;
  }

  if (!X->complete) throw domain_error("fit_presheaf: cannot extend an incomplete presheaf");

  FinitePresheaf out(X->shape, caps);
  {
    std::vector<int> s = X->support();
    bool within = true;
    for (size_t f = 0; f < s.size(); ++f)
      if (s[f] > caps[f]) within = false;
    out.complete = within;
  }
  auto nd = X->nondegenerate_cells();
  auto encode = [&](const CellRef& core, const MultiMap& epi) {
    std::ostringstream os;
    os << X->cell_name(core) << "@" << core.idx.str();
    bool allid = true;
    for (const auto& p : epi.parts)
      if (!p.is_identity()) allid = false;
    if (!allid) {
      os << "~";
      for (const auto& p : epi.parts) os << p.str();
    }
    return os.str();
  };
  struct Entry {
    CellRef core;
    MultiMap epi;
  };
  std::map<MultiIndex, std::vector<Entry>> entries;
  for (const MultiIndex& I : out.indices()) {
    std::vector<Entry> here;
    for (const CellRef& core : nd) {
      bool fits = true;
      for (size_t f = 0; f < X->shape.arity(); ++f)
        if (core.idx[f] > I[f]) fits = false;
      if (!fits) continue;
      std::vector<MultiMap> epis{MultiMap{}};
      for (size_t f = 0; f < X->shape.arity(); ++f) {
        std::vector<MultiMap> next;
        for (const auto& m : epis)
          for (const auto& p : all_monotone(I[f], core.idx[f]))
            if (p.is_epi()) {
              MultiMap n2 = m;
              n2.parts.push_back(p);
              next.push_back(std::move(n2));
            }
        epis = std::move(next);
      }
      for (auto& e : epis) here.push_back(Entry{core, std::move(e)});
    }
    for (const auto& e : here) out.add_cell(I, encode(e.core, e.epi));
    entries[I] = std::move(here);
  }
  auto locate = [&](const MultiIndex& I, const CellRef& core, const MultiMap& epi) {
    return out.cell_index(I, encode(core, epi));
  };
  auto act_entry = [&](const Entry& e, const MultiMap& u) {
    MultiMap comp = compose(u, e.epi);
    MultiMap epi_part, mono_part;
    for (const auto& p : comp.parts) {
      auto [ep, mo] = epi_mono_factor(p);
      epi_part.parts.push_back(ep);
      mono_part.parts.push_back(mo);
    }
    CellRef w = X->act(mono_part, e.core);
    CellNormalForm nf = X->normal_form(w);
    MultiMap total = compose(epi_part, nf.epi_word);
    return std::pair<CellRef, MultiMap>(nf.core, total);
  };
  for (const auto& [I, here] : entries) {
    for (size_t f = 0; f < X->shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          MultiMap u = MultiMap::generator_coface(I, f, i);
          std::vector<int> t;
          t.reserve(here.size());
          for (const auto& e : here) {
            auto [core, epi] = act_entry(e, u);
            t.push_back(locate(I.shifted(f, -1), core, epi));
          }
          out.set_face(I, f, i, std::move(t));
        }
      if (I[f] + 1 <= caps[f])
        for (int i = 0; i <= I[f]; ++i) {
          MultiMap u = MultiMap::generator_codegeneracy(I.shifted(f, +1), f, i);
          std::vector<int> t;
          t.reserve(here.size());
          for (const auto& e : here) {
            auto [core, epi] = act_entry(e, u);
            t.push_back(locate(I.shifted(f, +1), core, epi));
          }
          out.set_degen(I, f, i, std::move(t));
        }
    }
  }
  PSh obj = share(std::move(out));
  E.object = obj;
  for (const auto& [I, here] : entries)
    for (size_t c = 0; c < here.size(); ++c)
      E.dict.emplace(CellRef{I, static_cast<int>(c)}, CellNormalForm{here[c].core, here[c].epi});
  E.include = PresheafMap(X, obj);
  for (const MultiIndex& I : X->indices()) {
    if (!I.within(caps)) continue;
    std::vector<int> t(static_cast<size_t>(X->cell_count(I)));
    for (int c = 0; c < X->cell_count(I); ++c) {
      CellNormalForm nf = X->normal_form(CellRef{I, c});
      t[static_cast<size_t>(c)] = obj->cell_index(I, encode(nf.core, nf.epi_word));
    }
    E.include.set(I, std::move(t));
  }
  return E;
}

PresheafMap fit_map(const PresheafMap& f, const Extension& src, const Extension& dst) {
  if (src.original.get() != f.source.get() && !src.original->same_data(*f.source))
    throw domain_error("fit_map: source mismatch");
  if (dst.original.get() != f.target.get() && !dst.original->same_data(*f.target))
    throw domain_error("fit_map: target mismatch");
  PresheafMap out(src.object, dst.object);
  for (const MultiIndex& I : src.object->indices()) {
    if (!I.within(dst.object->cap)) continue;
    int n = src.object->cell_count(I);
    std::vector<int> t(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
      const CellNormalForm& nf = src.dict.at(CellRef{I, c});
      // f on the original core, embedded into the refitted target, then the epi.
      CellRef v{nf.core.idx, f(nf.core.idx, nf.core.cell)};
      CellRef w = dst.include.apply(v);
      t[static_cast<size_t>(c)] = dst.object->act(nf.epi_word, w).cell;
    }
    out.set(I, std::move(t));
  }
  return out;
}

}  // namespace infcat
