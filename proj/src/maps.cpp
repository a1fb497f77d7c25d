#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "infcat/limits.hpp"

namespace infcat {

namespace {

bool cap_covers(const std::vector<int>& big, const std::vector<int>& small) {
  for (size_t f = 0; f < big.size(); ++f)
    if (big[f] < small[f]) return false;
  return true;
}

// Images of all cells of X determined by images of nondegenerate cells.
struct Assignment {
  PSh X, Z;
  std::map<CellRef, CellRef> core_img;

  CellRef image(const CellRef& z) const {
    CellNormalForm nf = X->normal_form(z);
    CellRef to = core_img.at(nf.core);
    return Z->act(nf.epi_word, to);  // epis act by degeneracies on the image
  }
};

PresheafMap materialize(const Assignment& asg) {
  PresheafMap m(asg.X, asg.Z);
  for (const MultiIndex& I : asg.X->indices()) {
    int n = asg.X->cell_count(I);
    std::vector<int> t(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) t[static_cast<size_t>(c)] = asg.image(CellRef{I, c}).cell;
    m.set(I, std::move(t));
  }
  return m;
}

}  // namespace

std::vector<PresheafMap> enumerate_maps(PSh X, PSh Z, const std::vector<MapPin>& pins, Budget* budget,
                                        size_t max_results) {
  if (X->shape != Z->shape) throw domain_error("enumerate_maps: shape mismatch");
  if (!cap_covers(Z->cap, X->cap)) throw domain_error("enumerate_maps: target cap too small");
  Budget local;
  Budget& bud = budget ? *budget : local;

  // Assignment order: top-dimensional cores first, each followed immediately
  // by its boundary cores, so conflicts between neighbouring cells surface as
  // early as possible.
  std::vector<CellRef> nd = X->nondegenerate_cells();
  std::vector<CellRef> cores;
  {
    std::set<CellRef> added;
    std::function<void(const CellRef&)> visit = [&](const CellRef& z) {
      if (added.count(z)) return;
      added.insert(z);
      cores.push_back(z);
      for (size_t f = 0; f < X->shape.arity(); ++f)
        if (z.idx[f] >= 1)
          for (int i = 0; i <= z.idx[f]; ++i) {
            CellRef w{z.idx.shifted(f, -1), X->face(z.idx, f, i, z.cell)};
            visit(X->normal_form(w).core);
          }
    };
    for (auto it = nd.rbegin(); it != nd.rend(); ++it) visit(*it);
  }
  std::map<CellRef, size_t> core_pos;
  for (size_t i = 0; i < cores.size(); ++i) core_pos[cores[i]] = i;

  std::map<CellRef, std::vector<std::pair<MultiMap, CellRef>>> core_pins;
  for (const MapPin& p : pins) {
    CellNormalForm nf = X->normal_form(p.at);
    core_pins[nf.core].push_back({nf.epi_word, p.to});
  }

  // Every face relation face_{f,i}(z) = X(eta)(w) is checked when the later
  // of z, w is assigned.
  struct Rel {
    size_t z_pos;  // the higher core
    size_t w_pos;  // its boundary core
    size_t f;
    int i;
    MultiMap epi;
  };
  std::vector<Rel> rels;
  std::vector<std::vector<size_t>> check_at(cores.size());
  for (size_t p = 0; p < cores.size(); ++p) {
    const CellRef& z = cores[p];
    for (size_t f = 0; f < X->shape.arity(); ++f)
      if (z.idx[f] >= 1)
        for (int i = 0; i <= z.idx[f]; ++i) {
          CellRef w{z.idx.shifted(f, -1), X->face(z.idx, f, i, z.cell)};
          CellNormalForm nf = X->normal_form(w);
          size_t wp = core_pos.at(nf.core);
          size_t later = std::max(p, wp);
          check_at[later].push_back(rels.size());
          rels.push_back(Rel{p, wp, f, i, nf.epi_word});
        }
  }

  std::vector<PresheafMap> out;
  Assignment asg{X, Z, {}};
  std::vector<CellRef> img_at(cores.size());

  std::function<void(size_t)> rec = [&](size_t pos) {
    if (out.size() >= max_results) return;
    if (pos == cores.size()) {
      out.push_back(materialize(asg));
      return;
    }
    const CellRef& z = cores[pos];
    int nz = Z->cell_count(z.idx);
    const auto pin_it = core_pins.find(z);
    for (int cand = 0; cand < nz; ++cand) {
      bud.spend(1, "enumerate_maps");
      img_at[pos] = CellRef{z.idx, cand};
      bool ok = true;
      for (size_t ri : check_at[pos]) {
        const Rel& r = rels[ri];
        const CellRef& zi = img_at[r.z_pos];
        const CellRef& wi = img_at[r.w_pos];
        CellRef lhs{cores[r.z_pos].idx.shifted(r.f, -1),
                    Z->face(cores[r.z_pos].idx, r.f, r.i, zi.cell)};
        if (Z->act(r.epi, wi) != lhs) {
          ok = false;
          break;
        }
      }
      if (ok && pin_it != core_pins.end())
        for (const auto& [eta, to] : pin_it->second)
          if (Z->act(eta, img_at[pos]) != to) {
            ok = false;
            break;
          }
      if (!ok) continue;
      asg.core_img[z] = img_at[pos];
      rec(pos + 1);
      asg.core_img.erase(z);
      if (out.size() >= max_results) return;
    }
  };
  rec(0);
  return out;
}

// --- exponential -------------------------------------------------------------

ExponentialResult exponential_full(PSh Z, PSh A, const std::vector<int>& cap, Budget* budget) {
  if (Z->shape != A->shape) throw domain_error("exponential: shape mismatch");
  for (size_t f = 0; f < cap.size(); ++f)
    if (cap[f] < 0) throw domain_error("exponential: bad cap");

  // The maps A x F[I] -> Z are determined within supp(A) + I; both operands
  // must provide those levels.
  std::vector<int> suppA = A->support();
  std::vector<int> need(cap.size());
  for (size_t f = 0; f < cap.size(); ++f) need[f] = suppA[f] + cap[f];
  PSh Aext = A;
  if (!cap_covers(A->cap, need)) {
    if (!A->complete) throw domain_error("exponential: base of exponent not complete and cap too small");
    Aext = share(A->extended(need));
  }
  PSh Zext = Z;
  if (!cap_covers(Z->cap, need)) {
    if (!Z->complete) throw domain_error("exponential: target not complete and cap too small");
    Zext = share(Z->extended(need));
  }

  ExponentialResult R;
  FinitePresheaf E(Z->shape, cap);
  E.complete = false;

  struct LevelData {
    std::vector<PresheafMap> maps;
    std::map<std::string, int> by_key;
  };
  std::map<MultiIndex, LevelData> data;

  auto map_key = [&](const PresheafMap& m, const FinitePresheaf& dom) {
    std::ostringstream os;
    for (const CellRef& c : dom.nondegenerate_cells())
      os << c.idx.str() << ":" << c.cell << "->" << m(c.idx, c.cell) << ";";
    return os.str();
  };

  for (const MultiIndex& I : E.indices()) {
    PSh FI = share(representable(Z->shape, I, need));
    ProductResult prod = product(Aext, FI);
    std::vector<PresheafMap> maps = enumerate_maps(prod.object, Zext, {}, budget);
    LevelData ld;
    for (auto& m : maps) {
      std::string key = map_key(m, *prod.object);
      if (ld.by_key.count(key)) continue;
      ld.by_key[key] = static_cast<int>(ld.maps.size());
      E.add_cell(I, "f" + std::to_string(ld.maps.size()));
      ld.maps.push_back(std::move(m));
    }
    R.domains.emplace(I, std::move(prod));
    R.exponents.emplace(I, FI);
    data.emplace(I, std::move(ld));
  }

  // Action of u : I' -> I on a map m : A x F[I] -> Z is m . (id x F[u]),
  // where F[u] post-composes representable cells with u.
  // F[u] : F[Isrc] -> F[Idst] post-composes representable cells with u.
  // Representable cells are enumerated in all_multimaps order.
  auto rep_map = [&](const MultiIndex& Isrc, const MultiIndex& Idst, const MultiMap& u) {
    PSh Fs = R.exponents.at(Isrc);
    PSh Fd = R.exponents.at(Idst);
    PresheafMap fm(Fs, Fd);
    for (const MultiIndex& J : Fs->indices()) {
      auto cells_src = all_multimaps(J, Isrc);
      auto cells_dst = all_multimaps(J, Idst);
      std::map<MultiMap, int> dst_pos;
      for (size_t d = 0; d < cells_dst.size(); ++d) dst_pos[cells_dst[d]] = static_cast<int>(d);
      std::vector<int> t(cells_src.size());
      for (size_t c = 0; c < cells_src.size(); ++c) t[c] = dst_pos.at(compose(cells_src[c], u));
      fm.set(J, std::move(t));
    }
    return fm;
  };

  for (const MultiIndex& I : E.indices()) {
    const LevelData& ld = data.at(I);
    int n = static_cast<int>(ld.maps.size());
    for (size_t f = 0; f < E.shape.arity(); ++f) {
      auto do_gen = [&](const MultiIndex& Ito, const MultiMap& u, bool is_face, int i) {
        const LevelData& ldto = data.at(Ito);
        PresheafMap fu = rep_map(Ito, I, u);
        PresheafMap idA = PresheafMap::identity(Aext);
        PresheafMap ind = product_map(R.domains.at(Ito), R.domains.at(I), idA, fu);
        std::vector<int> t(static_cast<size_t>(n));
        for (int c = 0; c < n; ++c) {
          PresheafMap comp = compose(ind, ld.maps[static_cast<size_t>(c)]);
          std::string key = map_key(comp, *R.domains.at(Ito).object);
          auto it = ldto.by_key.find(key);
          if (it == ldto.by_key.end())
            throw domain_error("exponential: action image not found (cap too small?)");
          t[static_cast<size_t>(c)] = it->second;
        }
        if (is_face) E.set_face(I, f, i, std::move(t));
        else E.set_degen(I, f, i, std::move(t));
      };
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i)
          do_gen(I.shifted(f, -1), MultiMap::generator_coface(I, f, i), true, i);
      if (I[f] + 1 <= cap[f])
        for (int i = 0; i <= I[f]; ++i)
          do_gen(I.shifted(f, +1), MultiMap::generator_codegeneracy(I.shifted(f, +1), f, i), false, i);
    }
  }
  PSh obj = share(std::move(E));
  R.object = obj;
  for (const auto& [I, ld] : data)
    for (size_t c = 0; c < ld.maps.size(); ++c)
      R.maps.emplace(CellRef{I, static_cast<int>(c)}, ld.maps[c]);
  return R;
}

PSh exponential(PSh Z, PSh A, const std::vector<int>& cap, Budget* budget) {
  return exponential_full(std::move(Z), std::move(A), cap, budget).object;
}

// --- isomorphism search ------------------------------------------------------

namespace {

// Degeneracy/dimension signature used to prune candidate pairings.
std::string cell_signature(const FinitePresheaf& X, const CellRef& z) {
  std::ostringstream os;
  for (size_t f = 0; f < X.shape.arity(); ++f)
    for (int i = 0; i < z.idx[f]; ++i) os << (X.is_degenerate_via(z, f, i) ? '1' : '0');
  // face degeneracy profile
  for (size_t f = 0; f < X.shape.arity(); ++f)
    if (z.idx[f] >= 1)
      for (int i = 0; i <= z.idx[f]; ++i) {
        CellRef w{z.idx.shifted(f, -1), X.face(z.idx, f, i, z.cell)};
        os << "|" << X.normal_form(w).core.idx.str();
      }
  return os.str();
}

}  // namespace

std::optional<PresheafMap> is_isomorphic(PSh A, PSh B, Budget* budget) {
  if (A->shape != B->shape) return std::nullopt;
  std::vector<int> cc(A->cap.size());
  for (size_t f = 0; f < cc.size(); ++f) cc[f] = std::min(A->cap[f], B->cap[f]);
  PSh Ac = A->cap == cc ? A : share(A->restricted(cc));
  PSh Bc = B->cap == cc ? B : share(B->restricted(cc));

  // cardinality prune
  for (const MultiIndex& I : Ac->indices())
    if (Ac->cell_count(I) != Bc->cell_count(I)) return std::nullopt;

  std::vector<CellRef> ndA = Ac->nondegenerate_cells();
  std::vector<CellRef> ndB = Bc->nondegenerate_cells();
  if (ndA.size() != ndB.size()) return std::nullopt;

  // signature prune + candidate lists
  std::map<CellRef, std::string> sigB;
  std::map<MultiIndex, std::vector<CellRef>> byIdxB;
  for (const CellRef& z : ndB) {
    sigB[z] = cell_signature(*Bc, z);
    byIdxB[z.idx].push_back(z);
  }
  {
    std::map<std::pair<MultiIndex, std::string>, int> cntA, cntB;
    for (const CellRef& z : ndA) cntA[{z.idx, cell_signature(*Ac, z)}]++;
    for (const CellRef& z : ndB) cntB[{z.idx, sigB[z]}]++;
    if (cntA != cntB) return std::nullopt;
  }

  Budget local;
  Budget& bud = budget ? *budget : local;

  std::map<CellRef, CellRef> img;
  std::set<CellRef> used;

  std::function<bool(size_t)> rec = [&](size_t pos) -> bool {
    if (pos == ndA.size()) return true;
    const CellRef& z = ndA[pos];
    std::string sig = cell_signature(*Ac, z);
    for (const CellRef& cand : byIdxB[z.idx]) {
      if (used.count(cand) || sigB[cand] != sig) continue;
      bud.spend(1, "is_isomorphic");
      bool ok = true;
      for (size_t f = 0; f < Ac->shape.arity() && ok; ++f)
        if (z.idx[f] >= 1)
          for (int i = 0; i <= z.idx[f] && ok; ++i) {
            CellRef w{z.idx.shifted(f, -1), Ac->face(z.idx, f, i, z.cell)};
            CellNormalForm nf = Ac->normal_form(w);
            CellRef want = Bc->act(nf.epi_word, img.at(nf.core));
            CellRef got{z.idx.shifted(f, -1), Bc->face(z.idx, f, i, cand.cell)};
            if (got != want) ok = false;
          }
      if (!ok) continue;
      img[z] = cand;
      used.insert(cand);
      if (rec(pos + 1)) return true;
      img.erase(z);
      used.erase(cand);
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;

  PresheafMap m(Ac, Bc);
  for (const MultiIndex& I : Ac->indices()) {
    int n = Ac->cell_count(I);
    std::vector<int> t(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
      CellNormalForm nf = Ac->normal_form(CellRef{I, c});
      t[static_cast<size_t>(c)] = Bc->act(nf.epi_word, img.at(nf.core)).cell;
    }
    m.set(I, std::move(t));
  }
  // the witness must survive the full recheck
  if (!m.commutes() || !m.is_iso()) throw domain_error("is_isomorphic: witness failed recheck");
  return m;
}

}  // namespace infcat
