#include "infcat/limits.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace infcat {

namespace {

std::vector<int> min_cap(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c(a.size());
  for (size_t f = 0; f < a.size(); ++f) c[f] = std::min(a[f], b[f]);
  return c;
}

bool leq_vec(const std::vector<int>& a, const std::vector<int>& b) {
  for (size_t f = 0; f < a.size(); ++f)
    if (a[f] > b[f]) return false;
  return true;
}

std::vector<int> sum_vec(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c(a.size());
  for (size_t f = 0; f < a.size(); ++f) c[f] = a[f] + b[f];
  return c;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
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
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

CoproductResult coproduct(PSh A, PSh B) {
  if (A->shape != B->shape) throw domain_error("coproduct: shape mismatch");
  std::vector<int> cap = min_cap(A->cap, B->cap);
  FinitePresheaf P(A->shape, cap);
  P.complete = A->complete && B->complete && leq_vec(A->support(), cap) && leq_vec(B->support(), cap);
  for (const MultiIndex& I : P.indices()) {
    for (const auto& nm : A->cells(I)) P.add_cell(I, "l:" + nm);
    for (const auto& nm : B->cells(I)) P.add_cell(I, "r:" + nm);
  }
  for (const MultiIndex& I : P.indices()) {
    int na = A->cell_count(I);
    int nb = B->cell_count(I);
    for (size_t f = 0; f < P.shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> t(static_cast<size_t>(na + nb));
          MultiIndex lo = I.shifted(f, -1);
          int off = A->cell_count(lo);
          for (int c = 0; c < na; ++c) t[static_cast<size_t>(c)] = A->face(I, f, i, c);
          for (int c = 0; c < nb; ++c) t[static_cast<size_t>(na + c)] = off + B->face(I, f, i, c);
          P.set_face(I, f, i, std::move(t));
        }
      if (I[f] + 1 <= cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          std::vector<int> t(static_cast<size_t>(na + nb));
          MultiIndex hi = I.shifted(f, +1);
          int off = A->cell_count(hi);
          for (int c = 0; c < na; ++c) t[static_cast<size_t>(c)] = A->degen(I, f, i, c);
          for (int c = 0; c < nb; ++c) t[static_cast<size_t>(na + c)] = off + B->degen(I, f, i, c);
          P.set_degen(I, f, i, std::move(t));
        }
    }
  }
  PSh obj = share(std::move(P));
  CoproductResult r{obj, PresheafMap(A, obj), PresheafMap(B, obj)};
  for (const MultiIndex& I : obj->indices()) {
    int na = A->cell_count(I);
    int nb = B->cell_count(I);
    std::vector<int> la(static_cast<size_t>(na)), rb(static_cast<size_t>(nb));
    std::iota(la.begin(), la.end(), 0);
    std::iota(rb.begin(), rb.end(), na);
    r.left_leg.set(I, std::move(la));
    r.right_leg.set(I, std::move(rb));
  }
  return r;
}

ProductResult product(PSh A, PSh B) {
  if (A->shape != B->shape) throw domain_error("product: shape mismatch");
  std::vector<int> cap = min_cap(A->cap, B->cap);
  FinitePresheaf P(A->shape, cap);
  P.complete = A->complete && B->complete && leq_vec(sum_vec(A->support(), B->support()), cap);
  for (const MultiIndex& I : P.indices()) {
    for (const auto& na : A->cells(I))
      for (const auto& nb : B->cells(I)) P.add_cell(I, "(" + na + "," + nb + ")");
  }
  for (const MultiIndex& I : P.indices()) {
    int na = A->cell_count(I);
    int nb = B->cell_count(I);
    auto pid = [&](int a, int b) { return a * nb + b; };
    for (size_t f = 0; f < P.shape.arity(); ++f) {
      if (I[f] >= 1)
        for (int i = 0; i <= I[f]; ++i) {
          MultiIndex lo = I.shifted(f, -1);
          int nbl = B->cell_count(lo);
          std::vector<int> t(static_cast<size_t>(na * nb));
          for (int a = 0; a < na; ++a)
            for (int b = 0; b < nb; ++b)
              t[static_cast<size_t>(pid(a, b))] = A->face(I, f, i, a) * nbl + B->face(I, f, i, b);
          P.set_face(I, f, i, std::move(t));
        }
      if (I[f] + 1 <= cap[f])
        for (int i = 0; i <= I[f]; ++i) {
          MultiIndex hi = I.shifted(f, +1);
          int nbh = B->cell_count(hi);
          std::vector<int> t(static_cast<size_t>(na * nb));
          for (int a = 0; a < na; ++a)
            for (int b = 0; b < nb; ++b)
              t[static_cast<size_t>(pid(a, b))] = A->degen(I, f, i, a) * nbh + B->degen(I, f, i, b);
          P.set_degen(I, f, i, std::move(t));
        }
    }
  }
  PSh obj = share(std::move(P));
  ProductResult r{obj, PresheafMap(obj, A), PresheafMap(obj, B)};
  for (const MultiIndex& I : obj->indices()) {
    int na = A->cell_count(I);
    int nb = B->cell_count(I);
    std::vector<int> pa(static_cast<size_t>(na * nb)), pb(static_cast<size_t>(na * nb));
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < nb; ++b) {
        pa[static_cast<size_t>(a * nb + b)] = a;
        pb[static_cast<size_t>(a * nb + b)] = b;
      }
    r.left_leg.set(I, std::move(pa));
    r.right_leg.set(I, std::move(pb));
  }
  return r;
}

int ProductResult::pair_cell(const MultiIndex& I, int a, int b) const {
  int nb = right_leg.target->cell_count(I);
  return a * nb + b;
}

PresheafMap ProductResult::pair(const PresheafMap& qa, const PresheafMap& qb) const {
  if (qa.source.get() != qb.source.get() && !qa.source->same_data(*qb.source))
    throw domain_error("product pair: sources differ");
  PresheafMap m(qa.source, object);
  for (const auto& [I, ca] : qa.components) {
    if (!I.within(object->cap)) continue;
    const auto& cb = qb.components.at(I);
    std::vector<int> t(ca.size());
    for (size_t c = 0; c < ca.size(); ++c) t[c] = pair_cell(I, ca[c], cb[c]);
    m.set(I, std::move(t));
  }
  return m;
}

PresheafMap product_map(const ProductResult& src, const ProductResult& dst, const PresheafMap& f,
                        const PresheafMap& g) {
  PresheafMap m(src.object, dst.object);
  PSh Bs = src.right_leg.target;
  for (const MultiIndex& I : src.object->indices()) {
    if (!I.within(dst.object->cap)) continue;
    int nbs = Bs->cell_count(I);
    int n = src.object->cell_count(I);
    std::vector<int> t(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
      int a = nbs ? c / nbs : 0, b = nbs ? c % nbs : 0;
      t[static_cast<size_t>(c)] = dst.pair_cell(I, f(I, a), g(I, b));
    }
    m.set(I, std::move(t));
  }
  return m;
}

PushoutResult pushout(const Span& span) {
  const PresheafMap& f = span.left;
  const PresheafMap& g = span.right;
  if (f.source.get() != g.source.get() && !f.source->same_data(*g.source))
    throw domain_error("pushout: span legs have different apex");
  PSh C = f.source;
  PSh A = f.target;
  PSh B = g.target;
  std::vector<int> cap = min_cap(min_cap(A->cap, B->cap), C->cap);
  FinitePresheaf P(A->shape, cap);
  P.complete = A->complete && B->complete && C->complete && leq_vec(A->support(), cap) &&
               leq_vec(B->support(), cap) && leq_vec(C->support(), cap);

  std::map<MultiIndex, std::vector<int>> cls;  // (A cells then B cells) -> class id
  std::map<MultiIndex, std::vector<std::pair<int, int>>> reps;  // class -> (side, cell)
  for (const MultiIndex& I : P.indices()) {
    int na = A->cell_count(I);
    int nb = B->cell_count(I);
    UnionFind uf(na + nb);
    for (int c = 0; c < C->cell_count(I); ++c) uf.unite(f(I, c), na + g(I, c));
    // canonical representative: lexicographically least member name
    std::map<int, std::pair<std::string, std::pair<int, int>>> best;
    auto name_of = [&](int u) {
      return u < na ? "l:" + A->cells(I)[static_cast<size_t>(u)] : "r:" + B->cells(I)[static_cast<size_t>(u - na)];
    };
    for (int u = 0; u < na + nb; ++u) {
      int r = uf.find(u);
      std::string nm = name_of(u);
      auto it = best.find(r);
      if (it == best.end() || nm < it->second.first)
        best[r] = {nm, {u < na ? 0 : 1, u < na ? u : u - na}};
    }
    // class ids in order of appearance over (A cells, then B cells)
    std::map<int, int> id_of_root;
    std::vector<int> classes(static_cast<size_t>(na + nb));
    std::vector<std::pair<int, int>> rep_list;
    for (int u = 0; u < na + nb; ++u) {
      int r = uf.find(u);
      if (!id_of_root.count(r)) {
        id_of_root[r] = static_cast<int>(rep_list.size());
        P.add_cell(I, best[r].first);
        rep_list.push_back(best[r].second);
      }
      classes[static_cast<size_t>(u)] = id_of_root[r];
    }
    cls[I] = std::move(classes);
    reps[I] = std::move(rep_list);
  }
  for (const MultiIndex& I : P.indices()) {
    int na = A->cell_count(I);
    const auto& q = cls[I];
    int outn = P.cell_count(I);
    for (size_t fct = 0; fct < P.shape.arity(); ++fct) {
      if (I[fct] >= 1)
        for (int i = 0; i <= I[fct]; ++i) {
          MultiIndex lo = I.shifted(fct, -1);
          const auto& ql = cls[lo];
          int nal = A->cell_count(lo);
          std::vector<int> t(static_cast<size_t>(outn), -1);
          for (size_t u = 0; u < q.size(); ++u) {
            int img = static_cast<int>(u) < na ? A->face(I, fct, i, static_cast<int>(u))
                                               : nal + B->face(I, fct, i, static_cast<int>(u) - na);
            int to = ql[static_cast<size_t>(img)];
            int& slot = t[static_cast<size_t>(q[u])];
            if (slot >= 0 && slot != to) throw domain_error("pushout: inconsistent face on quotient");
            slot = to;
          }
          P.set_face(I, fct, i, std::move(t));
        }
      if (I[fct] + 1 <= cap[fct])
        for (int i = 0; i <= I[fct]; ++i) {
          MultiIndex hi = I.shifted(fct, +1);
          const auto& qh = cls[hi];
          int nah = A->cell_count(hi);
          std::vector<int> t(static_cast<size_t>(outn), -1);
          for (size_t u = 0; u < q.size(); ++u) {
            int img = static_cast<int>(u) < na ? A->degen(I, fct, i, static_cast<int>(u))
                                               : nah + B->degen(I, fct, i, static_cast<int>(u) - na);
            int to = qh[static_cast<size_t>(img)];
            int& slot = t[static_cast<size_t>(q[u])];
            if (slot >= 0 && slot != to) throw domain_error("pushout: inconsistent degeneracy on quotient");
            slot = to;
          }
          P.set_degen(I, fct, i, std::move(t));
        }
    }
  }
  PSh obj = share(std::move(P));
  PushoutResult r;
  r.object = obj;
  r.left_leg = PresheafMap(A, obj);
  r.right_leg = PresheafMap(B, obj);
  for (const MultiIndex& I : obj->indices()) {
    int na = A->cell_count(I);
    int nb = B->cell_count(I);
    const auto& q = cls[I];
    std::vector<int> la(static_cast<size_t>(na)), rb(static_cast<size_t>(nb));
    for (int c = 0; c < na; ++c) la[static_cast<size_t>(c)] = q[static_cast<size_t>(c)];
    for (int c = 0; c < nb; ++c) rb[static_cast<size_t>(c)] = q[static_cast<size_t>(na + c)];
    r.left_leg.set(I, std::move(la));
    r.right_leg.set(I, std::move(rb));
  }
  r.reps_ = std::move(reps);
  return r;
}

PresheafMap PushoutResult::mediate(const PresheafMap& qa, const PresheafMap& qb) const {
  PresheafMap m(object, qa.target);
  for (const auto& [I, rep] : reps_) {
    std::vector<int> t(rep.size());
    for (size_t c = 0; c < rep.size(); ++c)
      t[c] = rep[c].first == 0 ? qa(I, rep[c].second) : qb(I, rep[c].second);
    m.set(I, std::move(t));
  }
  return m;
}

PullbackResult pullback(const Cospan& cospan) {
  const PresheafMap& f = cospan.left;
  const PresheafMap& g = cospan.right;
  if (f.target.get() != g.target.get() && !f.target->same_data(*g.target))
    throw domain_error("pullback: cospan legs have different target");
  PSh A = f.source;
  PSh B = g.source;
  std::vector<int> cap = min_cap(min_cap(A->cap, B->cap), f.target->cap);
  FinitePresheaf P(A->shape, cap);
  P.complete = A->complete && B->complete && f.target->complete &&
               leq_vec(sum_vec(A->support(), B->support()), cap);
  std::map<MultiIndex, std::vector<std::pair<int, int>>> pairs;
  for (const MultiIndex& I : P.indices()) {
    std::vector<std::pair<int, int>> here;
    for (int a = 0; a < A->cell_count(I); ++a)
      for (int b = 0; b < B->cell_count(I); ++b)
        if (f(I, a) == g(I, b)) {
          P.add_cell(I, "(" + A->cells(I)[static_cast<size_t>(a)] + "," + B->cells(I)[static_cast<size_t>(b)] + ")");
          here.emplace_back(a, b);
        }
    pairs[I] = std::move(here);
  }
  auto locate = [&](const MultiIndex& I, int a, int b) {
    const auto& here = pairs[I];
    auto it = std::lower_bound(here.begin(), here.end(), std::make_pair(a, b));
    if (it == here.end() || *it != std::make_pair(a, b)) throw domain_error("pullback: internal pair lookup");
    return static_cast<int>(it - here.begin());
  };
  for (const MultiIndex& I : P.indices()) {
    const auto& here = pairs[I];
    for (size_t fct = 0; fct < P.shape.arity(); ++fct) {
      if (I[fct] >= 1)
        for (int i = 0; i <= I[fct]; ++i) {
          std::vector<int> t;
          t.reserve(here.size());
          for (const auto& [a, b] : here)
            t.push_back(locate(I.shifted(fct, -1), A->face(I, fct, i, a), B->face(I, fct, i, b)));
          P.set_face(I, fct, i, std::move(t));
        }
      if (I[fct] + 1 <= cap[fct])
        for (int i = 0; i <= I[fct]; ++i) {
          std::vector<int> t;
          t.reserve(here.size());
          for (const auto& [a, b] : here)
            t.push_back(locate(I.shifted(fct, +1), A->degen(I, fct, i, a), B->degen(I, fct, i, b)));
          P.set_degen(I, fct, i, std::move(t));
        }
    }
  }
  PSh obj = share(std::move(P));
  PullbackResult r;
  r.object = obj;
  r.left_leg = PresheafMap(obj, A);
  r.right_leg = PresheafMap(obj, B);
  for (const MultiIndex& I : obj->indices()) {
    const auto& here = pairs[I];
    std::vector<int> la, rb;
    la.reserve(here.size());
    rb.reserve(here.size());
    for (const auto& [a, b] : here) {
      la.push_back(a);
      rb.push_back(b);
    }
    r.left_leg.set(I, std::move(la));
    r.right_leg.set(I, std::move(rb));
  }
  r.pairs_ = std::move(pairs);
  return r;
}

PresheafMap PullbackResult::mediate(const PresheafMap& qa, const PresheafMap& qb) const {
  PresheafMap m(qa.source, object);
  for (const auto& [I, here] : pairs_) {
    int n = static_cast<int>(qa.components.at(I).size());
    std::vector<int> t(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
      std::pair<int, int> want{qa(I, c), qb(I, c)};
      auto it = std::lower_bound(here.begin(), here.end(), want);
      if (it == here.end() || *it != want) throw domain_error("pullback mediate: cone does not factor");
      t[static_cast<size_t>(c)] = static_cast<int>(it - here.begin());
    }
    m.set(I, std::move(t));
  }
  return m;
}

}  // namespace infcat
