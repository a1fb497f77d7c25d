#include "infcat/shape.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace infcat {

std::uint64_t Budget::default_nodes() {
  static std::uint64_t cached = [] {
    if (const char* env = std::getenv("INFCAT_BUDGET")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t{20'000'000};
  }();
  return cached;
}

Budget& Budget::global() {
  static Budget b;
  return b;
}

SimplexMap::SimplexMap(int src, int dst, std::vector<int> vals)
    : source_rank(src), target_rank(dst), values(std::move(vals)) {
  if (src < 0 || dst < 0 || values.size() != static_cast<size_t>(src) + 1)
    throw domain_error("SimplexMap: bad rank/value-list length");
  int prev = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    int v = values[i];
    if (v < 0 || v > dst) throw domain_error("SimplexMap: value out of range");
    if (i > 0 && v < prev) throw domain_error("SimplexMap: values not monotone");
    prev = v;
  }
}

SimplexMap SimplexMap::identity(int rank) {
  std::vector<int> v(static_cast<size_t>(rank) + 1);
  for (int i = 0; i <= rank; ++i) v[static_cast<size_t>(i)] = i;
  return SimplexMap(rank, rank, std::move(v));
}

SimplexMap SimplexMap::coface(int rank, int i) {
  if (rank < 1 || i < 0 || i > rank) throw domain_error("coface: bad index");
  std::vector<int> v;
  v.reserve(static_cast<size_t>(rank));
  for (int j = 0; j <= rank; ++j)
    if (j != i) v.push_back(j);
  return SimplexMap(rank - 1, rank, std::move(v));
}

SimplexMap SimplexMap::codegeneracy(int rank, int i) {
  if (rank < 0 || i < 0 || i > rank) throw domain_error("codegeneracy: bad index");
  std::vector<int> v;
  v.reserve(static_cast<size_t>(rank) + 2);
  for (int j = 0; j <= rank + 1; ++j) v.push_back(j <= i ? j : j - 1);
  return SimplexMap(rank + 1, rank, std::move(v));
}

SimplexMap SimplexMap::vertex(int rank, int v) { return SimplexMap(0, rank, {v}); }

SimplexMap SimplexMap::constant(int src, int dst, int v) {
  return SimplexMap(src, dst, std::vector<int>(static_cast<size_t>(src) + 1, v));
}

bool SimplexMap::is_identity() const {
  if (source_rank != target_rank) return false;
  for (int i = 0; i <= source_rank; ++i)
    if (values[static_cast<size_t>(i)] != i) return false;
  return true;
}

bool SimplexMap::is_mono() const {
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] == values[i - 1]) return false;
  return true;
}

bool SimplexMap::is_epi() const {
  int next = 0;
  for (int v : values) {
    if (v == next) ++next;
    else if (v > next) return false;
  }
  return next == target_rank + 1;
}

std::string SimplexMap::str() const {
  std::ostringstream os;
  os << "[" << source_rank << "->" << target_rank << ":";
  for (size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
  os << "]";
  return os.str();
}

SimplexMap compose(const SimplexMap& f, const SimplexMap& g) {
  if (f.target_rank != g.source_rank) throw domain_error("compose: rank mismatch");
  std::vector<int> v(f.values.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = g.values[static_cast<size_t>(f.values[i])];
  return SimplexMap(f.source_rank, g.target_rank, std::move(v));
}

std::pair<SimplexMap, SimplexMap> epi_mono_factor(const SimplexMap& f) {
  std::vector<int> image;
  for (int v : f.values)
    if (image.empty() || image.back() != v) image.push_back(v);
  int mid = static_cast<int>(image.size()) - 1;
  std::vector<int> epi(f.values.size());
  for (size_t i = 0; i < f.values.size(); ++i) {
    size_t pos = static_cast<size_t>(std::lower_bound(image.begin(), image.end(), f.values[i]) - image.begin());
    epi[i] = static_cast<int>(pos);
  }
  return {SimplexMap(f.source_rank, mid, std::move(epi)), SimplexMap(mid, f.target_rank, std::move(image))};
}

const char* factor_kind_name(FactorKind k) {
  switch (k) {
    case FactorKind::OuterDelta: return "outer";
    case FactorKind::ThetaZero: return "theta0";
    case FactorKind::ThetaOneDelta: return "theta1";
    case FactorKind::InnerDelta: return "inner";
  }
  return "?";
}

FactorKind factor_kind_from_name(const std::string& name) {
  if (name == "outer") return FactorKind::OuterDelta;
  if (name == "theta0") return FactorKind::ThetaZero;
  if (name == "theta1") return FactorKind::ThetaOneDelta;
  if (name == "inner") return FactorKind::InnerDelta;
  throw domain_error("unknown factor kind: " + name);
}

int IndexShape::outer_factor() const {
  for (size_t f = 0; f < factors.size(); ++f)
    if (factors[f] == FactorKind::OuterDelta) return static_cast<int>(f);
  return -1;
}

IndexShape IndexShape::theta_shape() const {
  IndexShape s;
  for (FactorKind k : factors)
    if (k != FactorKind::OuterDelta) s.factors.push_back(k);
  return s;
}

std::string IndexShape::str() const {
  std::string s = "[";
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) s += ",";
    s += factor_kind_name(factors[i]);
  }
  return s + "]";
}

int MultiIndex::total() const {
  int t = 0;
  for (int c : coords) t += c;
  return t;
}

MultiIndex MultiIndex::shifted(size_t f, int delta) const {
  MultiIndex r = *this;
  r.coords[f] += delta;
  return r;
}

bool MultiIndex::within(const std::vector<int>& cap) const {
  if (coords.size() != cap.size()) return false;
  for (size_t f = 0; f < coords.size(); ++f)
    if (coords[f] < 0 || coords[f] > cap[f]) return false;
  return true;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coords[i]);
  }
  return s + ")";
}

MultiIndex MultiIndex::parse(const std::string& s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw domain_error("MultiIndex: bad literal " + s);
  MultiIndex r;
  std::string body = s.substr(1, s.size() - 2);
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) r.coords.push_back(std::stoi(tok));
  return r;
}

MultiIndex MultiMap::source() const {
  MultiIndex r;
  for (const auto& p : parts) r.coords.push_back(p.source_rank);
  return r;
}

MultiIndex MultiMap::target() const {
  MultiIndex r;
  for (const auto& p : parts) r.coords.push_back(p.target_rank);
  return r;
}

MultiMap MultiMap::identity(const MultiIndex& at) {
  MultiMap m;
  for (int c : at.coords) m.parts.push_back(SimplexMap::identity(c));
  return m;
}

MultiMap MultiMap::generator_coface(const MultiIndex& at, size_t f, int i) {
  MultiMap m = identity(at);
  m.parts[f] = SimplexMap::coface(at[f], i);
  return m;
}

MultiMap MultiMap::generator_codegeneracy(const MultiIndex& at, size_t f, int i) {
  // The codegeneracy with source rank at[f]: a map at -> at - e_f.
  MultiMap m = identity(at);
  m.parts[f] = SimplexMap::codegeneracy(at[f] - 1, i);
  return m;
}

MultiMap compose(const MultiMap& f, const MultiMap& g) {
  if (f.parts.size() != g.parts.size()) throw domain_error("compose(MultiMap): arity mismatch");
  MultiMap r;
  for (size_t i = 0; i < f.parts.size(); ++i) r.parts.push_back(compose(f.parts[i], g.parts[i]));
  return r;
}

std::vector<SimplexMap> all_monotone(int src, int dst) {
  std::vector<SimplexMap> out;
  std::vector<int> cur(static_cast<size_t>(src) + 1, 0);
  while (true) {
    out.emplace_back(src, dst, cur);
    int i = src;
    while (i >= 0 && cur[static_cast<size_t>(i)] == dst) --i;
    if (i < 0) break;
    int v = ++cur[static_cast<size_t>(i)];
    for (int j = i + 1; j <= src; ++j) cur[static_cast<size_t>(j)] = v;
  }
  return out;
}

std::vector<MultiMap> all_multimaps(const MultiIndex& src, const MultiIndex& dst) {
  if (src.size() != dst.size()) throw domain_error("all_multimaps: arity mismatch");
  std::vector<MultiMap> out{MultiMap{}};
  for (size_t f = 0; f < src.size(); ++f) {
    auto part = all_monotone(src[f], dst[f]);
    std::vector<MultiMap> next;
    next.reserve(out.size() * part.size());
    for (const auto& m : out)
      for (const auto& p : part) {
        MultiMap n = m;
        n.parts.push_back(p);
        next.push_back(std::move(n));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace infcat
