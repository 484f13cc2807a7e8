#pragma once

// Brute-force verifiers. Nothing here calls into the light spanner's search
// code or the sparse spanner's incremental machinery; they only read state.

#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "hierarchy.hpp"
#include "light_spanner.hpp"
#include "sparse_spanner.hpp"

namespace dynspan::oracle {

struct StretchResult {
  double max_ratio = 1.0;
  std::optional<PointPair> witness;
};

// Exact stretch of `edges` over all pairs of alive points, by Dijkstra from
// every source. kInf when the graph is disconnected.
inline StretchResult exact_stretch(const PointStore& pts, const std::vector<PointPair>& edges) {
  const std::vector<PointId> ids = pts.sorted_alive_ids();
  const std::size_t n = ids.size();
  if (n < 2) throw Error(Errc::precondition, "stretch needs at least two points");
  std::map<PointId, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[ids[i]] = i;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const PointPair& e : edges) {
    const std::size_t a = pos.at(e.a), b = pos.at(e.b);
    const double w = pts.distance(e.a, e.b);
    adj[a].emplace_back(b, w);
    adj[b].emplace_back(a, w);
  }
  StretchResult res;
  std::vector<double> dist(n);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    dist[s] = 0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [d, x] = pq.top();
      pq.pop();
      if (d > dist[x]) continue;
      for (auto [y, w] : adj[x])
        if (d + w < dist[y]) pq.emplace(dist[y] = d + w, y);
    }
    for (std::size_t t = s + 1; t < n; ++t) {
      const double r = dist[t] / pts.distance(ids[s], ids[t]);
      if (!res.witness || r > res.max_ratio) {
        res.max_ratio = r;
        res.witness = PointPair(ids[s], ids[t]);
      }
    }
  }
  return res;
}

// Euclidean MST weight, Prim on the complete graph.
inline double mst_weight(const PointStore& pts) {
  const std::vector<PointId> ids = pts.sorted_alive_ids();
  const std::size_t n = ids.size();
  if (n == 0) throw Error(Errc::precondition, "MST of an empty point set");
  std::vector<double> best(n, kInf);
  std::vector<char> in(n, 0);
  best[0] = 0;
  double total = 0;
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t x = n;
    for (std::size_t j = 0; j < n; ++j)
      if (!in[j] && (x == n || best[j] < best[x])) x = j;
    in[x] = 1;
    total += best[x];
    for (std::size_t j = 0; j < n; ++j)
      if (!in[j]) best[j] = std::min(best[j], pts.distance(ids[x], ids[j]));
  }
  return total;
}

inline double aspect_ratio(const PointStore& pts) {
  const std::vector<PointId> ids = pts.sorted_alive_ids();
  if (ids.size() < 2) throw Error(Errc::precondition, "aspect ratio needs at least two points");
  double lo = kInf, hi = 0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const double d = pts.distance(ids[i], ids[j]);
      if (d == 0) throw Error(Errc::identical_points, "duplicate points");
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  return hi / lo;
}

struct SeparationViolation {
  int level = 0;
  PointPair pair;
  double dist = 0;
};

// Same-level centers at level j must be more than R^j apart. Two chains share
// every level up to the lower of their tops, and the requirement is strongest
// at that top level.
inline std::vector<SeparationViolation> verify_separation(const Hierarchy& h) {
  std::vector<SeparationViolation> out;
  const PointStore& pts = h.points();
  const auto& ms = h.members();
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const double d = pts.distance(ms[i], ms[j]);
      const int top = std::min(h.chain_top_level(ms[i]), h.chain_top_level(ms[j]));
      if (!(d > std::pow(h.R(), top))) out.push_back({top, PointPair(ms[i], ms[j]), d});
    }
  return out;
}

struct TreeViolation {
  PointId child{};
  std::string what;
};

// Parent covers child and sits one level up; exactly one parentless chain.
inline std::vector<TreeViolation> verify_tree(const Hierarchy& h) {
  std::vector<TreeViolation> out;
  std::size_t roots = 0;
  for (PointId p : h.members()) {
    const auto par = h.parent(p);
    if (!par) {
      ++roots;
      if (h.root() != p) out.push_back({p, "parentless chain is not the root"});
      continue;
    }
    if (!h.contains(*par)) {
      out.push_back({p, "parent not in hierarchy"});
      continue;
    }
    const int l = h.chain_top_level(p) + 1;
    if (h.chain_top_level(*par) < l) out.push_back({p, "parent chain does not reach the parent level"});
    if (h.points().distance(p, *par) > std::pow(h.R(), l)) out.push_back({p, "parent does not cover child"});
  }
  if (!h.empty() && roots != 1) out.push_back({PointId{}, "expected exactly one root"});
  return out;
}

// ---------------------------------------------------------------------------
// Sparse spanner reference
// ---------------------------------------------------------------------------

struct SparseReference {
  std::map<PointPair, int> s1;
  std::set<PointPair> potential;
  // Representative per (center, level) for every level from the lowest contact
  // block up to the chain top.
  std::map<std::pair<PointId, int>, PointId> rep;
};

// Rebuilds S1 from the hierarchy alone.
inline SparseReference rebuild_sparse(const Config& cfg, const Hierarchy& h) {
  const PointStore& pts = h.points();
  const auto& ms = h.members();
  const int B = cfg.block_len;
  auto block = [&](int l) { return static_cast<int>(std::floor(static_cast<double>(l) / B)); };

  // Contact levels per pair.
  std::map<PointPair, std::pair<int, int>> contact;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const double x = pts.distance(ms[i], ms[j]) / cfg.lambda;
      int l = static_cast<int>(std::floor(std::log(x) / std::log(cfg.R))) - 2;
      while (std::pow(cfg.R, l) < x) ++l;
      const int hi = std::min(h.chain_top_level(ms[i]), h.chain_top_level(ms[j]));
      if (l <= hi) contact[PointPair(ms[i], ms[j])] = {l, hi};
    }

  // Witness per (chain, block): neighbor with the smallest (level, id).
  std::map<PointId, std::map<int, std::pair<int, PointId>>> wit;
  for (const auto& [e, iv] : contact)
    for (int l = iv.first; l <= iv.second; ++l)
      for (auto [p, q] : {std::pair(e.a, e.b), std::pair(e.b, e.a)}) {
        auto& slot = wit[p];
        auto it = slot.find(block(l));
        if (it == slot.end() || std::pair(l, q) < it->second) slot[block(l)] = {l, q};
      }

  SparseReference ref;
  auto rep = [&](PointId p, int l) -> PointId {
    auto w = wit.find(p);
    if (w == wit.end()) return p;
    const int b = block(l);
    if (!w->second.contains(b)) return p;
    for (int lower = b - 2;; lower -= 2) {
      if (lower < w->second.begin()->first) return p;
      if (auto it = w->second.find(lower); it != w->second.end()) return it->second.second;
    }
  };
  for (PointId p : ms) {
    const int top = h.chain_top_level(p);
    int from = top;
    if (auto w = wit.find(p); w != wit.end()) from = std::min(top, w->second.begin()->first * B);
    for (int l = from; l <= top; ++l) ref.rep[{p, l}] = rep(p, l);
  }

  // (group, bucket index) -> (level, kind, pair) of the lowest mapped edge.
  std::map<std::pair<PointPair, std::int64_t>, std::tuple<int, int, PointPair>> lowest;
  auto emit = [&](PointPair group, int kind, int level, PointId x, PointId y) {
    if (x == y) return;
    const PointPair e(x, y);
    ++ref.s1[e];
    const std::int64_t i = bucket_of_length(pts.distance(x, y), cfg.c, cfg.k).index;
    const auto cand = std::tuple(level, kind, e);
    auto [it, fresh] = lowest.try_emplace({group, i}, cand);
    if (!fresh && cand < it->second) it->second = cand;
  };
  for (const auto& [e, iv] : contact)
    for (int l = iv.first; l <= iv.second; ++l) emit(e, 0, l, rep(e.a, l), rep(e.b, l));
  for (PointId p : ms) {
    const int top = h.chain_top_level(p);
    if (auto par = h.parent(p)) emit(PointPair(p, *par), 1, top, rep(p, top), rep(*par, top + 1));
    auto w = wit.find(p);
    if (w == wit.end()) continue;
    for (int l = w->second.begin()->first * B + 1; l <= top; ++l)
      if (block(l) != block(l - 1)) emit(PointPair(p, p), 2, l, rep(p, l), rep(p, l - 1));
  }
  for (const auto& [k, v] : lowest) ref.potential.insert(std::get<2>(v));
  return ref;
}

struct RepViolation {
  PointId center{};
  int level = 0;
  PointId rep{};
  std::string what;
};

// Validity and order of the representative assignment, using the reference
// representatives. Self representation is exempt from the level condition.
inline std::vector<RepViolation> verify_representatives(const Hierarchy& h, const SparseReference& ref) {
  std::vector<RepViolation> out;
  const PointStore& pts = h.points();
  for (const auto& [key, q] : ref.rep) {
    const auto [p, l] = key;
    if (q == p) continue;
    if (!h.contains(q)) {
      out.push_back({p, l, q, "representative not in hierarchy"});
      continue;
    }
    if (h.chain_top_level(q) > l) out.push_back({p, l, q, "representative chain is taller than the level"});
    if (pts.distance(p, q) > std::pow(h.R(), l)) out.push_back({p, l, q, "representative too far"});
    if (!(h.chain_top_level(q) < h.chain_top_level(p))) out.push_back({p, l, q, "representative not strictly lower"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Light spanner reference
// ---------------------------------------------------------------------------

// d_i*(u,v) by Floyd-Warshall over the points that can lie on a path of cost
// at most cap; kInf above cap.
inline double reference_dstar(const Config& cfg, const PointStore& pts, const LightSpanner& ls, std::int64_t i,
                              PointId u, PointId v, double cap) {
  const double duv = pts.distance(u, v);
  const std::int64_t s = bucket_of_length(duv, cfg.c, cfg.k).size;
  std::vector<PointId> cand;
  for (PointId x : pts.sorted_alive_ids())
    if (pts.distance(u, x) + pts.distance(x, v) <= cap) cand.push_back(x);
  const std::size_t m = cand.size();
  std::vector<double> D(m * m, kInf);
  for (std::size_t a = 0; a < m; ++a) {
    D[a * m + a] = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const double len = pts.distance(cand[a], cand[b]);
      if (bucket_of_length(len, cfg.c, cfg.k).size >= s) continue;
      const PointPair e(cand[a], cand[b]);
      const bool in = ls.registered(e) && ls.entry(e).member && ls.entry(e).coord.index == i;
      D[a * m + b] = in ? len : (1.0 + cfg.eps) * len;
    }
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        D[a * m + b] = std::min(D[a * m + b], D[a * m + k] + D[k * m + b]);
  const auto ia = std::find(cand.begin(), cand.end(), u) - cand.begin();
  const auto ib = std::find(cand.begin(), cand.end(), v) - cand.begin();
  const double r = D[static_cast<std::size_t>(ia) * m + static_cast<std::size_t>(ib)];
  return r <= cap ? r : kInf;
}

// Classifies every registered pair with the reference d*. Thresholds and tie
// handling follow the invariant definitions.
inline std::vector<Violation> verify_invariants(const Config& cfg, const PointStore& pts, const LightSpanner& ls) {
  std::vector<Violation> out;
  for (PointPair e : ls.registered_pairs()) {
    const auto& x = ls.entry(e);
    const double d = pts.distance(e.a, e.b);
    const double ds = reference_dstar(cfg, pts, ls, x.coord.index, e.a, e.b, (1.0 + cfg.eps) * d * (1.0 + 1e-9));
    if (x.member && ds < (1.0 + cfg.eps_prime) * d * (1.0 - 1e-9))
      out.push_back({Violation::Kind::inv2, e, x.coord.index, ds, d});
    if (!x.member && ds == kInf) out.push_back({Violation::Kind::inv1, e, x.coord.index, ds, d});
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tuple(a.kind, a.index, a.pair) < std::tuple(b.kind, b.index, b.pair);
  });
  return out;
}

// Exhaustive search over simple paths of usable pairs; n <= 12.
inline double brute_dstar(const Config& cfg, const PointStore& pts, const LightSpanner& ls, std::int64_t i,
                          PointId u, PointId v) {
  const std::vector<PointId> ids = pts.sorted_alive_ids();
  if (ids.size() > 12) throw Error(Errc::instance_too_large, "brute_dstar is limited to 12 points");
  if (u == v) throw Error(Errc::identical_points, "brute_dstar of a point with itself");
  const std::int64_t s = bucket_of_length(pts.distance(u, v), cfg.c, cfg.k).size;
  double best = kInf;
  std::vector<char> used(idx(ids.back()) + 1, 0);
  auto dfs = [&](auto&& self, PointId x, double acc) -> void {
    if (x == v) {
      best = std::min(best, acc);
      return;
    }
    used[idx(x)] = 1;
    for (PointId y : ids) {
      if (used[idx(y)]) continue;
      const double len = pts.distance(x, y);
      if (bucket_of_length(len, cfg.c, cfg.k).size >= s) continue;
      const PointPair e(x, y);
      const bool in = ls.registered(e) && ls.entry(e).member && ls.entry(e).coord.index == i;
      self(self, y, acc + (in ? len : (1.0 + cfg.eps) * len));
    }
    used[idx(x)] = 0;
  };
  dfs(dfs, u, 0.0);
  return best;
}

// Classic greedy t-spanner.
inline std::vector<PointPair> greedy_spanner(const PointStore& pts, double t) {
  if (!(t > 1)) throw Error(Errc::invalid_argument, "greedy spanner needs t > 1");
  const std::vector<PointId> ids = pts.sorted_alive_ids();
  const std::size_t n = ids.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(pts.distance(ids[i], ids[j]), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> seen;
  std::vector<PointPair> out;
  using Item = std::pair<double, std::size_t>;
  for (const auto& [d, a, b] : pairs) {
    const double bound = t * d;
    const auto xb = pts.coords(ids[b]);
    // Dijkstra from a, pruned by the straight-line distance to b.
    for (std::size_t x : seen) dist[x] = kInf;
    seen.clear();
    dist[a] = 0;
    seen.push_back(a);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, a);
    bool reached = false;
    while (!pq.empty()) {
      auto [dx, x] = pq.top();
      pq.pop();
      if (dx > dist[x]) continue;
      if (x == b) {
        reached = true;
        break;
      }
      for (auto [y, w] : adj[x]) {
        const double nd = dx + w;
        if (nd < dist[y] && nd + pts.distance_to(xb, ids[y]) <= bound) {
          if (dist[y] == kInf) seen.push_back(y);
          dist[y] = nd;
          pq.emplace(nd, y);
        }
      }
    }
    if (!reached) {
      adj[a].emplace_back(b, d);
      adj[b].emplace_back(a, d);
      out.emplace_back(ids[a], ids[b]);
    }
  }
  return out;
}

inline double edge_weight(const PointStore& pts, const std::vector<PointPair>& edges) {
  double w = 0;
  for (const PointPair& e : edges) w += pts.distance(e.a, e.b);
  return w;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct VerificationReport {
  std::size_t op_seq = 0;
  std::size_t n = 0;
  double max_stretch = 1.0;
  std::optional<PointPair> stretch_witness;
  double s1_max_stretch = 1.0;
  double mst_weight = 0;
  double spanner_weight = 0;
  double lightness = 0;
  std::size_t max_degree = 0;
  std::size_t max_repetition = 0;
  std::vector<SeparationViolation> separation_violations;
  std::vector<TreeViolation> tree_violations;
  std::vector<RepViolation> rep_violations;
  std::vector<Violation> invariant_violations;
  bool sparse_matches_rebuild = true;
  bool invariants_match_check = true;

  // Pass/fail against the configured stretch target and degree and
  // repetition bounds.
  bool clean(const Config& cfg) const {
    return separation_violations.empty() && tree_violations.empty() && rep_violations.empty() &&
           invariant_violations.empty() && sparse_matches_rebuild && invariants_match_check &&
           max_stretch <= 1.0 + cfg.eps_target + 1e-9 && static_cast<double>(max_degree) <= cfg.d_max &&
           static_cast<double>(max_repetition) <= cfg.rep_bound;
  }
};

inline nlohmann::json real_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

inline nlohmann::json to_json(const VerificationReport& r) {
  using nlohmann::json;
  json j;
  j["op_seq"] = r.op_seq;
  j["n"] = r.n;
  j["max_stretch"] = real_json(r.max_stretch);
  j["stretch_witness"] =
      r.stretch_witness ? json::array({idx(r.stretch_witness->a), idx(r.stretch_witness->b)}) : json(nullptr);
  j["s1_max_stretch"] = real_json(r.s1_max_stretch);
  j["mst_weight"] = r.mst_weight;
  j["spanner_weight"] = r.spanner_weight;
  j["lightness"] = real_json(r.lightness);
  j["max_degree"] = r.max_degree;
  j["max_repetition"] = r.max_repetition;
  json sep = json::array();
  for (const auto& v : r.separation_violations)
    sep.push_back({{"level", v.level}, {"a", idx(v.pair.a)}, {"b", idx(v.pair.b)}, {"dist", v.dist}});
  j["separation_violations"] = sep;
  json tree = json::array();
  for (const auto& v : r.tree_violations) tree.push_back({{"child", idx(v.child)}, {"what", v.what}});
  j["tree_violations"] = tree;
  json reps = json::array();
  for (const auto& v : r.rep_violations)
    reps.push_back({{"center", idx(v.center)}, {"level", v.level}, {"rep", idx(v.rep)}, {"what", v.what}});
  j["rep_violations"] = reps;
  json inv = json::array();
  for (const auto& v : r.invariant_violations)
    inv.push_back({{"kind", to_string(v.kind)},
                   {"index", v.index},
                   {"a", idx(v.pair.a)},
                   {"b", idx(v.pair.b)},
                   {"dstar", real_json(v.dstar)},
                   {"dist", v.dist}});
  j["invariant_violations"] = inv;
  j["sparse_matches_rebuild"] = r.sparse_matches_rebuild;
  j["invariants_match_check"] = r.invariants_match_check;
  return j;
}

}  // namespace dynspan::oracle
