#pragma once

// Bucketed light spanner on top of the potential pairs of S1.
//
// Bucket S_i holds the member pairs of index i. Invariant 1 asks every
// non-member potential pair to have an extended path shorter than
// (1+eps)·d; Invariant 2 asks every member to have none of length
// (1+eps')·d or less. Extended paths only use pairs of strictly smaller size,
// so edits at size s can only disturb pairs of larger size in the same bucket.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "sparse_spanner.hpp"

namespace dynspan {

inline constexpr double kTieTol = 1e-9;

struct Violation {
  enum class Kind { inv1, inv2 };
  Kind kind{};
  PointPair pair;
  std::int64_t index = 0;
  double dstar = kInf;
  double dist = 0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline const char* to_string(Violation::Kind k) { return k == Violation::Kind::inv1 ? "Inv1" : "Inv2"; }

// `viol <Inv1|Inv2> <i> <a> <b> <dstar> <dist>` per violation.
inline std::string format_violations(const std::vector<Violation>& vs) {
  std::ostringstream os;
  os.precision(17);
  for (const Violation& v : vs)
    os << "viol " << to_string(v.kind) << ' ' << v.index << ' ' << idx(v.pair.a) << ' ' << idx(v.pair.b) << ' '
       << (std::isinf(v.dstar) ? std::string("inf") : (std::ostringstream() << std::setprecision(17) << v.dstar).str())
       << ' ' << v.dist << '\n';
  return os.str();
}

struct LightEvent {
  enum class Kind { add, remove, transfer };
  Kind kind{};
  PointPair pair;
  std::int64_t index = 0;
  PointPair from;  // transfer only
};

struct PhiStep {
  std::int64_t index = 0;
  double before = 0;
  double after = 0;
};

struct MaintenanceSummary {
  std::size_t events = 0;
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<PhiStep> phi_trace;  // filled when potential tracing is on
  std::vector<LightEvent> log;
};

struct PotentialReport {
  std::map<std::int64_t, double> phi_i;
  double phi = 0;
  double degree_slack = 0;
  double phi_star = 0;
  std::size_t clamped = 0;  // pairs whose d* hit the diagnostic radius
};

class LightSpanner {
 public:
  struct Entry {
    BucketCoord coord;
    double length = 0;
    bool member = false;
  };

  LightSpanner(const Config& cfg, const PointStore& pts) : cfg_(&cfg), pts_(&pts) {}

  // ---- registry --------------------------------------------------------

  // Registers a potential pair; used by the update hooks and by fixtures.
  void register_pair(const PotentialPair& p, bool member) {
    if (registry_.contains(p.pair)) throw Error(Errc::precondition, "pair already registered");
    registry_[p.pair] = {p.coord, p.length, false};
    by_level_[{p.coord.index, p.coord.size}].insert(p.pair);
    if (member) set_member(p.pair, true);
    dirty_.insert(key(p.pair));
  }

  void unregister_pair(PointPair e) {
    auto it = registry_.find(e);
    if (it == registry_.end()) throw Error(Errc::precondition, "pair not registered");
    if (it->second.member) set_member(e, false);
    const BucketCoord bc = it->second.coord;
    dirty_.erase(key(e));
    by_level_[{bc.index, bc.size}].erase(e);
    registry_.erase(it);
  }

  bool registered(PointPair e) const { return registry_.contains(e); }
  bool is_member(PointPair e) const {
    auto it = registry_.find(e);
    return it != registry_.end() && it->second.member;
  }
  const Entry& entry(PointPair e) const {
    auto it = registry_.find(e);
    if (it == registry_.end()) throw Error(Errc::precondition, "pair not registered");
    return it->second;
  }
  std::size_t registry_size() const noexcept { return registry_.size(); }

  std::vector<PointPair> registered_pairs() const {
    std::vector<PointPair> out;
    for (const auto& [e, x] : registry_) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
  }

  // All members across buckets, sorted.
  std::vector<PointPair> members() const {
    std::vector<PointPair> out;
    for (const auto& [e, x] : registry_)
      if (x.member) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
  }

  double weight() const {
    double w = 0;
    for (const auto& [e, x] : registry_)
      if (x.member) w += x.length;
    return w;
  }

  // ---- extended-path distance ------------------------------------------

  // Shortest extended path in bucket i between u and v, or kInf when none is
  // at most `cap` long.
  double d_star(std::int64_t i, PointId u, PointId v, double cap) const {
    pts_->require_alive(u);
    pts_->require_alive(v);
    if (u == v) throw Error(Errc::identical_points, "d_star of a point with itself");
    const std::int64_t s = bucket_of_length(pts_->distance(u, v), cfg_->c, cfg_->k).size;
    // Lengths clearly off c^(k·s) skip the logarithm.
    const double bound = std::pow(cfg_->c, static_cast<double>(cfg_->k * s));
    const double lo_bound = bound * (1.0 - 1e-6), hi_bound = bound * (1.0 + 1e-6);
    auto smaller = [&](double len) {
      if (len < lo_bound) return true;
      if (len > hi_bound) return false;
      return bucket_of_length(len, cfg_->c, cfg_->k).size < s;
    };

    // Any path through x is at least |ux| + |xv| long.
    const int dim = pts_->dim();
    const auto xu = pts_->coords(u);
    const auto xv = pts_->coords(v);
    std::vector<PointId> cand;
    std::vector<double> to_v, cc;
    for (PointId x : pts_->alive_ids()) {
      const double a = pts_->distance_to(xu, x);
      if (a > cap) continue;
      const double b = pts_->distance_to(xv, x);
      if (a + b <= cap) {
        cand.push_back(x);
        to_v.push_back(b);
        const auto cx = pts_->coords(x);
        cc.insert(cc.end(), cx.begin(), cx.end());
      }
    }
    const std::size_t m = cand.size();
    if (pos_.size() < pts_->capacity()) pos_.resize(pts_->capacity(), -1);
    for (std::size_t j = 0; j < m; ++j) pos_[idx(cand[j])] = static_cast<std::ptrdiff_t>(j);

    std::vector<double> dist(m, kInf);
    std::vector<char> done(m, 0), member(m, 0);
    const std::size_t src = static_cast<std::size_t>(pos_[idx(u)]);
    const std::size_t dst = static_cast<std::size_t>(pos_[idx(v)]);
    const double slow = 1.0 + cfg_->eps;
    dist[src] = 0;
    for (std::size_t round = 0; round < m; ++round) {
      // A*: |yv| never overestimates, every pair weighs at least its length.
      std::size_t x = m;
      for (std::size_t j = 0; j < m; ++j)
        if (!done[j] && dist[j] < kInf && (x == m || dist[j] + to_v[j] < dist[x] + to_v[x])) x = j;
      if (x == m || x == dst || dist[x] + to_v[x] > cap) break;
      done[x] = 1;
      std::vector<std::size_t> marked;
      if (idx(cand[x]) < adj_.size())
        for (const auto& [y, bi] : adj_[idx(cand[x])]) {
          if (bi != i || idx(y) >= pos_.size() || pos_[idx(y)] < 0) continue;
          const auto py = static_cast<std::size_t>(pos_[idx(y)]);
          member[py] = 1;
          marked.push_back(py);
        }
      const double* px = cc.data() + x * dim;
      for (std::size_t y = 0; y < m; ++y) {
        if (done[y]) continue;
        const double* py = cc.data() + y * dim;
        double sq = 0;
        for (int a = 0; a < dim; ++a) {
          const double t = px[a] - py[a];
          sq += t * t;
        }
        const double len = std::sqrt(sq);
        if (dist[x] + len + to_v[y] > cap) continue;
        if (!smaller(len)) continue;
        const double w = member[y] ? len : slow * len;
        if (dist[x] + w < dist[y]) dist[y] = dist[x] + w;
      }
      for (std::size_t py : marked) member[py] = 0;
    }
    for (PointId x : cand) pos_[idx(x)] = -1;
    return dist[dst] <= cap ? dist[dst] : kInf;
  }

  std::optional<Violation> check_pair(PointPair e) const {
    const Entry& x = entry(e);
    const double d = x.length;
    // Members only care about paths under the Inv2 threshold.
    const double limit = (1.0 + cfg_->eps_prime) * d * (1.0 - kTieTol);
    const double cap = x.member ? limit : (1.0 + cfg_->eps) * d * (1.0 + kTieTol);
    const double ds = d_star(x.coord.index, e.a, e.b, cap);
    if (x.member) {
      if (ds < limit)
        return Violation{Violation::Kind::inv2, e, x.coord.index, ds, d};
    } else if (ds == kInf) {
      return Violation{Violation::Kind::inv1, e, x.coord.index, ds, d};
    }
    return std::nullopt;
  }

  // Every violation among registered pairs, sorted by (kind, index, pair).
  std::vector<Violation> scan() const {
    std::vector<Violation> out;
    for (PointPair e : registered_pairs())
      if (auto v = check_pair(e)) out.push_back(*v);
    std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
      return std::tuple(a.kind, a.index, a.pair) < std::tuple(b.kind, b.index, b.pair);
    });
    return out;
  }

  // ---- fixes -----------------------------------------------------------

  std::vector<LightEvent> fix_inv1(PointPair e) {
    auto v = check_pair(e);
    if (!v || v->kind != Violation::Kind::inv1) throw Error(Errc::precondition, "pair does not violate Inv1");
    set_member(e, true);
    return {{LightEvent::Kind::add, e, v->index, {}}};
  }

  // Edge removal process: drop the pair, then add every pair of the same
  // index and size that violates Invariant 1. Same-size pairs never enter each
  // other's extended paths, so one ordered pass reaches the fixed point.
  std::vector<LightEvent> fix_inv2(PointPair e) {
    auto v = check_pair(e);
    if (!v || v->kind != Violation::Kind::inv2) throw Error(Errc::precondition, "pair does not violate Inv2");
    const BucketCoord bc = registry_.at(e).coord;
    set_member(e, false);
    std::vector<LightEvent> out{{LightEvent::Kind::remove, e, bc.index, {}}};
    for (PointPair f : by_level_[{bc.index, bc.size}]) {
      if (is_member(f)) continue;
      if (auto w = check_pair(f); w && w->kind == Violation::Kind::inv1) {
        set_member(f, true);
        out.push_back({LightEvent::Kind::add, f, bc.index, {}});
      }
    }
    return out;
  }

  // Processes dirty pairs by ascending size. cap = 0 selects the default
  // 50·(events since the last converged state) + 1000.
  MaintenanceSummary run_maintenance(std::size_t cap = 0) {
    MaintenanceSummary sum;
    if (cap == 0) cap = 50 * pending_events_ + 1000;
    while (!dirty_.empty()) {
      const std::int64_t s = std::get<0>(*dirty_.begin());
      std::vector<PointPair> batch;
      while (!dirty_.empty() && std::get<0>(*dirty_.begin()) == s) {
        batch.push_back(std::get<2>(*dirty_.begin()));
        dirty_.erase(dirty_.begin());
      }
      std::vector<PointPair> inv1, inv2;
      for (PointPair e : batch) {
        if (auto v = check_pair(e)) (v->kind == Violation::Kind::inv2 ? inv2 : inv1).push_back(e);
      }
      std::vector<PointPair> todo = inv2;
      todo.insert(todo.end(), inv1.begin(), inv1.end());
      for (std::size_t j = 0; j < todo.size(); ++j) {
        const PointPair e = todo[j];
        const bool second = j < inv2.size();
        if (!second && is_member(e)) continue;  // already added by an edge removal process
        if (sum.iterations >= cap) {
          for (std::size_t r = j; r < todo.size(); ++r) dirty_.insert(key(todo[r]));
          sum.converged = false;
          return sum;
        }
        const std::int64_t i = registry_.at(e).coord.index;
        const double before = trace_ ? phi_bucket(i) : 0.0;
        auto ev = second ? fix_inv2(e) : fix_inv1(e);
        ++sum.iterations;
        sum.events += ev.size();
        sum.log.insert(sum.log.end(), ev.begin(), ev.end());
        pending_events_ += ev.size();
        if (trace_) sum.phi_trace.push_back({i, before, phi_bucket(i)});
      }
    }
    pending_events_ = 0;
    return sum;
  }

  // ---- point updates -----------------------------------------------------

  // After a point insertion: move memberships of reassigned pairs, drop
  // removed pairs, admit new pairs only when they violate Invariant 1.
  std::vector<LightEvent> on_point_inserted(PointId p, const SparseDelta& d) {
    std::vector<LightEvent> out;
    transfer(d, out);
    drop(d, out);
    std::vector<PotentialPair> added = d.pot_added;
    std::sort(added.begin(), added.end(), [](const PotentialPair& a, const PotentialPair& b) {
      return std::tuple(a.coord.size, a.coord.index, a.pair) < std::tuple(b.coord.size, b.coord.index, b.pair);
    });
    for (const PotentialPair& pp : added) register_pair(pp, false);
    for (const PotentialPair& pp : added) {
      if (auto v = check_pair(pp.pair); v && v->kind == Violation::Kind::inv1) {
        set_member(pp.pair, true);
        out.push_back({LightEvent::Kind::add, pp.pair, pp.coord.index, {}});
      }
    }
    touch_point(p);
    pending_events_ += out.size();
    return out;
  }

  // After a point deletion: drop removed pairs, admit every added pair and move
  // memberships of reassigned pairs; maintenance prunes the surplus later.
  std::vector<LightEvent> on_point_deleted(PointId p, const SparseDelta& d) {
    std::vector<LightEvent> out;
    drop(d, out);
    for (const PotentialPair& pp : d.pot_added) {
      register_pair(pp, true);
      out.push_back({LightEvent::Kind::add, pp.pair, pp.coord.index, {}});
    }
    transfer(d, out);
    touch_point(p);
    pending_events_ += out.size();
    return out;
  }

  // ---- diagnostics -------------------------------------------------------

  // Potential p_i of one registered pair with d* evaluated up to
  // radius_factor·d; returns (p_i, clamped).
  std::pair<double, bool> pair_potential(PointPair e, double radius_factor) const {
    const Entry& x = entry(e);
    const double cap = radius_factor * x.length;
    double ds = d_star(x.coord.index, e.a, e.b, cap);
    const bool clamped = ds == kInf;
    if (clamped) ds = cap;
    const double r = ds / x.length;
    const double pi = x.member ? (1.0 + cfg_->eps) - r : cfg_->cphi * (r - (1.0 + cfg_->eps_prime));
    return {pi, clamped};
  }

  PotentialReport potential_report(const std::vector<std::size_t>& degrees) const {
    PotentialReport rep;
    for (const auto& [e, x] : registry_) {
      auto [pi, clamped] = pair_potential(e, radius_factor_);
      rep.phi_i[x.coord.index] += pi;
      rep.phi += pi;
      rep.clamped += clamped;
    }
    for (std::size_t deg : degrees) rep.degree_slack += cfg_->d_max - static_cast<double>(deg);
    rep.degree_slack *= cfg_->p_max / 2.0;
    rep.phi_star = rep.phi + rep.degree_slack;
    return rep;
  }

  double phi_bucket(std::int64_t i) const {
    double phi = 0;
    auto lo = by_level_.lower_bound({i, std::numeric_limits<std::int64_t>::min()});
    for (auto it = lo; it != by_level_.end() && it->first.first == i; ++it)
      for (PointPair e : it->second) phi += pair_potential(e, radius_factor_).first;
    return phi;
  }

  void set_potential_tracing(bool on) noexcept { trace_ = on; }
  void set_diagnostic_radius(double factor) noexcept { radius_factor_ = factor; }
  double diagnostic_radius() const noexcept { return radius_factor_; }

  std::size_t dirty_count() const noexcept { return dirty_.size(); }

  // Marks every registered pair for re-checking.
  void mark_all_dirty() {
    for (const auto& [e, x] : registry_) dirty_.insert(key(e));
  }

  // `bucket <i> <a> <b> <length>` per member, sorted.
  std::string dump() const {
    std::vector<std::tuple<std::int64_t, PointPair, double>> rows;
    for (const auto& [e, x] : registry_)
      if (x.member) rows.emplace_back(x.coord.index, e, x.length);
    std::sort(rows.begin(), rows.end());
    std::ostringstream os;
    os.precision(17);
    for (const auto& [i, e, len] : rows) os << "bucket " << i << ' ' << idx(e.a) << ' ' << idx(e.b) << ' ' << len << '\n';
    return os.str();
  }

 private:
  using DirtyKey = std::tuple<std::int64_t, std::int64_t, PointPair>;  // (size, index, pair)

  DirtyKey key(PointPair e) const {
    const BucketCoord bc = registry_.at(e).coord;
    return {bc.size, bc.index, e};
  }

  bool member_in(std::int64_t i, PointId x, PointId y) const {
    auto it = registry_.find(PointPair(x, y));
    return it != registry_.end() && it->second.member && it->second.coord.index == i;
  }

  // Flips membership and marks the larger pairs of the bucket whose extended
  // paths could route through the pair.
  void set_member(PointPair e, bool on) {
    Entry& x = registry_.at(e);
    if (x.member == on) return;
    x.member = on;
    const std::size_t top = std::max(idx(e.a), idx(e.b));
    if (adj_.size() <= top) adj_.resize(top + 1);
    for (auto [p, q] : {std::pair(e.a, e.b), std::pair(e.b, e.a)}) {
      auto& list = adj_[idx(p)];
      if (on) {
        list.emplace_back(q, x.coord.index);
      } else {
        list.erase(std::find(list.begin(), list.end(), std::pair(q, x.coord.index)));
      }
    }
    auto it = by_level_.upper_bound({x.coord.index, x.coord.size});
    for (; it != by_level_.end() && it->first.first == x.coord.index; ++it) {
      for (PointPair f : it->second) {
        const Entry& z = registry_.at(f);
        const double cap = (1.0 + cfg_->eps) * z.length * (1.0 + kTieTol);
        const auto fa = pts_->coords(f.a);
        const auto fb = pts_->coords(f.b);
        const double through = std::min(pts_->distance_to(fa, e.a) + pts_->distance_to(fb, e.b),
                                        pts_->distance_to(fa, e.b) + pts_->distance_to(fb, e.a));
        if (through + x.length <= cap) dirty_.insert({z.coord.size, z.coord.index, f});
      }
    }
  }

  // Pairs whose (1+eps) ellipse contains p may see their d* change.
  void touch_point(PointId p) {
    const auto xp = pts_->coords(p);
    for (const auto& [e, x] : registry_) {
      const double cap = (1.0 + cfg_->eps) * x.length * (1.0 + kTieTol);
      if (pts_->distance_to(xp, e.a) + pts_->distance_to(xp, e.b) <= cap) dirty_.insert(key(e));
    }
  }

  void transfer(const SparseDelta& d, std::vector<LightEvent>& out) {
    for (const auto& [from, to] : d.pot_reassigned) {
      const bool was = registry_.at(from).member;
      unregister_pair(from);
      register_pair(to, was);
      if (was) out.push_back({LightEvent::Kind::transfer, to.pair, to.coord.index, from});
    }
  }

  void drop(const SparseDelta& d, std::vector<LightEvent>& out) {
    for (PointPair e : d.pot_removed) {
      const Entry x = registry_.at(e);
      unregister_pair(e);
      if (x.member) out.push_back({LightEvent::Kind::remove, e, x.coord.index, {}});
    }
  }

  const Config* cfg_;
  const PointStore* pts_;
  std::unordered_map<PointPair, Entry, PointPairHash> registry_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::set<PointPair>> by_level_;  // (index, size)
  std::set<DirtyKey> dirty_;
  std::vector<std::vector<std::pair<PointId, std::int64_t>>> adj_;  // member neighbours with bucket index
  mutable std::vector<std::ptrdiff_t> pos_;                          // d_star scratch, all -1 between calls
  std::size_t pending_events_ = 0;
  bool trace_ = false;
  double radius_factor_ = 4.0;
};

}  // namespace dynspan
