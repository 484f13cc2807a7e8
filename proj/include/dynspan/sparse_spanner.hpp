#pragma once

// Cluster spanner S0 and its bounded-degree point image S1.
//
// S0 has three kinds of cluster edges:
//   type I      (p,l)-(q,l) for every level l in the contact interval of p, q;
//   type II     (p,top p)-(parent,top p + 1), the only cross-chain tree edge;
//   chain       (p,l)-(p,l-1), which only survives the representative map at
//               block boundaries where the representative changes.
// Each edge is mapped through the next-block representative assignment and
// the resulting point pairs are merged with reference counts.

#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "hierarchy.hpp"

namespace dynspan {

// Type-I contact of a chain with neighbor q on levels [lo, hi].
struct Contact {
  PointId q{};
  int lo = 0;
  int hi = 0;

  friend bool operator==(const Contact&, const Contact&) = default;
};

// Lowest level at which two centers at distance d are type-I neighbors.
inline int contact_low(double d, double lambda, double R) { return ceil_level(d / lambda, R); }

// Representatives of one chain, constant per block. Blocks outside
// [low_block, top_block] are represented by the center itself.
struct RepTable {
  PointId center{};
  std::int64_t low_block = 0;
  std::int64_t top_block = 0;
  std::vector<PointId> reps;  // reps[b - low_block]
  std::vector<char> nonempty;

  PointId at_block(std::int64_t b) const {
    if (b < low_block || b > top_block) return center;
    return reps[static_cast<std::size_t>(b - low_block)];
  }

  friend bool operator==(const RepTable&, const RepTable&) = default;
};

// Next-block assignment for the chain of p topped at level `top`.
inline RepTable next_block_assignment(PointId p, int top, const std::vector<Contact>& contacts, int block_len) {
  struct Witness {
    int level;
    PointId q;
  };
  std::map<std::int64_t, Witness> witness;
  for (const Contact& c : contacts) {
    const int hi = std::min(c.hi, top);
    if (c.lo > hi) continue;
    for (std::int64_t b = floor_div(c.lo, block_len); b <= floor_div(hi, block_len); ++b) {
      const int level = std::max<std::int64_t>(c.lo, b * block_len);
      auto [it, fresh] = witness.try_emplace(b, Witness{level, c.q});
      if (!fresh && std::pair(level, c.q) < std::pair(it->second.level, it->second.q)) it->second = {level, c.q};
    }
  }

  RepTable t;
  t.center = p;
  t.top_block = floor_div(top, block_len);
  t.low_block = witness.empty() ? t.top_block : std::min(t.top_block, witness.begin()->first);
  const std::size_t span = static_cast<std::size_t>(t.top_block - t.low_block + 1);
  t.reps.assign(span, p);
  t.nonempty.assign(span, 0);
  // Walk each parity list top-down: a block takes the witness of the next
  // lower non-empty block of the same parity.
  std::optional<PointId> below[2];
  for (const auto& [b, w] : witness) {
    const auto par = static_cast<std::size_t>(floor_mod(b, 2));
    const auto slot = static_cast<std::size_t>(b - t.low_block);
    t.nonempty[slot] = 1;
    t.reps[slot] = below[par].value_or(p);
    below[par] = w.q;
  }
  return t;
}

enum class EdgeKind { type1, type2, chain };

struct MappedEdge {
  EdgeKind kind{};
  int level = 0;  // type I: shared level; type II: child level; chain: upper level
  PointPair pair;

  friend bool operator==(const MappedEdge&, const MappedEdge&) = default;
};

struct PotentialPair {
  PointPair pair;
  BucketCoord coord;
  double length = 0;

  friend bool operator==(const PotentialPair&, const PotentialPair&) = default;
};

struct SparseDelta {
  std::vector<PointPair> s1_added;
  std::vector<PointPair> s1_removed;
  std::vector<std::pair<PointPair, PointPair>> s1_reassigned;
  std::vector<PotentialPair> pot_added;
  std::vector<PointPair> pot_removed;
  std::vector<std::pair<PointPair, PotentialPair>> pot_reassigned;

  std::size_t edge_events() const noexcept { return s1_added.size() + s1_removed.size() + s1_reassigned.size(); }
};

class SparseSpanner {
 public:
  SparseSpanner(const Config& cfg, const Hierarchy& h) : cfg_(&cfg), h_(&h) {}

  // Brings the spanner in line with the hierarchy after `delta` was applied to
  // it. The point store must already reflect the operation.
  SparseDelta apply(const HierarchyDelta& delta) {
    const PointStore& pts = h_->points();
    std::set<PointId> touched;
    for (const HierarchyEvent& ev : delta.events) {
      touched.insert(ev.center);
      if (ev.old_parent) touched.insert(*ev.old_parent);
      if (ev.new_parent) touched.insert(*ev.new_parent);
    }

    std::set<PointId> removed, rescan, parent_changed;
    for (PointId x : touched) {
      ensure_slot(x);
      Mirror& m = mirror_[idx(x)];
      const bool now = h_->contains(x);
      if (m.present && !now) {
        removed.insert(x);
      } else if (now) {
        const int top = h_->chain_top_level(x);
        const auto par = h_->parent(x);
        if (!m.present || m.top != top) rescan.insert(x);
        if (!m.present || m.parent != par) parent_changed.insert(x);
      }
    }

    std::set<PointId> rep_dirty(rescan.begin(), rescan.end());
    std::set<PointId> group_dirty_chains;
    std::set<PointPair> dirty_groups;

    for (PointId r : removed) {
      for (const auto& [q, iv] : contacts_[idx(r)]) {
        contacts_[idx(q)].erase(r);
        rep_dirty.insert(q);
      }
      contacts_[idx(r)].clear();
      dirty_groups.insert(PointPair(r, r));
      for (PointId q : partners_[idx(r)]) dirty_groups.insert(PointPair(r, q));
      mirror_[idx(r)] = Mirror{};
      reps_.erase(r);
    }

    for (PointId x : rescan) {
      const int tx = h_->chain_top_level(x);
      for (PointId q : h_->members()) {
        if (q == x) continue;
        const int hi = std::min(tx, h_->chain_top_level(q));
        const int lo = contact_low(pts.distance(x, q), cfg_->lambda, cfg_->R);
        auto& cx = contacts_[idx(x)];
        auto it = cx.find(q);
        if (lo <= hi) {
          if (it == cx.end() || it->second.lo != lo || it->second.hi != hi) {
            cx[q] = {lo, hi};
            contacts_[idx(q)][x] = {lo, hi};
            rep_dirty.insert(q);
          }
        } else if (it != cx.end()) {
          cx.erase(it);
          contacts_[idx(q)].erase(x);
          rep_dirty.insert(q);
        }
      }
    }

    for (PointId x : rep_dirty) {
      if (!h_->contains(x)) continue;
      RepTable t = build_table(x);
      auto it = reps_.find(x);
      if (it == reps_.end() || !(it->second == t)) {
        reps_[x] = std::move(t);
        group_dirty_chains.insert(x);
      }
    }
    group_dirty_chains.insert(rescan.begin(), rescan.end());
    group_dirty_chains.insert(parent_changed.begin(), parent_changed.end());

    for (PointId c : group_dirty_chains) {
      dirty_groups.insert(PointPair(c, c));
      for (PointId q : partners_[idx(c)]) dirty_groups.insert(PointPair(c, q));
      for (const auto& [q, iv] : contacts_[idx(c)]) dirty_groups.insert(PointPair(c, q));
      if (auto par = h_->parent(c)) dirty_groups.insert(PointPair(c, *par));
      for (PointId ch : h_->children(c)) dirty_groups.insert(PointPair(c, ch));
      Mirror& m = mirror_[idx(c)];
      m.present = true;
      m.top = h_->chain_top_level(c);
      m.parent = h_->parent(c);
    }

    return regroup(dirty_groups);
  }

  // Representative of cluster (p, level); level must not exceed size(p).
  PointId representative(PointId p, int level) const {
    auto it = reps_.find(p);
    if (it == reps_.end()) throw Error(Errc::precondition, "no chain centered at point");
    return it->second.at_block(floor_div(level, cfg_->block_len));
  }

  const RepTable& rep_table(PointId p) const {
    auto it = reps_.find(p);
    if (it == reps_.end()) throw Error(Errc::precondition, "no chain centered at point");
    return it->second;
  }

  std::vector<Contact> contacts(PointId p) const {
    std::vector<Contact> out;
    if (idx(p) < contacts_.size())
      for (const auto& [q, iv] : contacts_[idx(p)]) out.push_back({q, iv.lo, iv.hi});
    return out;
  }

  const std::unordered_map<PointPair, int, PointPairHash>& s1_edges() const noexcept { return s1_; }

  std::size_t s1_degree(PointId q) const {
    h_->points().require_alive(q);
    return idx(q) < degree_.size() ? degree_[idx(q)] : 0;
  }

  std::size_t max_degree() const {
    std::size_t m = 0;
    for (std::size_t d : degree_) m = std::max(m, d);
    return m;
  }

  // Blocks of other chains represented by q, plus the (at most two) blocks of
  // q's own chain that fall back to q as the last entry of a parity list.
  std::size_t repetition(PointId q) const {
    std::size_t n = 0;
    for (const auto& [p, t] : reps_) {
      for (std::size_t i = 0; i < t.reps.size(); ++i) {
        if (t.reps[i] != q) continue;
        if (p != q || t.nonempty[i]) ++n;
      }
    }
    return n;
  }

  std::size_t max_repetition() const {
    std::map<PointId, std::size_t> count;
    for (const auto& [p, t] : reps_)
      for (std::size_t i = 0; i < t.reps.size(); ++i)
        if (t.reps[i] != p || t.nonempty[i]) ++count[t.reps[i]];
    std::size_t m = 0;
    for (const auto& [q, n] : count) m = std::max(m, n);
    return m;
  }

  // Per pair of chains and per bucket index, the pair mapped from the lowest
  // cluster level. Sorted by pair.
  std::vector<PotentialPair> potential_pairs() const {
    std::vector<PotentialPair> out;
    out.reserve(potential_.size());
    for (const auto& [e, entry] : potential_) out.push_back(entry.info);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.pair < y.pair; });
    return out;
  }

  bool is_potential(PointPair e) const { return potential_.contains(e); }

  // Edges from the cluster edges between chains a and b (a may equal b).
  const std::vector<MappedEdge>& group_edges(PointId a, PointId b) const {
    static const std::vector<MappedEdge> none;
    auto it = groups_.find(PointPair(a, b));
    return it == groups_.end() ? none : it->second.edges;
  }

  // `s1 <a> <b> <refcount>` per edge, sorted.
  std::string dump() const {
    std::vector<std::pair<PointPair, int>> rows(s1_.begin(), s1_.end());
    std::sort(rows.begin(), rows.end());
    std::ostringstream os;
    for (const auto& [e, n] : rows) os << "s1 " << idx(e.a) << ' ' << idx(e.b) << ' ' << n << '\n';
    return os.str();
  }

 private:
  struct Interval {
    int lo = 0;
    int hi = 0;
  };

  struct Mirror {
    bool present = false;
    int top = 0;
    std::optional<PointId> parent;
  };

  struct Group {
    std::vector<MappedEdge> edges;                  // self loops excluded
    std::map<std::int64_t, PotentialPair> chosen;   // bucket index -> pair
  };

  struct PotentialEntry {
    PotentialPair info;
    int refs = 0;
  };

  void ensure_slot(PointId p) {
    if (idx(p) >= mirror_.size()) {
      mirror_.resize(idx(p) + 1);
      contacts_.resize(idx(p) + 1);
      partners_.resize(idx(p) + 1);
      degree_.resize(idx(p) + 1);
    }
  }

  RepTable build_table(PointId x) const {
    std::vector<Contact> cs;
    for (const auto& [q, iv] : contacts_[idx(x)]) cs.push_back({q, iv.lo, iv.hi});
    return next_block_assignment(x, h_->chain_top_level(x), cs, cfg_->block_len);
  }

  std::vector<MappedEdge> group_of(PointId a, PointId b) const {
    std::vector<MappedEdge> out;
    if (!h_->contains(a) || !h_->contains(b)) return out;
    auto push = [&](EdgeKind kind, int level, PointId x, PointId y) {
      if (x != y) out.push_back({kind, level, PointPair(x, y)});
    };
    if (a == b) {
      const RepTable& t = reps_.at(a);
      for (std::int64_t blk = t.low_block + 1; blk <= t.top_block; ++blk)
        push(EdgeKind::chain, static_cast<int>(blk * cfg_->block_len), t.at_block(blk), t.at_block(blk - 1));
      return out;
    }
    if (auto it = contacts_[idx(a)].find(b); it != contacts_[idx(a)].end())
      for (int l = it->second.lo; l <= it->second.hi; ++l)
        push(EdgeKind::type1, l, representative(a, l), representative(b, l));
    for (auto [child, par] : {std::pair(a, b), std::pair(b, a)}) {
      if (h_->parent(child) != par) continue;
      const int l = h_->chain_top_level(child);
      push(EdgeKind::type2, l, representative(child, l), representative(par, l + 1));
    }
    return out;
  }

  SparseDelta regroup(const std::set<PointPair>& dirty) {
    const PointStore& pts = h_->points();
    std::map<PointPair, int> s1_before;
    std::map<PointPair, int> pot_before;
    std::vector<std::pair<PointPair, PointPair>> s1_moves;
    std::vector<std::pair<PointPair, PotentialPair>> pot_moves;

    auto bump_s1 = [&](PointPair e, int d) {
      auto [it, fresh] = s1_before.try_emplace(e, 0);
      auto s = s1_.find(e);
      if (fresh) it->second = s == s1_.end() ? 0 : s->second;
      const int now = (s == s1_.end() ? 0 : s->second) + d;
      if (now == 0) {
        s1_.erase(e);
      } else {
        s1_[e] = now;
      }
    };
    auto bump_pot = [&](const PotentialPair& p, int d) {
      auto [it, fresh] = pot_before.try_emplace(p.pair, 0);
      auto s = potential_.find(p.pair);
      if (fresh) it->second = s == potential_.end() ? 0 : s->second.refs;
      const int now = (s == potential_.end() ? 0 : s->second.refs) + d;
      if (now == 0) {
        potential_.erase(p.pair);
      } else {
        potential_[p.pair] = {p, now};
      }
    };

    for (const PointPair& key : dirty) {
      std::vector<MappedEdge> fresh = group_of(key.a, key.b);
      std::map<std::int64_t, PotentialPair> chosen;
      {
        std::map<std::int64_t, std::tuple<int, int, PointPair>> best;
        for (const MappedEdge& e : fresh) {
          const BucketCoord bc = pair_bucket(*cfg_, pts, e.pair.a, e.pair.b);
          auto cand = std::tuple(e.level, static_cast<int>(e.kind), e.pair);
          auto [it, ins] = best.try_emplace(bc.index, cand);
          if (!ins && cand < it->second) it->second = cand;
        }
        for (const auto& [i, t] : best) {
          const PointPair e = std::get<2>(t);
          chosen[i] = {e, pair_bucket(*cfg_, pts, e.a, e.b), pts.distance(e.a, e.b)};
        }
      }

      Group old;
      if (auto it = groups_.find(key); it != groups_.end()) old = std::move(it->second);

      std::map<std::pair<int, int>, PointPair> old_by_key;
      for (const MappedEdge& e : old.edges) {
        bump_s1(e.pair, -1);
        old_by_key[{static_cast<int>(e.kind), e.level}] = e.pair;
      }
      for (const MappedEdge& e : fresh) {
        bump_s1(e.pair, +1);
        auto it = old_by_key.find({static_cast<int>(e.kind), e.level});
        if (it != old_by_key.end() && it->second != e.pair) s1_moves.emplace_back(it->second, e.pair);
      }
      for (const auto& [i, p] : old.chosen) bump_pot(p, -1);
      for (const auto& [i, p] : chosen) {
        bump_pot(p, +1);
        auto it = old.chosen.find(i);
        if (it != old.chosen.end() && it->second.pair != p.pair) pot_moves.emplace_back(it->second.pair, p);
      }

      if (fresh.empty() && key.a != key.b) {
        groups_.erase(key);
        if (idx(key.a) < partners_.size()) partners_[idx(key.a)].erase(key.b);
        if (idx(key.b) < partners_.size()) partners_[idx(key.b)].erase(key.a);
      } else if (fresh.empty()) {
        groups_.erase(key);
      } else {
        groups_[key] = Group{std::move(fresh), std::move(chosen)};
        if (key.a != key.b) {
          partners_[idx(key.a)].insert(key.b);
          partners_[idx(key.b)].insert(key.a);
        }
      }
    }

    SparseDelta out;
    std::set<PointPair> s1_add, s1_rem;
    for (const auto& [e, before] : s1_before) {
      const bool after = s1_.contains(e);
      if (before > 0 && !after) s1_rem.insert(e);
      if (before == 0 && after) s1_add.insert(e);
      if ((before > 0) != after) {
        const int d = after ? 1 : -1;
        degree_[idx(e.a)] += d;
        degree_[idx(e.b)] += d;
      }
    }
    for (const auto& [x, y] : s1_moves) {
      if (s1_rem.contains(x) && s1_add.contains(y)) {
        s1_rem.erase(x);
        s1_add.erase(y);
        out.s1_reassigned.emplace_back(x, y);
      }
    }
    out.s1_added.assign(s1_add.begin(), s1_add.end());
    out.s1_removed.assign(s1_rem.begin(), s1_rem.end());

    std::set<PointPair> pot_rem;
    std::map<PointPair, PotentialPair> pot_add;
    for (const auto& [e, before] : pot_before) {
      auto it = potential_.find(e);
      const bool after = it != potential_.end();
      if (before > 0 && !after) pot_rem.insert(e);
      if (before == 0 && after) pot_add.emplace(e, it->second.info);
    }
    for (const auto& [x, y] : pot_moves) {
      if (pot_rem.contains(x) && pot_add.contains(y.pair)) {
        pot_rem.erase(x);
        pot_add.erase(y.pair);
        out.pot_reassigned.emplace_back(x, y);
      }
    }
    for (const auto& [e, p] : pot_add) out.pot_added.push_back(p);
    out.pot_removed.assign(pot_rem.begin(), pot_rem.end());
    return out;
  }

  const Config* cfg_;
  const Hierarchy* h_;
  std::vector<Mirror> mirror_;
  std::vector<std::map<PointId, Interval>> contacts_;
  std::vector<std::set<PointId>> partners_;
  std::vector<std::size_t> degree_;
  std::map<PointId, RepTable> reps_;
  std::map<PointPair, Group> groups_;
  std::unordered_map<PointPair, int, PointPairHash> s1_;
  std::map<PointPair, PotentialEntry> potential_;
};

}  // namespace dynspan
