#pragma once

// Rooted cluster tree with the separation property.
//
// A point p owns one chain of explicit clusters (p, low) .. (p, top); the
// clusters (p, l) for l < low exist implicitly and are never stored. Only the
// top cluster of a chain has a parent with a different center, so the tree is
// fully described per chain by (top, low, parent center). The set of clusters
// at level j is every point whose chain top is >= j.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace dynspan {

struct ClusterRef {
  PointId center{};
  int level = 0;

  friend bool operator==(const ClusterRef&, const ClusterRef&) = default;
};

struct HierarchyEvent {
  enum class Kind { cluster_added, cluster_removed, reparented, root_changed };

  Kind kind{};
  PointId center{};
  int level = 0;
  // cluster_added: parent of the new chain top. reparented: old and new parent.
  // root_changed: new_parent holds the new root (absent when the tree empties).
  std::optional<PointId> old_parent;
  std::optional<PointId> new_parent;
};

struct HierarchyDelta {
  std::vector<HierarchyEvent> events;

  bool empty() const noexcept { return events.empty(); }
  std::size_t size() const noexcept { return events.size(); }
};

class Hierarchy {
 public:
  Hierarchy(const PointStore& pts, double R) : pts_(&pts), R_(R) {}

  double R() const noexcept { return R_; }
  bool empty() const noexcept { return members_.empty(); }
  std::size_t size() const noexcept { return members_.size(); }
  std::optional<PointId> root() const noexcept { return root_; }

  bool contains(PointId p) const noexcept { return idx(p) < chains_.size() && chains_[idx(p)].present; }

  int chain_top_level(PointId p) const { return chain(p).top; }
  int chain_low_level(PointId p) const { return chain(p).low; }
  std::optional<PointId> parent(PointId p) const { return chain(p).parent; }
  const std::set<PointId>& children(PointId p) const { return chain(p).children; }

  // Sorted by id.
  const std::vector<PointId>& members() const noexcept { return members_; }

  int lowest_explicit_level() const {
    int lo = std::numeric_limits<int>::max();
    for (PointId q : members_) lo = std::min(lo, chains_[idx(q)].low);
    return lo;
  }

  int highest_level() const { return root_ ? chains_[idx(*root_)].top : 0; }

  // Any (explicit or implicit) cluster at `level` within R^level of x; smallest
  // center id wins.
  std::optional<ClusterRef> covering_cluster(std::span<const double> x, int level) const {
    return find_cover(x, level, std::nullopt);
  }

  HierarchyDelta insert(PointId p) {
    pts_->require_alive(p);
    if (contains(p)) throw Error(Errc::precondition, "point already in hierarchy");
    HierarchyDelta delta;
    ensure_slot(p);
    if (members_.empty()) {
      add_chain(p, 0, std::nullopt);
      root_ = p;
      delta.events.push_back({HierarchyEvent::Kind::cluster_added, p, 0, {}, {}});
      delta.events.push_back({HierarchyEvent::Kind::root_changed, p, 0, {}, p});
      return delta;
    }

    const auto x = pts_->coords(p);
    double nearest = kInf;
    for (PointId q : members_) nearest = std::min(nearest, pts_->distance_to(x, q));

    // Below min(lowest explicit level, ceil log_R nearest) every point is a
    // cluster center and none covers p, so scanning can start there.
    int level = std::min(lowest_explicit_level(), ceil_level(nearest, R_));
    std::optional<ClusterRef> cover;
    while (!(cover = find_cover(x, level, std::nullopt))) {
      ++level;
      Chain& r = chains_[idx(*root_)];
      if (level > r.top) {
        r.top = level;
        delta.events.push_back({HierarchyEvent::Kind::cluster_added, *root_, level, {}, {}});
      }
    }
    materialize(cover->center, level, delta);
    add_chain(p, level - 1, cover->center);
    delta.events.push_back({HierarchyEvent::Kind::cluster_added, p, level - 1, {}, cover->center});
    return delta;
  }

  HierarchyDelta erase(PointId p) {
    using K = HierarchyEvent::Kind;
    if (!contains(p)) throw Error(Errc::precondition, "point not in hierarchy");
    HierarchyDelta delta;
    Chain& cp = chains_[idx(p)];
    const int low = cp.low;
    const int top = cp.top;
    const std::optional<PointId> old_root = root_;

    // Orphaned children keyed by the level of their top cluster.
    std::map<int, std::vector<PointId>> pending;
    for (PointId q : cp.children) pending[chains_[idx(q)].top].push_back(q);
    cp.children.clear();
    if (cp.parent) chains_[idx(*cp.parent)].children.erase(p);
    cp.parent.reset();
    cp.present = false;
    members_.erase(std::lower_bound(members_.begin(), members_.end(), p));
    if (root_ == p) root_.reset();

    int level = low;
    if (!pending.empty()) level = std::min(level, pending.begin()->first + 1);

    std::vector<PointId> orphans;  // clusters at level-1 that need a parent at level
    while (true) {
      if (level >= low && level <= top) delta.events.push_back({K::cluster_removed, p, level, {}, {}});
      if (auto it = pending.find(level - 1); it != pending.end()) {
        orphans.insert(orphans.end(), it->second.begin(), it->second.end());
        pending.erase(it);
      }
      if (orphans.empty()) {
        if (level >= top && pending.empty()) break;
        ++level;
        continue;
      }

      // Nothing lives at this level: the current root (its chain tops out one
      // level down) has to find a parent too.
      if (root_ && !any_at_or_above(level) && chains_[idx(*root_)].top == level - 1) {
        orphans.push_back(*root_);
        root_.reset();
      }
      std::sort(orphans.begin(), orphans.end());

      std::vector<PointId> next;
      for (PointId q : orphans) {
        Chain& cq = chains_[idx(q)];
        const std::optional<PointId> before = cq.parent;
        if (auto cover = find_cover(pts_->coords(q), level, std::nullopt)) {
          materialize(cover->center, level, delta);
          set_parent(q, cover->center);
          delta.events.push_back({K::reparented, q, level - 1, before, cover->center});
        } else {
          set_parent(q, std::nullopt);
          cq.top = level;
          delta.events.push_back({K::cluster_added, q, level, {}, {}});
          next.push_back(q);
        }
      }
      orphans = std::move(next);

      if (orphans.size() == 1 && !root_ && !any_other_at_or_above(level, orphans.front())) {
        root_ = orphans.front();
        orphans.clear();
      }
      if (orphans.empty() && level >= top && pending.empty()) break;
      ++level;
    }

    if (members_.empty()) root_.reset();
    if (root_ != old_root) delta.events.push_back({K::root_changed, root_.value_or(PointId{}), 0, old_root, root_});
    return delta;
  }

  // Replays a delta produced by insert/erase on a copy of the pre-state.
  void apply(const HierarchyDelta& delta) {
    using K = HierarchyEvent::Kind;
    for (const HierarchyEvent& ev : delta.events) {
      switch (ev.kind) {
        case K::cluster_added:
          ensure_slot(ev.center);
          if (!contains(ev.center)) {
            add_chain(ev.center, ev.level, ev.new_parent);
          } else if (Chain& c = chains_[idx(ev.center)]; ev.level < c.low) {
            c.low = ev.level;
          } else {
            c.top = ev.level;
            set_parent(ev.center, ev.new_parent);
          }
          break;
        case K::cluster_removed: {
          Chain& c = chains_[idx(ev.center)];
          if (ev.level >= c.top) {
            if (c.parent) chains_[idx(*c.parent)].children.erase(ev.center);
            for (PointId q : c.children) chains_[idx(q)].parent.reset();
            c = Chain{};
            members_.erase(std::lower_bound(members_.begin(), members_.end(), ev.center));
          } else {
            c.low = ev.level + 1;
          }
          break;
        }
        case K::reparented:
          set_parent(ev.center, ev.new_parent);
          break;
        case K::root_changed:
          root_ = ev.new_parent;
          break;
      }
    }
  }

  // One line per explicit cluster, sorted by (level desc, center id).
  std::string dump() const {
    struct Line {
      int level;
      PointId center;
      std::string parent;
    };
    std::vector<Line> lines;
    for (PointId p : members_) {
      const Chain& c = chains_[idx(p)];
      for (int l = c.low; l <= c.top; ++l) {
        std::string par = "none";
        if (l < c.top)
          par = std::to_string(idx(p)) + "@" + std::to_string(l + 1);
        else if (c.parent)
          par = std::to_string(idx(*c.parent)) + "@" + std::to_string(l + 1);
        lines.push_back({l, p, std::move(par)});
      }
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
      return a.level != b.level ? a.level > b.level : a.center < b.center;
    });
    std::ostringstream os;
    for (const Line& l : lines) os << "cluster " << idx(l.center) << ' ' << l.level << " parent=" << l.parent << '\n';
    return os.str();
  }

  // Builds a hierarchy from explicit chain descriptions without checking any
  // invariant; used to load state dumps and corrupted fixtures.
  struct ChainSpec {
    PointId center{};
    int low = 0;
    int top = 0;
    std::optional<PointId> parent;
  };

  static Hierarchy from_chains(const PointStore& pts, double R, const std::vector<ChainSpec>& specs,
                               std::optional<PointId> root) {
    Hierarchy h(pts, R);
    for (const ChainSpec& s : specs) {
      h.ensure_slot(s.center);
      h.add_chain(s.center, s.top, std::nullopt);
      h.chains_[idx(s.center)].low = s.low;
    }
    for (const ChainSpec& s : specs)
      if (s.parent) h.set_parent(s.center, s.parent);
    h.root_ = root;
    return h;
  }

  friend bool operator==(const Hierarchy& a, const Hierarchy& b) {
    if (a.members_ != b.members_ || a.root_ != b.root_) return false;
    for (PointId p : a.members_) {
      const Chain& x = a.chains_[idx(p)];
      const Chain& y = b.chains_[idx(p)];
      if (x.top != y.top || x.low != y.low || x.parent != y.parent || x.children != y.children) return false;
    }
    return true;
  }

  const PointStore& points() const noexcept { return *pts_; }

 private:
  struct Chain {
    bool present = false;
    int top = 0;
    int low = 0;
    std::optional<PointId> parent;
    std::set<PointId> children;
  };

  const Chain& chain(PointId p) const {
    if (!contains(p)) throw Error(Errc::precondition, "point " + std::to_string(idx(p)) + " not in hierarchy");
    return chains_[idx(p)];
  }

  void ensure_slot(PointId p) {
    if (idx(p) >= chains_.size()) chains_.resize(idx(p) + 1);
  }

  void add_chain(PointId p, int level, std::optional<PointId> parent) {
    Chain& c = chains_[idx(p)];
    c = Chain{};
    c.present = true;
    c.top = c.low = level;
    members_.insert(std::lower_bound(members_.begin(), members_.end(), p), p);
    set_parent(p, parent);
  }

  // A new child may hang below the explicit part of its parent chain; the
  // implicit clusters down to `level` become explicit.
  void materialize(PointId q, int level, HierarchyDelta& delta) {
    Chain& c = chains_[idx(q)];
    while (c.low > level) {
      --c.low;
      delta.events.push_back({HierarchyEvent::Kind::cluster_added, q, c.low, {}, {}});
    }
  }

  void set_parent(PointId q, std::optional<PointId> parent) {
    Chain& c = chains_[idx(q)];
    if (c.parent && contains(*c.parent)) chains_[idx(*c.parent)].children.erase(q);
    c.parent = parent;
    if (parent) chains_[idx(*parent)].children.insert(q);
  }

  std::optional<ClusterRef> find_cover(std::span<const double> x, int level, std::optional<PointId> skip) const {
    const double r = level_radius(R_, level);
    for (PointId q : members_) {  // sorted, so the first hit has the smallest id
      if (q == skip || chains_[idx(q)].top < level) continue;
      if (pts_->distance_to(x, q) <= r) return ClusterRef{q, level};
    }
    return std::nullopt;
  }

  bool any_at_or_above(int level) const {
    return std::any_of(members_.begin(), members_.end(), [&](PointId q) { return chains_[idx(q)].top >= level; });
  }

  bool any_other_at_or_above(int level, PointId self) const {
    return std::any_of(members_.begin(), members_.end(),
                       [&](PointId q) { return q != self && chains_[idx(q)].top >= level; });
  }

  const PointStore* pts_;
  double R_;
  std::vector<Chain> chains_;
  std::vector<PointId> members_;
  std::optional<PointId> root_;
};

}  // namespace dynspan
