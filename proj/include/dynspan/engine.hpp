#pragma once

// One object owning the whole stack: points, hierarchy, sparse spanner and
// light spanner, updated in that order.

#include <memory>

#include "core.hpp"
#include "hierarchy.hpp"
#include "light_spanner.hpp"
#include "oracle.hpp"
#include "sparse_spanner.hpp"

namespace dynspan {

struct OpResult {
  PointId id{};
  std::size_t hierarchy_events = 0;
  std::size_t sparse_events = 0;
  std::size_t light_events = 0;  // update hook plus maintenance
  std::vector<LightEvent> light_log;
  MaintenanceSummary maintenance;
};

class DynamicSpanner {
 public:
  explicit DynamicSpanner(Config cfg)
      : cfg_(std::move(cfg)),
        pts_(cfg_.dim),
        h_(pts_, cfg_.R),
        sparse_(cfg_, h_),
        light_(cfg_, pts_) {}

  DynamicSpanner(const DynamicSpanner&) = delete;
  DynamicSpanner& operator=(const DynamicSpanner&) = delete;

  OpResult insert(std::span<const double> x) {
    OpResult r;
    r.id = pts_.insert(x);
    const HierarchyDelta hd = h_.insert(r.id);
    const SparseDelta sd = sparse_.apply(hd);
    const auto ev = light_.on_point_inserted(r.id, sd);
    finish(r, hd, sd, ev);
    return r;
  }

  OpResult erase(PointId p) {
    pts_.require_alive(p);
    OpResult r;
    r.id = p;
    const HierarchyDelta hd = h_.erase(p);
    pts_.erase(p);
    const SparseDelta sd = sparse_.apply(hd);
    const auto ev = light_.on_point_deleted(p, sd);
    finish(r, hd, sd, ev);
    return r;
  }

  // Loads a saved state into an empty spanner: points with ids 0..n-1, the
  // hierarchy chains, and optionally the light members. Without members the
  // light spanner is rebuilt by maintenance.
  MaintenanceSummary load_state(const std::vector<std::vector<double>>& points,
                                const std::vector<Hierarchy::ChainSpec>& chains, std::optional<PointId> root,
                                const std::optional<std::set<PointPair>>& members) {
    if (pts_.capacity() != 0) throw Error(Errc::precondition, "load_state needs an empty spanner");
    for (const auto& x : points) pts_.insert(x);
    for (const auto& c : chains) {
      pts_.require_alive(c.center);
      if (c.parent) pts_.require_alive(*c.parent);
    }
    h_ = Hierarchy::from_chains(pts_, cfg_.R, chains, root);
    HierarchyDelta all;
    for (const auto& c : chains) all.events.push_back({HierarchyEvent::Kind::cluster_added, c.center, c.top, {}, c.parent});
    const SparseDelta sd = sparse_.apply(all);
    for (const PotentialPair& pp : sd.pot_added) light_.register_pair(pp, members && members->contains(pp.pair));
    if (members)
      for (PointPair e : *members)
        if (!light_.registered(e)) throw Error(Errc::invalid_argument, "member is not a potential pair");
    if (!members) return light_.run_maintenance(maintenance_cap_);
    return {};
  }

  // Iteration cap per maintenance run; 0 keeps the light spanner's default.
  void set_maintenance_cap(std::size_t cap) noexcept { maintenance_cap_ = cap; }

  const Config& config() const noexcept { return cfg_; }
  const PointStore& points() const noexcept { return pts_; }
  const Hierarchy& hierarchy() const noexcept { return h_; }
  const SparseSpanner& sparse() const noexcept { return sparse_; }
  const LightSpanner& light() const noexcept { return light_; }
  LightSpanner& light() noexcept { return light_; }

  std::vector<PointPair> light_edges() const { return light_.members(); }

  std::vector<PointPair> s1_edges() const {
    std::vector<PointPair> out;
    for (const auto& [e, n] : sparse_.s1_edges()) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out;
    for (PointId p : pts_.sorted_alive_ids()) out.push_back(sparse_.s1_degree(p));
    return out;
  }

  PotentialReport potential_report() const { return light_.potential_report(degrees()); }

  // Runs every oracle against the current state.
  oracle::VerificationReport verify(std::size_t op_seq = 0) const {
    oracle::VerificationReport rep;
    rep.op_seq = op_seq;
    rep.n = pts_.size();
    rep.separation_violations = oracle::verify_separation(h_);
    rep.tree_violations = oracle::verify_tree(h_);

    const oracle::SparseReference ref = oracle::rebuild_sparse(cfg_, h_);
    std::map<PointPair, int> s1(sparse_.s1_edges().begin(), sparse_.s1_edges().end());
    std::set<PointPair> pot;
    for (const PotentialPair& p : sparse_.potential_pairs()) pot.insert(p.pair);
    const auto reg = light_.registered_pairs();
    rep.sparse_matches_rebuild =
        s1 == ref.s1 && pot == ref.potential && std::set<PointPair>(reg.begin(), reg.end()) == ref.potential;
    for (const auto& [key, q] : ref.rep)
      if (sparse_.representative(key.first, key.second) != q) rep.sparse_matches_rebuild = false;
    rep.rep_violations = oracle::verify_representatives(h_, ref);
    rep.max_degree = sparse_.max_degree();
    rep.max_repetition = sparse_.max_repetition();

    rep.invariant_violations = oracle::verify_invariants(cfg_, pts_, light_);
    const auto fast = light_.scan();
    rep.invariants_match_check = std::equal(
        fast.begin(), fast.end(), rep.invariant_violations.begin(), rep.invariant_violations.end(),
        [](const Violation& a, const Violation& b) { return a.kind == b.kind && a.pair == b.pair && a.index == b.index; });

    const auto members = light_.members();
    rep.spanner_weight = light_.weight();
    if (pts_.size() >= 2) {
      const auto st = oracle::exact_stretch(pts_, members);
      rep.max_stretch = st.max_ratio;
      rep.stretch_witness = st.witness;
      rep.s1_max_stretch = oracle::exact_stretch(pts_, s1_edges()).max_ratio;
      rep.mst_weight = oracle::mst_weight(pts_);
      rep.lightness = rep.spanner_weight / rep.mst_weight;
    }
    return rep;
  }

 private:
  void finish(OpResult& r, const HierarchyDelta& hd, const SparseDelta& sd, const std::vector<LightEvent>& hook) {
    r.hierarchy_events = hd.size();
    r.sparse_events = sd.edge_events();
    r.maintenance = light_.run_maintenance(maintenance_cap_);
    r.light_events = hook.size() + r.maintenance.events;
    r.light_log = hook;
    r.light_log.insert(r.light_log.end(), r.maintenance.log.begin(), r.maintenance.log.end());
  }

  Config cfg_;
  PointStore pts_;
  Hierarchy h_;
  SparseSpanner sparse_;
  LightSpanner light_;
  std::size_t maintenance_cap_ = 0;
};

}  // namespace dynspan
