#pragma once

// Trace replay with recourse accounting, periodic verification and the file
// formats used by the dynspan CLI.

#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "workload.hpp"

namespace dynspan::harness {

using nlohmann::json;

enum ExitCode : int { exit_ok = 0, exit_input = 1, exit_verify = 2, exit_nonconverged = 3 };

// ---- config files ------------------------------------------------------------

// {"dim": 2, "eps": 0.5, "R": 2, "mode": "practical",
//  "overrides": {"c": 1.05, "k": 8, "lambda": 8, "Cphi": 2, "eps_prime": 0.1}}
inline Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("config: ") + e.what());
  }
  try {
    const int dim = j.at("dim").get<int>();
    const double eps = j.at("eps").get<double>();
    const double R = j.value("R", 2.0);
    const std::string mode = j.value("mode", std::string("practical"));
    if (mode != "theory" && mode != "practical") throw Error(Errc::parse_error, "config: unknown mode '" + mode + "'");
    ConfigOverrides ov;
    if (j.contains("overrides")) {
      const json& o = j.at("overrides");
      for (auto it = o.begin(); it != o.end(); ++it) {
        const std::string& k = it.key();
        if (k == "c") {
          ov.c = it->get<double>();
        } else if (k == "k") {
          ov.k = it->get<std::int64_t>();
        } else if (k == "lambda") {
          ov.lambda = it->get<double>();
        } else if (k == "Cphi") {
          ov.cphi = it->get<double>();
        } else if (k == "eps_prime") {
          ov.eps_prime = it->get<double>();
        } else {
          throw Error(Errc::parse_error, "config: unknown override '" + k + "'");
        }
      }
    }
    return derive_config(dim, eps, R, mode == "theory" ? Mode::theory : Mode::practical, ov);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("config: ") + e.what());
  }
}

// Every input and derived constant, for self-describing outputs.
inline json config_json(const Config& c) {
  json j{{"dim", c.dim},
         {"eps_target", c.eps_target},
         {"eps", c.eps},
         {"eps_prime", c.eps_prime},
         {"eps_prime_pinned", c.eps_prime_pinned},
         {"R", c.R},
         {"mode", to_string(c.mode)},
         {"lambda", c.lambda},
         {"c", c.c},
         {"k", c.k},
         {"C", c.C},
         {"Cphi", c.cphi},
         {"C1", c.C1},
         {"C2", c.C2},
         {"C3", c.C3},
         {"C4", c.C4},
         {"C5", c.C5},
         {"p_max", c.p_max},
         {"d_max", c.d_max},
         {"rep_bound", c.rep_bound},
         {"block_len", c.block_len}};
  json checks = json::array();
  for (const ConfigCheck& k : c.checks) checks.push_back({{"name", k.name}, {"holds", k.holds}, {"waived", k.waived}});
  j["checks"] = checks;
  return j;
}

// ---- per-op records ------------------------------------------------------------

struct OpRecord {
  std::size_t op_seq = 0;  // 1-based
  char op_kind = '+';
  std::size_t id = 0;
  std::size_t n = 0;
  double log2_aspect_ratio = 0;
  std::size_t hierarchy_events = 0;
  std::size_t sparse_edge_events = 0;
  std::size_t light_edge_events = 0;
  std::size_t maintenance_iterations = 0;
  bool converged = true;
  std::size_t cum_sparse_edge_events = 0;
  std::size_t cum_light_edge_events = 0;
  std::size_t cum_insert_light_events = 0;
  std::size_t cum_delete_light_events = 0;
  std::size_t inserts = 0;
  std::size_t deletes = 0;
  std::size_t max_degree = 0;
  // Only on verified rows and the last row.
  std::optional<double> lightness;
  std::optional<double> max_stretch;

  friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

inline constexpr const char* kCsvHeader =
    "op_seq,op_kind,id,n,log2_aspect_ratio,hierarchy_events,sparse_edge_events,light_edge_events,"
    "maintenance_iterations,converged,cum_sparse_edge_events,cum_light_edge_events,cum_insert_light_events,"
    "cum_delete_light_events,inserts,deletes,max_degree,lightness,max_stretch";

inline std::string fmt17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string ops_csv(const std::vector<OpRecord>& rows) {
  std::ostringstream os;
  os << "schema=1\n" << kCsvHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  for (const OpRecord& r : rows) {
    os << r.op_seq << ',' << r.op_kind << ',' << r.id << ',' << r.n << ',' << fmt17(r.log2_aspect_ratio) << ','
       << r.hierarchy_events << ',' << r.sparse_edge_events << ',' << r.light_edge_events << ','
       << r.maintenance_iterations << ',' << (r.converged ? 1 : 0) << ',' << r.cum_sparse_edge_events << ','
       << r.cum_light_edge_events << ',' << r.cum_insert_light_events << ',' << r.cum_delete_light_events << ','
       << r.inserts << ',' << r.deletes << ',' << r.max_degree << ',' << opt(r.lightness) << ','
       << opt(r.max_stretch) << '\n';
  }
  return os.str();
}

inline std::vector<OpRecord> parse_ops_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto fail = [](const std::string& what) { return Error(Errc::parse_error, "ops csv: " + what); };
  if (!std::getline(in, line) || line != "schema=1") throw fail("expected 'schema=1' on the first line");
  if (!std::getline(in, line) || line != kCsvHeader) throw fail("header does not match schema 1");

  auto to_size = [&](const std::string& s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw fail("bad integer '" + s + "'");
    return v;
  };
  auto to_real = [&](const std::string& s) {
    if (s == "inf") return kInf;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw fail("bad number '" + s + "'");
    return v;
  };

  std::vector<OpRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 19) throw fail("row " + std::to_string(rows.size() + 1) + " has " + std::to_string(f.size()) + " fields");
    OpRecord r;
    r.op_seq = to_size(f[0]);
    if (f[1] != "+" && f[1] != "-") throw fail("bad op kind '" + f[1] + "'");
    r.op_kind = f[1][0];
    r.id = to_size(f[2]);
    r.n = to_size(f[3]);
    r.log2_aspect_ratio = to_real(f[4]);
    r.hierarchy_events = to_size(f[5]);
    r.sparse_edge_events = to_size(f[6]);
    r.light_edge_events = to_size(f[7]);
    r.maintenance_iterations = to_size(f[8]);
    r.converged = to_size(f[9]) != 0;
    r.cum_sparse_edge_events = to_size(f[10]);
    r.cum_light_edge_events = to_size(f[11]);
    r.cum_insert_light_events = to_size(f[12]);
    r.cum_delete_light_events = to_size(f[13]);
    r.inserts = to_size(f[14]);
    r.deletes = to_size(f[15]);
    r.max_degree = to_size(f[16]);
    if (!f[17].empty()) r.lightness = to_real(f[17]);
    if (!f[18].empty()) r.max_stretch = to_real(f[18]);
    rows.push_back(r);
  }
  return rows;
}

// ---- replay ----------------------------------------------------------------------

struct RunOptions {
  std::size_t verify_every = 25;  // 0 disables verification
  std::size_t verify_max_n = 400;
  std::size_t maintenance_cap = 0;  // 0 selects the light spanner's default
};

struct RunResult {
  int status = exit_ok;
  std::string message;
  std::vector<OpRecord> records;
  std::vector<oracle::VerificationReport> checkpoints;
  std::vector<std::string> warnings;
  json summary;
};

namespace detail {

inline double log2_aspect(const PointStore& pts) {
  return pts.size() < 2 ? 0.0 : std::log2(oracle::aspect_ratio(pts));
}

// Membership tracked purely from the event stream.
inline void apply_events(std::set<PointPair>& m, const std::vector<LightEvent>& ev) {
  for (const LightEvent& e : ev) {
    switch (e.kind) {
      case LightEvent::Kind::add:
        m.insert(e.pair);
        break;
      case LightEvent::Kind::remove:
        m.erase(e.pair);
        break;
      case LightEvent::Kind::transfer:
        m.erase(e.from);
        m.insert(e.pair);
        break;
    }
  }
}

inline json trace_json(const Trace& t) {
  return {{"generator", t.generator}, {"seed", t.seed}, {"params", t.params}, {"dim", t.dim}, {"ops", t.ops.size()}};
}

}  // namespace detail

inline RunResult run(const Trace& trace, const Config& cfg, const RunOptions& opt = {}) {
  RunResult res;
  if (trace.dim != cfg.dim) {
    res.status = exit_input;
    res.message = "trace dim " + std::to_string(trace.dim) + " differs from config dim " + std::to_string(cfg.dim);
    return res;
  }
  DynamicSpanner ds(cfg);
  ds.set_maintenance_cap(opt.maintenance_cap);
  std::set<PointPair> tracked;
  OpRecord cum;
  double max_log = 0;
  bool warned = false;

  auto checkpoint = [&](OpRecord& row) {
    if (ds.points().size() > opt.verify_max_n) {
      if (!warned) {
        res.warnings.push_back("verification skipped above n=" + std::to_string(opt.verify_max_n));
        warned = true;
      }
      return true;
    }
    const oracle::VerificationReport rep = ds.verify(row.op_seq);
    row.lightness = rep.lightness;
    row.max_stretch = rep.max_stretch;
    res.checkpoints.push_back(rep);
    const auto members = ds.light_edges();
    if (std::set<PointPair>(members.begin(), members.end()) != tracked) {
      res.status = exit_verify;
      res.message = "light edge events do not account for the bucket contents at op " + std::to_string(row.op_seq);
      return false;
    }
    if (!rep.clean(cfg)) {
      res.status = exit_verify;
      res.message = "verification failed at op " + std::to_string(row.op_seq);
      return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < trace.ops.size(); ++i) {
    const TraceOp& op = trace.ops[i];
    OpResult r;
    try {
      if (op.kind == TraceOp::Kind::insert) {
        r = ds.insert(op.coords);
      } else {
        r = ds.erase(op.target);
      }
    } catch (const Error& e) {
      res.status = exit_input;
      res.message = "op " + std::to_string(i + 1) + ": " + e.what();
      break;
    }
    detail::apply_events(tracked, r.light_log);

    OpRecord row;
    row.op_seq = i + 1;
    row.op_kind = op.kind == TraceOp::Kind::insert ? '+' : '-';
    row.id = idx(r.id);
    row.n = ds.points().size();
    row.log2_aspect_ratio = detail::log2_aspect(ds.points());
    max_log = std::max(max_log, row.log2_aspect_ratio);
    row.hierarchy_events = r.hierarchy_events;
    row.sparse_edge_events = r.sparse_events;
    row.light_edge_events = r.light_events;
    row.maintenance_iterations = r.maintenance.iterations;
    row.converged = r.maintenance.converged;
    cum.cum_sparse_edge_events += r.sparse_events;
    cum.cum_light_edge_events += r.light_events;
    (op.kind == TraceOp::Kind::insert ? cum.cum_insert_light_events : cum.cum_delete_light_events) += r.light_events;
    (op.kind == TraceOp::Kind::insert ? cum.inserts : cum.deletes) += 1;
    row.cum_sparse_edge_events = cum.cum_sparse_edge_events;
    row.cum_light_edge_events = cum.cum_light_edge_events;
    row.cum_insert_light_events = cum.cum_insert_light_events;
    row.cum_delete_light_events = cum.cum_delete_light_events;
    row.inserts = cum.inserts;
    row.deletes = cum.deletes;
    row.max_degree = ds.sparse().max_degree();

    bool ok = true;
    if (!row.converged) {
      res.status = exit_nonconverged;
      res.message = "maintenance hit its iteration cap at op " + std::to_string(row.op_seq);
      ok = false;
    } else if (opt.verify_every != 0 && row.op_seq % opt.verify_every == 0) {
      ok = checkpoint(row);
    }
    res.records.push_back(row);
    if (!ok) break;
  }

  // Final verification and metrics on the last row.
  if (res.status == exit_ok && !res.records.empty()) {
    OpRecord& last = res.records.back();
    if (opt.verify_every != 0 && last.op_seq % opt.verify_every != 0) checkpoint(last);
    if (!last.lightness && ds.points().size() >= 2) {
      last.lightness = ds.light().weight() / oracle::mst_weight(ds.points());
      last.max_stretch = oracle::exact_stretch(ds.points(), ds.light_edges()).max_ratio;
    }
  }

  json s;
  s["schema"] = 1;
  s["config"] = config_json(cfg);
  s["trace"] = detail::trace_json(trace);
  s["status"] = res.status;
  s["message"] = res.message;
  s["warnings"] = res.warnings;
  s["ops"] = res.records.size();
  s["inserts"] = cum.inserts;
  s["deletes"] = cum.deletes;
  s["total_light_edge_events"] = cum.cum_light_edge_events;
  s["total_sparse_edge_events"] = cum.cum_sparse_edge_events;
  const double ins = cum.inserts ? static_cast<double>(cum.cum_insert_light_events) / cum.inserts : 0.0;
  const double del = cum.deletes ? static_cast<double>(cum.cum_delete_light_events) / cum.deletes : 0.0;
  s["amortized_insertion_recourse"] = ins;
  s["amortized_deletion_recourse"] = del;
  s["max_log2_aspect_ratio"] = max_log;
  s["amortized_deletion_recourse_per_log2_aspect_ratio"] = max_log > 0 ? del / max_log : 0.0;
  s["final_metrics"] = nullptr;
  if (!res.records.empty()) {
    const OpRecord& last = res.records.back();
    s["final_metrics"] = {{"n", last.n},
                          {"max_degree", last.max_degree},
                          {"lightness", last.lightness ? oracle::real_json(*last.lightness) : json(nullptr)},
                          {"max_stretch", last.max_stretch ? oracle::real_json(*last.max_stretch) : json(nullptr)}};
  }
  s["final"] = res.checkpoints.empty() ? json(nullptr) : oracle::to_json(res.checkpoints.back());
  json cps = json::array();
  for (const auto& c : res.checkpoints) cps.push_back(oracle::to_json(c));
  s["checkpoints"] = cps;
  res.summary = std::move(s);
  return res;
}

// ---- saved states ---------------------------------------------------------------

// dim <d>
// point <id> <x1> ... <xd>             ids 0..n-1 in order
// cluster <id> <level> parent=<id@l|none>   as in the hierarchy dump
// bucket <i> <a> <b> <length>          optional light members
struct State {
  int dim = 0;
  std::vector<std::vector<double>> points;
  std::vector<Hierarchy::ChainSpec> chains;
  std::optional<PointId> root;
  std::optional<std::set<PointPair>> members;
  std::vector<std::tuple<std::int64_t, PointPair>> bucket_lines;
};

inline State parse_state(const std::string& text) {
  State st;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    return Error(Errc::parse_error, "state line " + std::to_string(lineno) + ": " + what);
  };
  auto num = [&](const std::string& s, auto& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw fail("bad number '" + s + "'");
  };
  struct Levels {
    int low = 0, top = 0;
    std::optional<PointId> parent;
    bool top_seen = false;
  };
  std::map<std::size_t, Levels> chains;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    if (tok[0] == "dim") {
      if (tok.size() != 2) throw fail("expected 'dim <d>'");
      num(tok[1], st.dim);
      if (st.dim < 1) throw fail("bad dimension");
    } else if (tok[0] == "point") {
      if (st.dim == 0) throw fail("point before dim");
      if (static_cast<int>(tok.size()) != st.dim + 2) throw fail("dimension mismatch");
      std::size_t id = 0;
      num(tok[1], id);
      if (id != st.points.size()) throw fail("point ids must be 0, 1, 2, ... in order");
      std::vector<double> x(st.dim);
      for (int a = 0; a < st.dim; ++a) num(tok[a + 2], x[a]);
      st.points.push_back(std::move(x));
    } else if (tok[0] == "cluster") {
      if (tok.size() != 4 || tok[3].rfind("parent=", 0) != 0) throw fail("expected 'cluster <id> <level> parent=...'");
      std::size_t id = 0;
      int level = 0;
      num(tok[1], id);
      num(tok[2], level);
      if (id >= st.points.size()) throw fail("cluster center " + tok[1] + " is not a point");
      const std::string par = tok[3].substr(7);
      auto [it, fresh] = chains.try_emplace(id, Levels{level, level, {}, false});
      Levels& c = it->second;
      c.low = std::min(c.low, level);
      if (level >= c.top) {
        c.top = level;
        c.parent.reset();
        if (par != "none") {
          const auto at = par.find('@');
          if (at == std::string::npos) throw fail("bad parent '" + par + "'");
          std::size_t pid = 0;
          num(par.substr(0, at), pid);
          if (pid != id) c.parent = make_id(pid);
        }
      }
    } else if (tok[0] == "bucket") {
      if (tok.size() != 5) throw fail("expected 'bucket <i> <a> <b> <length>'");
      std::int64_t i = 0;
      std::size_t a = 0, b = 0;
      num(tok[1], i);
      num(tok[2], a);
      num(tok[3], b);
      if (!st.members) st.members.emplace();
      st.members->insert(PointPair(make_id(a), make_id(b)));
      st.bucket_lines.emplace_back(i, PointPair(make_id(a), make_id(b)));
    } else {
      throw fail("unknown record '" + tok[0] + "'");
    }
  }
  if (st.dim == 0) throw Error(Errc::parse_error, "state: missing 'dim' line");
  for (const auto& [id, c] : chains) {
    st.chains.push_back({make_id(id), c.low, c.top, c.parent});
    if (!c.parent) {
      if (st.root) throw Error(Errc::parse_error, "state: more than one chain without a parent");
      st.root = make_id(id);
    }
  }
  return st;
}

// Verification of a saved state; the spanner is rebuilt from the hierarchy.
inline oracle::VerificationReport verify_state(const State& st, const Config& cfg) {
  if (st.dim != cfg.dim) throw Error(Errc::invalid_argument, "state dim differs from config dim");
  DynamicSpanner ds(cfg);
  ds.load_state(st.points, st.chains, st.root, st.members);
  for (const auto& [i, e] : st.bucket_lines)
    if (ds.light().entry(e).coord.index != i) throw Error(Errc::invalid_argument, "bucket index does not match the pair length");
  return ds.verify();
}

// ---- aggregation -------------------------------------------------------------------

struct ReportRow {
  std::string source;
  std::size_t n = 0;  // alive points after the last op
  std::size_t ops = 0;
  double amortized_ins = 0;
  double amortized_del = 0;
  double max_log2_aspect_ratio = 0;
  double amortized_del_per_log2_aspect_ratio = 0;
  std::optional<double> lightness;
  std::size_t max_degree = 0;
  std::optional<double> max_stretch;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// Recomputes the amortized values from the per-op columns and checks the
// cumulative ones against them.
inline ReportRow aggregate(const std::vector<OpRecord>& rows, std::string source) {
  ReportRow out;
  out.source = std::move(source);
  out.ops = rows.size();
  std::size_t ins = 0, del = 0, ins_ev = 0, del_ev = 0, all_ev = 0;
  for (const OpRecord& r : rows) {
    all_ev += r.light_edge_events;
    if (r.op_kind == '+') {
      ++ins;
      ins_ev += r.light_edge_events;
    } else {
      ++del;
      del_ev += r.light_edge_events;
    }
    if (r.cum_light_edge_events != all_ev || r.cum_insert_light_events != ins_ev || r.cum_delete_light_events != del_ev ||
        r.inserts != ins || r.deletes != del)
      throw Error(Errc::parse_error, "ops csv: cumulative counters are not prefix sums at op " + std::to_string(r.op_seq));
    out.max_log2_aspect_ratio = std::max(out.max_log2_aspect_ratio, r.log2_aspect_ratio);
    out.max_degree = std::max(out.max_degree, r.max_degree);
    if (r.lightness) out.lightness = r.lightness;
    if (r.max_stretch) out.max_stretch = out.max_stretch ? std::max(*out.max_stretch, *r.max_stretch) : *r.max_stretch;
  }
  if (!rows.empty()) out.n = rows.back().n;
  out.amortized_ins = ins ? static_cast<double>(ins_ev) / static_cast<double>(ins) : 0.0;
  out.amortized_del = del ? static_cast<double>(del_ev) / static_cast<double>(del) : 0.0;
  out.amortized_del_per_log2_aspect_ratio =
      out.max_log2_aspect_ratio > 0 ? out.amortized_del / out.max_log2_aspect_ratio : 0.0;
  return out;
}

struct Fit {
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
};

// Least squares y = intercept + slope·x; slope 0 when x does not vary.
inline Fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  Fit f;
  f.points = x.size();
  if (x.empty()) return f;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  os << "source,n,ops,amortized_ins,amortized_del,max_log2_aspect_ratio,amortized_del_per_log2_aspect_ratio,"
        "lightness,max_degree,max_stretch\n";
  std::vector<double> n, ins, logd, del;
  for (const ReportRow& r : rows) {
    os << r.source << ',' << r.n << ',' << r.ops << ',' << fmt17(r.amortized_ins) << ',' << fmt17(r.amortized_del)
       << ',' << fmt17(r.max_log2_aspect_ratio) << ',' << fmt17(r.amortized_del_per_log2_aspect_ratio) << ','
       << opt(r.lightness) << ',' << r.max_degree << ',' << opt(r.max_stretch) << '\n';
    n.push_back(static_cast<double>(r.n));
    ins.push_back(r.amortized_ins);
    logd.push_back(r.max_log2_aspect_ratio);
    del.push_back(r.amortized_del);
  }
  const Fit fi = fit_line(n, ins), fd = fit_line(logd, del);
  os << "# fit amortized_ins = " << fmt17(fi.intercept) << " + " << fmt17(fi.slope) << " * n (" << fi.points
     << " runs)\n";
  os << "# fit amortized_del = " << fmt17(fd.intercept) << " + " << fmt17(fd.slope) << " * log2_aspect_ratio ("
     << fd.points << " runs)\n";
  return os.str();
}

// ---- files -----------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(Errc::io_error, "cannot write '" + path + "'");
}

}  // namespace dynspan::harness
