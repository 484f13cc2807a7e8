// dynspan: replay traces, generate them, verify states and aggregate runs.
//
// Exit status: 0 ok, 1 input or I/O error, 2 verification failure,
// 3 maintenance did not converge. DYNSPAN_OUT_DIR sets the default output
// directory for run and gen.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dynspan/harness.hpp>

namespace fs = std::filesystem;
using namespace dynspan;

namespace {

fs::path out_dir() {
  const char* env = std::getenv("DYNSPAN_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, std::string> out;
  for (const std::string& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::invalid_argument, "parameter '" + s + "' is not key=value");
    out[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return out;
}

struct Params {
  std::map<std::string, std::string> kv;
  std::set<std::string> used;

  double real(const std::string& k, double def) {
    used.insert(k);
    auto it = kv.find(k);
    if (it == kv.end()) return def;
    double v = 0;
    auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size())
      throw Error(Errc::invalid_argument, "parameter " + k + " is not a number");
    return v;
  }
  std::size_t count(const std::string& k, std::size_t def) {
    const double v = real(k, static_cast<double>(def));
    if (v < 0 || v != std::floor(v)) throw Error(Errc::invalid_argument, "parameter " + k + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  std::string text(const std::string& k, const std::string& def) {
    used.insert(k);
    auto it = kv.find(k);
    return it == kv.end() ? def : it->second;
  }
  void finish() const {
    for (const auto& [k, v] : kv)
      if (!used.contains(k)) throw Error(Errc::invalid_argument, "unknown parameter '" + k + "'");
  }
};

Trace generate(const std::string& gen, Params& p, std::uint64_t seed) {
  const int d = static_cast<int>(p.count("d", 2));
  const BoundingBox box{p.real("lo", 0.0), p.real("hi", 1000.0)};
  Trace t;
  if (gen == "uniform") {
    t = gen_uniform(p.count("n", 100), d, seed, box);
  } else if (gen == "clustered") {
    t = gen_clustered(p.count("n", 100), d, seed, p.count("clusters", 8), p.real("spread", 10.0), box);
  } else if (gen == "churn") {
    Placement pl;
    pl.box = box;
    const std::string kind = p.text("placement", "uniform");
    if (kind == "spread") {
      pl.kind = Placement::Kind::spread;
    } else if (kind != "uniform") {
      throw Error(Errc::invalid_argument, "placement must be uniform or spread");
    }
    pl.levels = static_cast<int>(p.count("levels", 8));
    pl.clusters = p.count("clusters", 8);
    t = gen_churn(p.count("n_base", 60), p.count("n_ops", 120), seed, p.real("delete_fraction", 0.3), d, pl);
  } else {
    throw Error(Errc::invalid_argument, "unknown generator '" + gen + "' (uniform, clustered, churn)");
  }
  p.finish();
  return t;
}

int fail(const std::exception& e) {
  std::cerr << "dynspan: " << e.what() << '\n';
  return harness::exit_input;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic light (1+eps)-spanner harness"};
  app.require_subcommand(1);

  std::string trace_path, config_path, out_prefix;
  std::size_t verify_every = 25, verify_max_n = 400, cap = 0;
  auto* run = app.add_subcommand("run", "replay a trace, write <prefix>.ops.csv and <prefix>.summary.json");
  run->add_option("--trace", trace_path, "trace file")->required();
  run->add_option("--config", config_path, "config JSON")->required();
  run->add_option("--verify-every", verify_every, "ops between oracle checkpoints, 0 disables")->capture_default_str();
  run->add_option("--verify-max-n", verify_max_n, "skip verification above this many points")->capture_default_str();
  run->add_option("--maintenance-cap", cap, "iteration cap per maintenance run, 0 for the default");
  run->add_option("--out", out_prefix, "output prefix (default: $DYNSPAN_OUT_DIR/<trace name>)");

  std::string generator, gen_out;
  std::uint64_t seed = 1;
  std::vector<std::string> params;
  auto* gen = app.add_subcommand("gen", "write a generated trace");
  gen->add_option("generator", generator, "uniform, clustered or churn")->required();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--param,-p", params, "key=value, e.g. n=100 d=2 delete_fraction=0.3");
  gen->add_option("--out", gen_out, "output file (default: $DYNSPAN_OUT_DIR/<generator>-<seed>.trace)");

  std::string state_path;
  auto* ver = app.add_subcommand("verify", "replay a trace or load a state, print the oracle report");
  auto* vt = ver->add_option("--trace", trace_path, "trace file");
  auto* vs = ver->add_option("--state", state_path, "state dump");
  vt->excludes(vs);
  ver->add_option("--config", config_path, "config JSON")->required();

  std::vector<std::string> csvs;
  std::string report_out;
  auto* rep = app.add_subcommand("report", "aggregate ops CSV files");
  rep->add_option("csv", csvs, "ops CSV files")->required();
  rep->add_option("--out", report_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Config cfg = harness::parse_config(harness::read_file(config_path));
      const Trace trace = parse_trace(harness::read_file(trace_path));
      if (out_prefix.empty()) out_prefix = (out_dir() / fs::path(trace_path).stem()).string();
      const auto res = harness::run(trace, cfg, {verify_every, verify_max_n, cap});
      harness::write_file(out_prefix + ".ops.csv", harness::ops_csv(res.records));
      harness::write_file(out_prefix + ".summary.json", res.summary.dump(2) + "\n");
      for (const auto& w : res.warnings) std::cerr << "dynspan: warning: " << w << '\n';
      if (res.status != harness::exit_ok) std::cerr << "dynspan: " << res.message << '\n';
      return res.status;
    }
    if (*gen) {
      Params p{parse_params(params), {}};
      const Trace t = generate(generator, p, seed);
      if (gen_out.empty()) gen_out = (out_dir() / (generator + "-" + std::to_string(seed) + ".trace")).string();
      harness::write_file(gen_out, render_trace(t));
      return harness::exit_ok;
    }
    if (*ver) {
      if (trace_path.empty() == state_path.empty()) throw Error(Errc::invalid_argument, "give exactly one of --trace, --state");
      const Config cfg = harness::parse_config(harness::read_file(config_path));
      oracle::VerificationReport r;
      if (!state_path.empty()) {
        r = harness::verify_state(harness::parse_state(harness::read_file(state_path)), cfg);
      } else {
        const Trace t = parse_trace(harness::read_file(trace_path));
        if (t.dim != cfg.dim) throw Error(Errc::invalid_argument, "trace dim differs from config dim");
        DynamicSpanner ds(cfg);
        for (const TraceOp& op : t.ops) {
          const OpResult o = op.kind == TraceOp::Kind::insert ? ds.insert(op.coords) : ds.erase(op.target);
          if (!o.maintenance.converged) {
            std::cerr << "dynspan: maintenance did not converge\n";
            return harness::exit_nonconverged;
          }
        }
        r = ds.verify(t.ops.size());
      }
      std::cout << oracle::to_json(r).dump(2) << '\n';
      return r.clean(cfg) ? harness::exit_ok : harness::exit_verify;
    }
    if (*rep) {
      std::vector<harness::ReportRow> rows;
      for (const std::string& f : csvs) rows.push_back(harness::aggregate(harness::parse_ops_csv(harness::read_file(f)), f));
      const std::string table = harness::report_csv(rows);
      if (report_out.empty()) {
        std::cout << table;
      } else {
        harness::write_file(report_out, table);
      }
      return harness::exit_ok;
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(e);
  }
  return harness::exit_ok;
}
