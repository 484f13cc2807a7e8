#pragma once

// Operation traces: generators, text format and validation.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniform reals take the top 53 bits; normals use Box-Muller.
// The standard distributions are avoided because their algorithms are
// implementation defined.

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace dynspan {

struct TraceOp {
  enum class Kind { insert, erase };
  Kind kind{};
  std::vector<double> coords;  // insert only
  PointId target{};            // erase only

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

struct Trace {
  int dim = 2;
  std::vector<TraceOp> ops;
  std::string generator;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;

  friend bool operator==(const Trace&, const Trace&) = default;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  double normal() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::mt19937_64 g_;
};

struct BoundingBox {
  double lo = 0.0;
  double hi = 1000.0;
};

namespace detail {

inline std::string fmt_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

// Draws until the point differs from every alive one.
template <class Draw>
std::vector<double> fresh_point(std::set<std::vector<double>>& alive, Draw&& draw) {
  while (true) {
    std::vector<double> x = draw();
    if (alive.insert(x).second) return x;
  }
}

}  // namespace detail

inline Trace gen_uniform(std::size_t n, int d, std::uint64_t seed, BoundingBox box = {}) {
  if (n < 1 || d < 1) throw Error(Errc::invalid_argument, "gen_uniform needs n >= 1 and d >= 1");
  Trace t{d, {}, "uniform", seed, {{"n", std::to_string(n)}, {"lo", detail::fmt_real(box.lo)}, {"hi", detail::fmt_real(box.hi)}}};
  Rng rng(seed);
  std::set<std::vector<double>> alive;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = detail::fresh_point(alive, [&] {
      std::vector<double> p(d);
      for (double& v : p) v = rng.uniform(box.lo, box.hi);
      return p;
    });
    t.ops.push_back({TraceOp::Kind::insert, std::move(x), {}});
  }
  return t;
}

// Mixture of Gaussian balls with per-axis standard deviation `spread` around
// centers drawn uniformly in the box.
inline Trace gen_clustered(std::size_t n, int d, std::uint64_t seed, std::size_t clusters, double spread,
                           BoundingBox box = {}) {
  if (n < 1 || d < 1 || clusters < 1 || !(spread > 0))
    throw Error(Errc::invalid_argument, "gen_clustered needs n, d, clusters >= 1 and spread > 0");
  Trace t{d,
          {},
          "clustered",
          seed,
          {{"n", std::to_string(n)}, {"clusters", std::to_string(clusters)}, {"spread", detail::fmt_real(spread)}}};
  Rng rng(seed);
  std::vector<std::vector<double>> centers(clusters, std::vector<double>(d));
  for (auto& c : centers)
    for (double& v : c) v = rng.uniform(box.lo, box.hi);
  std::set<std::vector<double>> alive;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = detail::fresh_point(alive, [&] {
      const auto& c = centers[rng.below(clusters)];
      std::vector<double> p(d);
      for (int a = 0; a < d; ++a) p[a] = c[a] + spread * rng.normal();
      return p;
    });
    t.ops.push_back({TraceOp::Kind::insert, std::move(x), {}});
  }
  return t;
}

// Where churn traces place inserted points.
struct Placement {
  enum class Kind { uniform, spread };
  Kind kind = Kind::uniform;
  // spread: `clusters` balls whose radii fall geometrically from 1 to
  // 2^-levels; pushes log2 of the aspect ratio to about levels plus a few.
  int levels = 8;
  std::size_t clusters = 8;
  BoundingBox box{};
};

inline Trace gen_churn(std::size_t n_base, std::size_t n_ops, std::uint64_t seed, double delete_fraction, int d = 2,
                       Placement place = {}) {
  if (!(delete_fraction >= 0 && delete_fraction < 1))
    throw Error(Errc::invalid_argument, "delete fraction must lie in [0, 1)");
  if (d < 1) throw Error(Errc::invalid_argument, "dimension must be >= 1");
  Trace t{d,
          {},
          "churn",
          seed,
          {{"n_base", std::to_string(n_base)},
           {"n_ops", std::to_string(n_ops)},
           {"delete_fraction", detail::fmt_real(delete_fraction)}}};
  Rng rng(seed);

  std::vector<std::vector<double>> centers;
  std::vector<double> radii;
  if (place.kind == Placement::Kind::spread) {
    t.params["placement"] = "spread";
    t.params["levels"] = std::to_string(place.levels);
    t.params["clusters"] = std::to_string(place.clusters);
    const std::size_t m = std::max<std::size_t>(place.clusters, 2);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> c(d);
      for (double& v : c) v = rng.uniform();
      centers.push_back(std::move(c));
      radii.push_back(std::exp2(-static_cast<double>(place.levels) * static_cast<double>(j) / static_cast<double>(m - 1)));
    }
  }
  auto draw = [&] {
    std::vector<double> p(d);
    if (place.kind == Placement::Kind::uniform) {
      for (double& v : p) v = rng.uniform(place.box.lo, place.box.hi);
      return p;
    }
    const std::size_t j = rng.below(centers.size());
    // Uniform in the ball by rejection from the cube.
    while (true) {
      double s = 0;
      for (double& v : p) {
        v = rng.uniform(-1.0, 1.0);
        s += v * v;
      }
      if (s <= 1.0) break;
    }
    for (int a = 0; a < d; ++a) p[a] = centers[j][a] + radii[j] * p[a];
    return p;
  };

  std::set<std::vector<double>> alive_coords;
  std::vector<std::pair<PointId, std::vector<double>>> alive;
  std::size_t next_id = 0;
  auto insert = [&] {
    auto x = detail::fresh_point(alive_coords, draw);
    alive.emplace_back(make_id(next_id++), x);
    t.ops.push_back({TraceOp::Kind::insert, std::move(x), {}});
  };
  for (std::size_t i = 0; i < n_base; ++i) insert();
  for (std::size_t i = 0; i < n_ops; ++i) {
    const double u = rng.uniform();
    if (u < delete_fraction && alive.size() > 2) {
      const std::size_t j = rng.below(alive.size());
      t.ops.push_back({TraceOp::Kind::erase, {}, alive[j].first});
      alive_coords.erase(alive[j].second);
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      insert();
    }
  }
  return t;
}

// ---- text format -----------------------------------------------------------

inline std::string render_trace(const Trace& t) {
  std::ostringstream os;
  if (!t.generator.empty()) {
    os << "# trace generator=" << t.generator << " seed=" << t.seed;
    for (const auto& [k, v] : t.params) os << ' ' << k << '=' << v;
    os << '\n';
  }
  os << "dim " << t.dim << '\n';
  for (const TraceOp& op : t.ops) {
    if (op.kind == TraceOp::Kind::insert) {
      os << '+';
      for (double v : op.coords) os << ' ' << detail::fmt_real(v);
    } else {
      os << "- " << idx(op.target);
    }
    os << '\n';
  }
  return os.str();
}

inline Trace parse_trace(const std::string& text) {
  Trace t;
  bool have_dim = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t next_id = 0;
  std::vector<char> alive;
  std::set<std::vector<double>> coords_alive;
  std::vector<std::vector<double>> coords_of;
  auto fail = [&](const std::string& what) -> Error {
    return Error(Errc::parse_error, "line " + std::to_string(lineno) + ": " + what);
  };
  auto parse_real = [&](const std::string& tok) {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) throw fail("bad number '" + tok + "'");
    return v;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      std::istringstream meta(line.substr(hash + 1));
      std::string word;
      if (meta >> word && word == "trace") {
        while (meta >> word) {
          const auto eq = word.find('=');
          if (eq == std::string::npos) continue;
          const std::string k = word.substr(0, eq), v = word.substr(eq + 1);
          if (k == "generator") {
            t.generator = v;
          } else if (k == "seed") {
            t.seed = std::stoull(v);
          } else {
            t.params[k] = v;
          }
        }
      }
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;

    if (!have_dim) {
      if (tok.size() != 2 || tok[0] != "dim") throw fail("expected 'dim <d>'");
      int d = 0;
      auto [p, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), d);
      if (ec != std::errc() || p != tok[1].data() + tok[1].size() || d < 1) throw fail("bad dimension");
      t.dim = d;
      have_dim = true;
      continue;
    }
    if (tok[0] == "+") {
      if (static_cast<int>(tok.size()) - 1 != t.dim) throw fail("dimension mismatch");
      std::vector<double> x;
      for (std::size_t i = 1; i < tok.size(); ++i) x.push_back(parse_real(tok[i]));
      if (!coords_alive.insert(x).second) throw fail("duplicate point");
      coords_of.push_back(x);
      alive.push_back(1);
      ++next_id;
      t.ops.push_back({TraceOp::Kind::insert, std::move(x), {}});
    } else if (tok[0] == "-") {
      if (tok.size() != 2) throw fail("expected '- <id>'");
      std::size_t id = 0;
      auto [p, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), id);
      if (ec != std::errc() || p != tok[1].data() + tok[1].size()) throw fail("bad id '" + tok[1] + "'");
      if (id >= next_id || !alive[id]) throw fail("delete of dead id " + tok[1]);
      alive[id] = 0;
      coords_alive.erase(coords_of[id]);
      t.ops.push_back({TraceOp::Kind::erase, {}, make_id(id)});
    } else {
      throw fail("unknown operation '" + tok[0] + "'");
    }
  }
  if (!have_dim) throw Error(Errc::parse_error, "missing 'dim' line");
  return t;
}

}  // namespace dynspan
