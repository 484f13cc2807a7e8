#pragma once

// Shared vocabulary: errors, point ids, configuration and the length bucketing
// arithmetic used by every other module.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dynspan {

enum class Errc {
  invalid_argument,
  infeasible_config,
  duplicate_point,
  dead_point,
  identical_points,
  parse_error,
  precondition,
  instance_too_large,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Ids are handed out sequentially and never reused.
enum class PointId : std::uint32_t {};

constexpr std::size_t idx(PointId p) noexcept { return static_cast<std::size_t>(p); }
constexpr PointId make_id(std::size_t i) noexcept { return static_cast<PointId>(i); }

// Unordered point pair, stored with a < b.
struct PointPair {
  PointId a{};
  PointId b{};

  PointPair() = default;
  PointPair(PointId x, PointId y) : a(std::min(x, y)), b(std::max(x, y)) {}

  friend bool operator==(const PointPair&, const PointPair&) = default;
  friend auto operator<=>(const PointPair&, const PointPair&) = default;
};

struct PointPairHash {
  std::size_t operator()(const PointPair& e) const noexcept {
    std::uint64_t k = (std::uint64_t(idx(e.a)) << 32) | std::uint64_t(idx(e.b));
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) noexcept {
  return a - floor_div(a, b) * b;
}

// R^level for integer levels.
inline double level_radius(double R, int level) { return std::pow(R, level); }

// Smallest integer j with R^j >= x (x > 0).
inline int ceil_level(double x, double R) {
  int j = static_cast<int>(std::ceil(std::log(x) / std::log(R)));
  while (level_radius(R, j - 1) >= x) --j;
  while (level_radius(R, j) < x) ++j;
  return j;
}

// --------------------------------------------------------------------------
// Bucketing
// --------------------------------------------------------------------------

// For a pair at distance L: c^(k*size + index) <= L < c^(k*size + index + 1).
struct BucketCoord {
  std::int64_t index = 0;
  std::int64_t size = 0;

  friend bool operator==(const BucketCoord&, const BucketCoord&) = default;
};

inline constexpr double kLogSnap = 1e-12;

// floor(log_c len), snapped to the nearest integer when within a relative
// 1e-12 of it so that lengths sitting on a power of c classify stably.
inline std::int64_t floor_log(double len, double c) {
  const double x = std::log(len) / std::log(c);
  const double r = std::round(x);
  if (std::abs(x - r) <= kLogSnap * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(x));
}

inline BucketCoord bucket_of_length(double len, double c, std::int64_t k) {
  if (!(len > 0.0)) throw Error(Errc::identical_points, "bucket of a zero-length pair");
  const std::int64_t m = floor_log(len, c);
  return {floor_mod(m, k), floor_div(m, k)};
}

// --------------------------------------------------------------------------
// Configuration
// --------------------------------------------------------------------------

enum class Mode { theory, practical };

inline const char* to_string(Mode m) { return m == Mode::theory ? "theory" : "practical"; }

struct ConfigOverrides {
  std::optional<double> c;
  std::optional<std::int64_t> k;
  std::optional<double> lambda;
  std::optional<double> cphi;
  // Practical mode only: pins eps' when the closed form is not positive.
  std::optional<double> eps_prime;
};

struct ConfigCheck {
  std::string name;
  bool holds = false;
  bool waived = false;
};

struct Config {
  int dim = 2;
  double eps_target = 0.5;
  // Stretch parameter of each of the two layers; (1+eps)^2 = 1+eps_target.
  double eps = 0.0;
  double eps_prime = 0.0;
  double c = 1.0;
  double C = 1.0;
  std::int64_t k = 1;
  double R = 2.0;
  double lambda = 1.0;
  double cphi = 2.0;
  Mode mode = Mode::practical;
  bool eps_prime_pinned = false;

  double C1 = 0, C2 = 0, C3 = 0, C4 = 0, C5 = 0;
  double d_max = 0;
  double rep_bound = 0;
  double p_max = 0;
  int block_len = 1;

  std::vector<ConfigCheck> checks;
};

namespace detail {

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

// log_c(1 + x) without losing precision for c close to 1.
inline double log_c_1p(double x, double c) { return std::log1p(x) / std::log(c); }

}  // namespace detail

inline Config derive_config(int dim, double eps_target, double R, Mode mode,
                            const ConfigOverrides& ov = {}) {
  using detail::require;
  require(dim >= 1, Errc::invalid_argument, "dim must be >= 1");
  require(std::isfinite(eps_target) && eps_target > 0, Errc::invalid_argument,
          "eps must be positive");
  require(std::isfinite(R) && R > 1, Errc::invalid_argument, "R must be > 1");

  Config cfg;
  cfg.dim = dim;
  cfg.eps_target = eps_target;
  cfg.eps = std::sqrt(1.0 + eps_target) - 1.0;
  cfg.R = R;
  cfg.mode = mode;

  const double lambda_formula = 4.0 * (2.0 + eps_target) / eps_target * R;
  cfg.lambda = ov.lambda.value_or(lambda_formula);
  require(std::isfinite(cfg.lambda) && cfg.lambda > 1, Errc::invalid_argument, "lambda must be > 1");
  cfg.block_len = std::max(1, ceil_level(cfg.lambda, R));

  cfg.cphi = ov.cphi.value_or(2.0);
  require(cfg.cphi > 1, Errc::invalid_argument, "Cphi must be > 1");

  const double lam2 = 1.0 / (cfg.lambda * cfg.lambda);
  cfg.c = ov.c.value_or(1.0 + 0.5 * lam2);
  require(std::isfinite(cfg.c) && cfg.c > 1, Errc::invalid_argument, "c must be > 1");

  const double eps_prime_formula = (1.0 + lam2) / cfg.c - 1.0;
  if (ov.eps_prime) {
    require(mode == Mode::practical, Errc::invalid_argument,
            "eps' can only be pinned in practical mode");
    cfg.eps_prime = *ov.eps_prime;
    cfg.eps_prime_pinned = true;
  } else {
    require(eps_prime_formula > 0, Errc::infeasible_config,
            "infeasible config: c >= 1 + lambda^-2 forces eps' <= 0");
    cfg.eps_prime = eps_prime_formula;
  }
  require(cfg.eps_prime > 0 && cfg.eps_prime < cfg.eps, Errc::infeasible_config,
          "infeasible config: eps' must lie in (0, eps)");

  const double d = dim;
  const double e = cfg.eps;
  const double ep = cfg.eps_prime;
  cfg.C1 = std::pow(2.0 * (1.0 + e) / ep, 2.0 * d) * std::pow(d, d);
  cfg.C2 = std::pow(1.0 + e, d) * std::pow(cfg.c, d) * cfg.C1;
  cfg.C3 = e * cfg.C2 * cfg.c;
  cfg.C4 = cfg.C1 * std::pow((1.0 + e) * cfg.c, 2.0 * d);
  cfg.C5 = cfg.C3 * (cfg.C4 + 1.0);
  const double packing = std::pow(d, d / 2.0) * std::pow(cfg.lambda, d);
  cfg.rep_bound = packing + 2.0;
  cfg.d_max = cfg.rep_bound * cfg.block_len * (packing + std::pow(d, d / 2.0) * std::pow(R, d) + 2.0);
  cfg.p_max = std::max(1.0 + e, cfg.cphi * (e - ep));

  const double k_inv1 = detail::log_c_1p(cfg.C3 / ((cfg.cphi - 1.0) * (e - ep)), cfg.c);
  const double k_inv2 = detail::log_c_1p(2.0 * cfg.C5 / (e - ep), cfg.c);

  if (mode == Mode::theory) {
    const double need = std::ceil(std::max(k_inv1, k_inv2));
    require(std::isfinite(need) && need < 9.0e15, Errc::infeasible_config,
            "infeasible config: bucket count overflows");
    cfg.k = ov.k.value_or(static_cast<std::int64_t>(need));
  } else {
    cfg.k = ov.k.value_or(8);
  }
  require(cfg.k >= 1, Errc::invalid_argument, "k must be >= 1");
  cfg.C = std::pow(cfg.c, static_cast<double>(cfg.k));

  const double kd = static_cast<double>(cfg.k);
  const bool practical = mode == Mode::practical;
  auto add_check = [&](std::string name, bool holds) {
    if (!holds && !practical)
      throw Error(Errc::infeasible_config, "infeasible config: " + name + " violated");
    cfg.checks.push_back({std::move(name), holds, !holds});
  };
  add_check("eps_prime_single_insertion", ep <= eps_prime_formula * (1.0 + 1e-12) + 1e-15);
  add_check("k_fix_inv1", kd >= k_inv1);
  add_check("k_fix_inv2", kd >= k_inv2);
  add_check("lambda_sparse_stretch", cfg.lambda >= lambda_formula * (1.0 - 1e-12));
  return cfg;
}

// --------------------------------------------------------------------------
// Point storage
// --------------------------------------------------------------------------

// Coordinates of dead points stay readable so that deletions can be processed
// after the point has been retired.
class PointStore {
 public:
  explicit PointStore(int dim) : dim_(dim) {
    if (dim < 1) throw Error(Errc::invalid_argument, "dim must be >= 1");
  }

  int dim() const noexcept { return dim_; }
  std::size_t capacity() const noexcept { return alive_.size(); }
  std::size_t size() const noexcept { return alive_ids_.size(); }
  bool empty() const noexcept { return alive_ids_.empty(); }

  PointId insert(std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim_)
      throw Error(Errc::invalid_argument, "coordinate dimension mismatch");
    for (double v : x)
      if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "non-finite coordinate");
    for (PointId q : alive_ids_)
      if (std::equal(x.begin(), x.end(), coords(q).begin()))
        throw Error(Errc::duplicate_point, "duplicate point coordinates");
    const PointId id = make_id(alive_.size());
    coords_.insert(coords_.end(), x.begin(), x.end());
    alive_.push_back(1);
    position_.push_back(alive_ids_.size());
    alive_ids_.push_back(id);
    return id;
  }

  void erase(PointId p) {
    require_alive(p);
    alive_[idx(p)] = 0;
    const std::size_t pos = position_[idx(p)];
    const PointId last = alive_ids_.back();
    alive_ids_[pos] = last;
    position_[idx(last)] = pos;
    alive_ids_.pop_back();
  }

  bool alive(PointId p) const noexcept { return idx(p) < alive_.size() && alive_[idx(p)]; }

  void require_alive(PointId p) const {
    if (!alive(p)) throw Error(Errc::dead_point, "point " + std::to_string(idx(p)) + " is not alive");
  }

  std::span<const double> coords(PointId p) const {
    return {coords_.data() + idx(p) * dim_, static_cast<std::size_t>(dim_)};
  }

  // Unordered; callers that need determinism sort or tie-break by id.
  const std::vector<PointId>& alive_ids() const noexcept { return alive_ids_; }

  std::vector<PointId> sorted_alive_ids() const {
    std::vector<PointId> ids = alive_ids_;
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  double distance(PointId u, PointId v) const { return distance_to(coords(u), v); }

  double distance_to(std::span<const double> x, PointId v) const {
    const double* y = coords_.data() + idx(v) * dim_;
    double s = 0;
    for (int i = 0; i < dim_; ++i) {
      const double t = x[i] - y[i];
      s += t * t;
    }
    return std::sqrt(s);
  }

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<char> alive_;
  std::vector<std::size_t> position_;
  std::vector<PointId> alive_ids_;
};

inline BucketCoord pair_bucket(const Config& cfg, const PointStore& pts, PointId u, PointId v) {
  pts.require_alive(u);
  pts.require_alive(v);
  if (u == v) throw Error(Errc::identical_points, "pair_bucket of a point with itself");
  return bucket_of_length(pts.distance(u, v), cfg.c, cfg.k);
}

inline double distance(const PointStore& pts, PointId u, PointId v) {
  pts.require_alive(u);
  pts.require_alive(v);
  return pts.distance(u, v);
}

}  // namespace dynspan
