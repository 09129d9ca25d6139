#pragma once

// Monogamy checks over tripartite states A|B|C: CKW inequality, alpha-power
// search, equality-slab probes, bound functions and region scans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "entmono/measures.hpp"
#include "entmono/states.hpp"

namespace entmono {

enum class MeasureId { concurrence, concurrence_sq, eof, ree };

inline const char* to_string(MeasureId m) {
  switch (m) {
    case MeasureId::concurrence: return "concurrence";
    case MeasureId::concurrence_sq: return "concurrence_sq";
    case MeasureId::eof: return "eof";
    case MeasureId::ree: return "ree";
  }
  return "unknown";
}

inline std::optional<MeasureId> parse_measure_id(std::string_view s) {
  if (s == "concurrence") return MeasureId::concurrence;
  if (s == "concurrence_sq" || s == "tangle") return MeasureId::concurrence_sq;
  if (s == "eof") return MeasureId::eof;
  if (s == "ree") return MeasureId::ree;
  return std::nullopt;
}

struct MonogamyTriple {
  double e_ab = 0.0;
  double e_ac = 0.0;
  double e_abc = 0.0;
  MeasureId measure = MeasureId::concurrence_sq;
  std::uint64_t state_ref = 0;  // sample seed or state fingerprint
};

// Concurrence measures are checked in CKW form (squared); eof and ree against
// monotonicity under partial trace, E_A(BC) >= max(E_AB, E_AC).
enum class SlackKind { ckw, partial_trace };

inline SlackKind slack_kind(MeasureId m) {
  return (m == MeasureId::concurrence || m == MeasureId::concurrence_sq) ? SlackKind::ckw : SlackKind::partial_trace;
}

inline const char* to_string(SlackKind k) { return k == SlackKind::ckw ? "ckw" : "partial_trace"; }

inline double slack(const MonogamyTriple& t) {
  switch (t.measure) {
    case MeasureId::concurrence_sq: return t.e_abc - t.e_ab - t.e_ac;
    case MeasureId::concurrence: return t.e_abc * t.e_abc - t.e_ab * t.e_ab - t.e_ac * t.e_ac;
    default: return t.e_abc - std::max(t.e_ab, t.e_ac);
  }
}

inline std::uint64_t fingerprint(const QuantumState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  if (state.has_vector())
    for (const cplx& z : state.vector().data()) mix(z.real()), mix(z.imag());
  else
    for (const cplx& z : state.density().data()) mix(z.real()), mix(z.imag());
  return h;
}

namespace detail {

inline void require_tripartite(const QuantumState& s) {
  if (s.dims().size() != 3) fail(ErrorCode::dimension_mismatch, "tripartite state needs three subsystems");
}

inline void require_three_qubits(const QuantumState& s) {
  if (s.dims() != Dims{2, 2, 2}) fail(ErrorCode::dimension_mismatch, "measure needs dims [2,2,2]");
}

// Columns w_c with rho_AB = sum_c |w_c><w_c| (and likewise rho_AC), read
// straight from the amplitudes of a three-qubit pure state.
inline std::vector<Vector> factor_ab(const Vector& v) {
  std::vector<Vector> cols;
  for (std::size_t c = 0; c < 2; ++c) {
    Vector w(4);
    for (std::size_t ab = 0; ab < 4; ++ab) w[ab] = v[ab * 2 + c];
    cols.push_back(w);
  }
  return cols;
}

inline std::vector<Vector> factor_ac(const Vector& v) {
  std::vector<Vector> cols;
  for (std::size_t b = 0; b < 2; ++b) {
    Vector w(4);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t c = 0; c < 2; ++c) w[a * 2 + c] = v[a * 4 + b * 2 + c];
    cols.push_back(w);
  }
  return cols;
}

inline double det_qubit(const Matrix& r) {
  return std::max(0.0, r(0, 0).real() * r(1, 1).real() - std::norm(r(0, 1)));
}

inline double bipartite_eof(const Matrix& rho, std::size_t d1, std::size_t d2, const OptimizerConfig& cfg) {
  if (d1 == 2 && d2 == 2) return eof_two_qubit(rho).value;
  return eof_convex_roof(QuantumState::mixed({d1, d2}, rho), Bipartition{{0}}, cfg).value;
}

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// (E_AB, E_AC, E_A(BC)) for a pure tripartite state. Concurrence measures use
// exact factorizations; eof and ree use the entropy across A|(BC), which is
// their value on pure states.
inline MonogamyTriple evaluate_pure_triple(MeasureId measure, const QuantumState& psi, const OptimizerConfig& cfg = {}) {
  if (!psi.has_vector()) fail(ErrorCode::invalid_argument, "pure-state triple needs a pure state");
  detail::require_tripartite(psi);
  const Dims& dims = psi.dims();
  MonogamyTriple t;
  t.measure = measure;
  t.state_ref = fingerprint(psi);
  const std::size_t a[] = {0};
  const Matrix rho_a = psi.reduced(a);

  switch (measure) {
    case MeasureId::concurrence:
    case MeasureId::concurrence_sq: {
      detail::require_three_qubits(psi);
      const Vector& v = psi.vector();
      const double c_ab = concurrence_from_factor(detail::factor_ab(v));
      const double c_ac = concurrence_from_factor(detail::factor_ac(v));
      const double tangle = 4.0 * detail::det_qubit(rho_a);
      if (measure == MeasureId::concurrence_sq) {
        t.e_ab = c_ab * c_ab;
        t.e_ac = c_ac * c_ac;
        t.e_abc = tangle;
      } else {
        t.e_ab = c_ab;
        t.e_ac = c_ac;
        t.e_abc = std::min(1.0, std::sqrt(tangle));
      }
      break;
    }
    case MeasureId::eof: {
      t.e_abc = von_neumann_entropy(rho_a);
      if (dims == Dims{2, 2, 2}) {
        const Vector& v = psi.vector();
        t.e_ab = eof_from_concurrence(concurrence_from_factor(detail::factor_ab(v)));
        t.e_ac = eof_from_concurrence(concurrence_from_factor(detail::factor_ac(v)));
      } else {
        const std::size_t ab[] = {0, 1}, ac[] = {0, 2};
        t.e_ab = detail::bipartite_eof(psi.reduced(ab), dims[0], dims[1], cfg);
        t.e_ac = detail::bipartite_eof(psi.reduced(ac), dims[0], dims[2], cfg);
      }
      break;
    }
    case MeasureId::ree: {
      t.e_abc = von_neumann_entropy(rho_a);
      const std::size_t ab[] = {0, 1}, ac[] = {0, 2};
      t.e_ab = ree_upper_bound(QuantumState::mixed({dims[0], dims[1]}, psi.reduced(ab)), Bipartition{{0}}, cfg).value;
      t.e_ac = ree_upper_bound(QuantumState::mixed({dims[0], dims[2]}, psi.reduced(ac)), Bipartition{{0}}, cfg).value;
      break;
    }
  }
  return t;
}

inline MonogamyTriple ckw_pure(const QuantumState& psi) {
  if (!psi.has_vector()) fail(ErrorCode::invalid_argument, "ckw_pure needs a pure state");
  detail::require_three_qubits(psi);
  return evaluate_pure_triple(MeasureId::concurrence_sq, psi);
}

// Mixed three-qubit CKW check. E_A(BC) is the optimizer's upper bound on the
// convex roof of the tangle, so a nonnegative slack is a necessary (weaker)
// condition, not a verification of the inequality.
inline MonogamyTriple ckw_mixed(const QuantumState& rho, const OptimizerConfig& cfg = {}) {
  detail::require_three_qubits(rho);
  const std::size_t ab[] = {0, 1}, ac[] = {0, 2};
  MonogamyTriple t;
  t.measure = MeasureId::concurrence_sq;
  t.state_ref = fingerprint(rho);
  const double c_ab = concurrence_two_qubit(rho.reduced(ab));
  const double c_ac = concurrence_two_qubit(rho.reduced(ac));
  t.e_ab = c_ab * c_ab;
  t.e_ac = c_ac * c_ac;
  t.e_abc = tangle_convex_roof(rho.as_mixed(), Bipartition{{0}}, cfg).value;
  return t;
}

struct ScanSample {
  std::size_t index = 0;
  Seed seed = 0;
  MonogamyTriple triple;
  double slack = 0.0;
};

struct ScanReport {
  MeasureId measure = MeasureId::concurrence_sq;
  Dims dims{2, 2, 2};
  Seed master_seed = 0;
  double tolerance = 1e-9;
  SlackKind kind = SlackKind::ckw;
  bool heuristic_rhs = false;  // E_A(BC) is an optimizer upper bound
  std::vector<ScanSample> samples;
  std::size_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::optional<double> alpha_star;
};

inline constexpr double ckw_tolerance = 1e-9;
inline constexpr double monotonicity_tolerance = 1e-8;

inline double default_tolerance(MeasureId m) {
  return slack_kind(m) == SlackKind::ckw ? ckw_tolerance : monotonicity_tolerance;
}

inline void finalize(ScanReport& report) {
  report.violations = 0;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (const ScanSample& s : report.samples) {
    report.min_slack = std::min(report.min_slack, s.slack);
    if (s.slack < -report.tolerance) ++report.violations;
  }
}

inline void check_scan_dims(MeasureId measure, const Dims& dims) {
  if (dims.size() != 3) fail(ErrorCode::invalid_argument, "scans need three subsystems");
  for (std::size_t d : dims)
    if (d < 2) fail(ErrorCode::invalid_argument, "subsystem dimensions must be >= 2");
  if (slack_kind(measure) == SlackKind::ckw && dims != Dims{2, 2, 2})
    fail(ErrorCode::invalid_argument, std::string(to_string(measure)) + " needs dims 2,2,2");
}

// Haar-random pure samples; sample i is drawn from derive_seed(seed, i).
inline std::vector<MonogamyTriple> sample_triples(MeasureId measure, const Dims& dims, std::size_t n_samples, Seed seed,
                                                  unsigned threads = 1, const OptimizerConfig& cfg = {}) {
  check_scan_dims(measure, dims);
  std::vector<MonogamyTriple> out(n_samples);
  detail::parallel_for(n_samples, threads, [&](std::size_t i) {
    const Seed s = derive_seed(seed, i);
    out[i] = evaluate_pure_triple(measure, haar_random_pure(dims, s), cfg);
    out[i].state_ref = s;
  });
  return out;
}

inline ScanReport region_scan(MeasureId measure, const Dims& dims, std::size_t n_samples, Seed seed, unsigned threads = 1,
                              const OptimizerConfig& cfg = {}) {
  ScanReport report;
  report.measure = measure;
  report.dims = dims;
  report.master_seed = seed;
  report.kind = slack_kind(measure);
  report.tolerance = default_tolerance(measure);
  report.heuristic_rhs = false;
  const auto triples = sample_triples(measure, dims, n_samples, seed, threads, cfg);
  for (std::size_t i = 0; i < triples.size(); ++i)
    report.samples.push_back({i, triples[i].state_ref, triples[i], slack(triples[i])});
  finalize(report);
  return report;
}

inline ScanReport scan_ckw(std::size_t n_samples, Seed seed, unsigned threads = 1) {
  return region_scan(MeasureId::concurrence_sq, {2, 2, 2}, n_samples, seed, threads);
}

// Mixed-state CKW scan over induced states of three qubits with an
// environment of dimension `env`.
inline ScanReport scan_ckw_mixed(std::size_t n_samples, Seed seed, std::size_t env, const OptimizerConfig& cfg,
                                 unsigned threads = 1) {
  ScanReport report;
  report.master_seed = seed;
  report.heuristic_rhs = true;
  std::vector<MonogamyTriple> triples(n_samples);
  detail::parallel_for(n_samples, threads, [&](std::size_t i) {
    const Seed s = derive_seed(seed, i);
    const QuantumState flat = induced_mixed(8, env, s);
    triples[i] = ckw_mixed(QuantumState::mixed({2, 2, 2}, flat.density()), cfg);
    triples[i].state_ref = s;
  });
  for (std::size_t i = 0; i < n_samples; ++i) report.samples.push_back({i, triples[i].state_ref, triples[i], slack(triples[i])});
  finalize(report);
  return report;
}

struct RegionRow {
  std::size_t index = 0;
  double e_ab = 0.0, e_ac = 0.0, e_abc = 0.0;
  double x = 0.0, y = 0.0;  // e_ab / e_abc, e_ac / e_abc (0 when e_abc = 0)
};

inline std::vector<RegionRow> region_table(const ScanReport& report) {
  std::vector<RegionRow> rows;
  for (const ScanSample& s : report.samples) {
    RegionRow r{s.index, s.triple.e_ab, s.triple.e_ac, s.triple.e_abc, 0.0, 0.0};
    if (s.triple.e_abc > 0.0) {
      r.x = s.triple.e_ab / s.triple.e_abc;
      r.y = s.triple.e_ac / s.triple.e_abc;
    }
    rows.push_back(r);
  }
  return rows;
}

// (x^a + y^a)^(1/a), evaluated as max * (1 + (min/max)^a)^(1/a).
inline double power_mean(double x, double y, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorCode::domain_error, "alpha must be positive");
  const double hi = std::max(x, y), lo = std::min(x, y);
  if (hi <= 0.0) return 0.0;
  return hi * std::pow(1.0 + std::pow(lo / hi, alpha), 1.0 / alpha);
}

inline constexpr double alpha_lo = 1.0;
inline constexpr double alpha_hi = 256.0;
inline constexpr int alpha_iterations = 60;
inline constexpr double power_mean_slack = 1e-9;

struct AlphaResult {
  double alpha = alpha_lo;  // +infinity when even alpha_hi fails
  std::optional<std::size_t> violating_index;
  std::vector<MonogamyTriple> triples;
};

inline bool alpha_holds(std::span<const MonogamyTriple> triples, double alpha, std::size_t* first_bad = nullptr) {
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    if (power_mean(t.e_ab, t.e_ac, alpha) > t.e_abc + power_mean_slack) {
      if (first_bad) *first_bad = i;
      return false;
    }
  }
  return true;
}

// Smallest alpha in [alpha_lo, alpha_hi] (bisection to `tol`) with
// (E_AB^a + E_AC^a)^(1/a) <= E_A(BC) on every triple.
inline AlphaResult alpha_search(std::span<const MonogamyTriple> triples, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
  AlphaResult r;
  r.triples.assign(triples.begin(), triples.end());
  if (alpha_holds(triples, alpha_lo)) {
    r.alpha = alpha_lo;
    return r;
  }
  std::size_t bad = 0;
  if (!alpha_holds(triples, alpha_hi, &bad)) {
    r.alpha = std::numeric_limits<double>::infinity();
    r.violating_index = bad;
    return r;
  }
  double lo = alpha_lo, hi = alpha_hi;
  for (int it = 0; it < alpha_iterations && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (alpha_holds(triples, mid) ? hi : lo) = mid;
  }
  r.alpha = hi;
  return r;
}

inline AlphaResult alpha_search(MeasureId measure, const Dims& dims, std::size_t n_samples, Seed seed, double tol,
                                unsigned threads = 1, const OptimizerConfig& cfg = {}) {
  const auto triples = sample_triples(measure, dims, n_samples, seed, threads, cfg);
  return alpha_search(triples, tol);
}

struct TargetedProbe {
  std::string label;
  MonogamyTriple triple;
  bool in_slab = false;
};

struct Def15Report {
  double epsilon = 0.0;
  std::size_t random_samples = 0;
  std::size_t in_slab = 0;           // over random and targeted states
  double max_e_ac_in_slab = 0.0;     // 0 when the slab is empty
  std::vector<TargetedProbe> targeted;
  std::vector<MonogamyTriple> triples;  // random samples
};

// Maximally entangled AB pair (on min(d_A, d_B) levels) times a pure C factor.
inline QuantumState entangled_ab_product_c(const Dims& dims, const Vector& c) {
  const std::size_t m = std::min(dims[0], dims[1]);
  Vector ab(dims[0] * dims[1]);
  for (std::size_t i = 0; i < m; ++i) ab[i * dims[1] + i] = 1.0 / std::sqrt(static_cast<double>(m));
  return QuantumState::pure(dims, tensor(ab, c.normalized()));
}

// Samples with E_A(BC) - E_AB < epsilon; reports the largest E_AC among them.
inline Def15Report def15_probe(MeasureId measure, const Dims& dims, std::size_t n_samples, Seed seed, double epsilon,
                               unsigned threads = 1, const OptimizerConfig& cfg = {}) {
  if (!(epsilon > 0.0)) fail(ErrorCode::invalid_argument, "epsilon must be positive");
  Def15Report r;
  r.epsilon = epsilon;
  r.random_samples = n_samples;
  r.triples = sample_triples(measure, dims, n_samples, seed, threads, cfg);
  auto consider = [&](const MonogamyTriple& t) {
    const bool in = t.e_abc - t.e_ab < epsilon;
    if (in) {
      ++r.in_slab;
      r.max_e_ac_in_slab = std::max(r.max_e_ac_in_slab, t.e_ac);
    }
    return in;
  };
  for (const auto& t : r.triples) consider(t);

  const std::size_t dc = dims[2];
  std::vector<std::pair<std::string, Vector>> factors;
  factors.emplace_back("c=|0>", Vector::basis(dc, 0));
  factors.emplace_back("c=|1>", Vector::basis(dc, 1));
  Vector plus(dc);
  for (std::size_t i = 0; i < dc; ++i) plus[i] = 1.0;
  factors.emplace_back("c=|+>", plus.normalized());
  for (std::uint64_t k = 0; k < 3; ++k) {
    Rng rng(derive_seed(seed ^ 0x5eedULL, k));
    factors.emplace_back("c=random#" + std::to_string(k), haar_random_vector(dc, rng));
  }
  for (auto& [label, c] : factors) {
    const QuantumState s = entangled_ab_product_c(dims, c);
    TargetedProbe p{label, evaluate_pure_triple(measure, s, cfg), false};
    p.in_slab = consider(p.triple);
    r.targeted.push_back(std::move(p));
  }
  return r;
}

enum class BoundKind { f_sum, f_euclid, f_piecewise_44, bound_45, bound_46, power_mean };

inline std::optional<BoundKind> parse_bound_kind(std::string_view s) {
  if (s == "f_sum") return BoundKind::f_sum;
  if (s == "f_euclid") return BoundKind::f_euclid;
  if (s == "f_piecewise_44") return BoundKind::f_piecewise_44;
  if (s == "bound_45") return BoundKind::bound_45;
  if (s == "bound_46") return BoundKind::bound_46;
  if (s == "power_mean") return BoundKind::power_mean;
  return std::nullopt;
}

// The universal constant c of the dimension-weighted bounds has no known
// numerical value; outputs of bound_45 / bound_46 are parametric in it.
struct BoundParams {
  double c = 1.0;
  double exponent = 0.0;  // 0: 8 for bound_45, 4 for bound_46
  Dims dims{2, 2, 2};

  void check() const {
    if (!(c > 0.0)) fail(ErrorCode::invalid_argument, "bound constant c must be positive");
    if (dims.size() != 3) fail(ErrorCode::invalid_argument, "bound needs [d_A, d_B, d_C]");
    for (std::size_t d : dims)
      if (d < 2) fail(ErrorCode::invalid_argument, "bound dimensions must be >= 2");
  }
};

struct BoundPoint {
  double e_ab = 0.0;
  double e_ac = 0.0;
  double e_abc = 0.0;
};

inline double bound_eval(BoundKind kind, const BoundParams& params, const BoundPoint& p,
                         std::optional<double> alpha = std::nullopt) {
  if (p.e_ab < 0.0 || p.e_ac < 0.0 || p.e_abc < 0.0) fail(ErrorCode::domain_error, "bound point must be nonnegative");
  switch (kind) {
    case BoundKind::f_sum: return p.e_ab + p.e_ac;
    case BoundKind::f_euclid: return std::hypot(p.e_ab, p.e_ac);
    case BoundKind::f_piecewise_44: {
      // max(E_AB, E_AC) below the 4/5 threshold, E_AB + E_AC - 4/5 E_A(BC)
      // when both exceed it; the outer max joins the two regions.
      const double threshold = 0.8 * p.e_abc;
      return std::max(std::max(p.e_ab, p.e_ac), p.e_ab + p.e_ac - threshold);
    }
    case BoundKind::bound_45:
    case BoundKind::bound_46: {
      params.check();
      const double k = params.exponent > 0.0 ? params.exponent : (kind == BoundKind::bound_45 ? 8.0 : 4.0);
      const double da = static_cast<double>(params.dims[0]), db = static_cast<double>(params.dims[1]),
                   dc = static_cast<double>(params.dims[2]);
      const double w_c = params.c / (da * dc * std::pow(std::log2(std::min(da, dc)), k));
      const double w_b = params.c / (da * db * std::pow(std::log2(std::min(da, db)), k));
      return std::max(p.e_ab + w_c * std::pow(p.e_ac, k), p.e_ac + w_b * std::pow(p.e_ab, k));
    }
    case BoundKind::power_mean: {
      if (!alpha) fail(ErrorCode::invalid_argument, "power_mean needs alpha");
      return power_mean(p.e_ab, p.e_ac, *alpha);
    }
  }
  fail(ErrorCode::invalid_argument, "unknown bound kind");
}

}  // namespace entmono
