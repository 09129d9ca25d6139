#pragma once

// Command-line front end. Every command maps onto one library call; this
// layer only parses flags, reads/writes files and chooses exit codes:
//   0 success, 1 computation or I/O error, 2 usage error,
//   3 a scan recorded an inequality violation beyond tolerance.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "entmono/io.hpp"
#include "entmono/measures.hpp"
#include "entmono/monogamy.hpp"
#include "entmono/protocols.hpp"
#include "entmono/states.hpp"

namespace entmono::cli {

enum class Command { compute, scan_ckw, scan_alpha, scan_def15, scan_region, teleport, prepare, random, plotdata };

struct RunConfig {
  Command command = Command::compute;
  std::optional<std::string> state_path;
  std::string measure;
  Dims dims;
  std::size_t n_samples = 1000;
  Seed master_seed = 0;
  std::optional<std::string> out_path;
  std::optional<std::string> report_path;
  OptimizerConfig optimizer;
  double constant_c = 1.0;
  std::vector<std::size_t> cut{0};
  double alpha_tol = 1e-3;
  double epsilon = 1e-3;
  std::size_t env = 0;
  std::string plot_kind;
  cplx alpha = 1.0;
  cplx beta = 0.0;
  bool exhaustive = false;
  unsigned threads = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --help output; not an error.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& compute_measures() {
  static const std::vector<std::string> m{"entropy", "von_neumann", "purity", "concurrence", "eof", "eof_roof", "ree"};
  return m;
}

namespace detail {

inline std::vector<std::size_t> parse_index_list(const std::string& flag, const std::string& text, bool positive) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v < 0 || (positive && v == 0))
      throw UsageError(flag + ": invalid value '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

inline cplx parse_complex(const std::string& flag, const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> parts;
  while (std::getline(ss, part, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != part.size() || part.empty()) throw UsageError(flag + ": invalid value '" + text + "'");
    parts.push_back(v);
  }
  if (parts.empty() || parts.size() > 2) throw UsageError(flag + ": expected re or re,im");
  return {parts[0], parts.size() == 2 ? parts[1] : 0.0};
}

inline unsigned threads_from_env() {
  if (const char* env = std::getenv("ENTMONO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

// `args` excludes the program name.
inline RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Entanglement measures and monogamy scans", "entmono"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string dims_text, cut_text, alpha_text, beta_text;
  std::string state_path, out_path, report_path;
  int restarts = cfg.optimizer.restarts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.master_seed, "Master RNG seed")->default_val(0);
    sub->add_option("--out", out_path, "Output file");
  };
  auto add_scan = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--samples", cfg.n_samples, "Number of random samples");
    sub->add_option("--dims", dims_text, "Comma-separated subsystem dimensions (default 2,2,2)");
    sub->add_option("--restarts", restarts, "Optimizer restarts");
    sub->add_option("--report", report_path, "JSON report path");
  };

  auto* compute = app.add_subcommand("compute", "Evaluate a measure on a state file");
  add_common(compute);
  compute->add_option("--measure", cfg.measure, "entropy|von_neumann|purity|concurrence|eof|eof_roof|ree")->required();
  compute->add_option("--state", state_path, "State JSON file")->required();
  compute->add_option("--cut", cut_text, "Side-A subsystem indices (default 0)");
  compute->add_option("--restarts", restarts, "Optimizer restarts");

  auto* scan = app.add_subcommand("scan", "Monogamy scans over random states");
  scan->require_subcommand(1);
  auto* ckw = scan->add_subcommand("ckw", "CKW inequality scan");
  add_scan(ckw);
  ckw->add_option("--env", cfg.env, "Environment dimension for mixed samples (0: pure)");
  auto* alpha = scan->add_subcommand("alpha", "Smallest alpha-power monogamy exponent");
  add_scan(alpha);
  alpha->add_option("--measure", cfg.measure, "concurrence|concurrence_sq|eof|ree")->default_val("concurrence");
  alpha->add_option("--tol", cfg.alpha_tol, "Bisection tolerance");
  auto* def15 = scan->add_subcommand("def15", "Equality-slab probe");
  add_scan(def15);
  def15->add_option("--measure", cfg.measure, "concurrence|concurrence_sq|eof|ree")->default_val("concurrence_sq");
  def15->add_option("--epsilon", cfg.epsilon, "Slab width");
  auto* region = scan->add_subcommand("region", "Region scan table");
  add_scan(region);
  region->add_option("--measure", cfg.measure, "concurrence|concurrence_sq|eof|ree")->default_val("concurrence_sq");
  region->add_option("--constant-c", cfg.constant_c, "Constant c of the dimension-weighted bounds");

  auto* teleport_cmd = app.add_subcommand("teleport", "Simulate single-qubit teleportation");
  add_common(teleport_cmd);
  teleport_cmd->add_option("--state", state_path, "Input qubit state file (default: random from seed)");
  teleport_cmd->add_flag("--exhaustive", cfg.exhaustive, "Enumerate all four branches");

  auto* prepare = app.add_subcommand("prepare", "Convert a Bell pair into alpha|00>+beta|11> by LOCC");
  add_common(prepare);
  prepare->add_option("--alpha", alpha_text, "re or re,im")->required();
  prepare->add_option("--beta", beta_text, "re or re,im")->required();
  prepare->add_flag("--exhaustive", cfg.exhaustive, "Enumerate both branches");

  auto* random_cmd = app.add_subcommand("random", "Write a random state file");
  add_common(random_cmd);
  random_cmd->add_option("--dims", dims_text, "Comma-separated subsystem dimensions (default 2,2)");
  random_cmd->add_option("--env", cfg.env, "Environment dimension (0: pure state)");

  auto* plot = app.add_subcommand("plotdata", "Emit plot data as CSV");
  add_common(plot);
  plot->add_option("kind", cfg.plot_kind, "fig2|fig3|fig9")->required()->check(CLI::IsMember({"fig2", "fig3", "fig9"}));
  plot->add_option("--samples", cfg.n_samples, "Samples for fig3");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (*compute) {
    cfg.command = Command::compute;
  } else if (*scan) {
    if (*ckw) cfg.command = Command::scan_ckw;
    else if (*alpha) cfg.command = Command::scan_alpha;
    else if (*def15) cfg.command = Command::scan_def15;
    else cfg.command = Command::scan_region;
  } else if (*teleport_cmd) {
    cfg.command = Command::teleport;
  } else if (*prepare) {
    cfg.command = Command::prepare;
  } else if (*random_cmd) {
    cfg.command = Command::random;
  } else {
    cfg.command = Command::plotdata;
  }

  if (!state_path.empty()) cfg.state_path = state_path;
  if (!out_path.empty()) cfg.out_path = out_path;
  if (!report_path.empty()) cfg.report_path = report_path;
  if (restarts <= 0) throw UsageError("--restarts: must be positive");
  cfg.optimizer.restarts = restarts;
  cfg.optimizer.seed = cfg.master_seed;

  const bool is_scan = cfg.command == Command::scan_ckw || cfg.command == Command::scan_alpha ||
                       cfg.command == Command::scan_def15 || cfg.command == Command::scan_region;
  if (!dims_text.empty()) cfg.dims = detail::parse_index_list("--dims", dims_text, true);
  else cfg.dims = cfg.command == Command::random ? Dims{2, 2} : Dims{2, 2, 2};
  if (!cut_text.empty()) cfg.cut = detail::parse_index_list("--cut", cut_text, false);
  if (!alpha_text.empty()) cfg.alpha = detail::parse_complex("--alpha", alpha_text);
  if (!beta_text.empty()) cfg.beta = detail::parse_complex("--beta", beta_text);

  if (cfg.command == Command::compute) {
    const auto& ok = compute_measures();
    if (std::find(ok.begin(), ok.end(), cfg.measure) == ok.end())
      throw UsageError("--measure: unknown measure '" + cfg.measure + "' for compute");
  }
  if (is_scan && cfg.command != Command::scan_ckw) {
    const auto id = parse_measure_id(cfg.measure);
    if (!id) throw UsageError("--measure: unknown measure '" + cfg.measure + "'");
    try {
      check_scan_dims(*id, cfg.dims);
    } catch (const Error& e) {
      throw UsageError(std::string("--dims: ") + e.what());
    }
  }
  if (cfg.command == Command::scan_ckw && cfg.dims != Dims{2, 2, 2}) throw UsageError("--dims: ckw scans need 2,2,2");
  if (cfg.command == Command::scan_alpha && !(cfg.alpha_tol > 0.0)) throw UsageError("--tol: must be positive");
  if (cfg.command == Command::scan_def15 && !(cfg.epsilon > 0.0)) throw UsageError("--epsilon: must be positive");
  if (cfg.command == Command::scan_region && !(cfg.constant_c > 0.0)) throw UsageError("--constant-c: must be positive");
  cfg.threads = detail::threads_from_env();
  return cfg;
}

namespace detail {

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path) write_text_file(*cfg.out_path, text);
  else out << text;
}

inline int run_compute(const RunConfig& cfg, std::ostream& out) {
  const QuantumState state = read_state_file(*cfg.state_path);
  const Bipartition cut{cfg.cut};
  const bool two_qubit = state.dims() == Dims{2, 2};
  MeasureResult r;
  if (cfg.measure == "entropy") {
    r.value = entropy_of_entanglement(state, cut);
    r.method = Method::exact_pure;
  } else if (cfg.measure == "von_neumann") {
    r.value = von_neumann_entropy(state);
    r.method = Method::exact_pure;
  } else if (cfg.measure == "purity") {
    r.value = purity(state);
    r.method = Method::closed_form;
  } else if (cfg.measure == "concurrence") {
    r.value = concurrence_two_qubit(state);
    r.method = Method::closed_form;
  } else if (cfg.measure == "eof") {
    if (two_qubit) r = eof_two_qubit(state);
    else if (state.has_vector()) {
      r.value = entropy_of_entanglement(state, cut);
      r.method = Method::exact_pure;
    }
    else r = eof_convex_roof(state, cut, cfg.optimizer);
  } else if (cfg.measure == "eof_roof") {
    r = eof_convex_roof(state, cut, cfg.optimizer);
  } else {
    r = ree_upper_bound(state, cut, cfg.optimizer);
  }
  char line[128];
  std::snprintf(line, sizeof line, "value=%.6f method=%s", r.value, to_string(r.method));
  out << line;
  if (r.method == Method::convex_roof || r.method == Method::heuristic_upper_bound)
    out << " iterations=" << r.iterations << " residual=" << format_number(r.residual)
        << " converged=" << (r.converged ? "true" : "false");
  out << '\n';
  if (cfg.out_path) {
    Json j = measure_result_to_json(r);
    j["measure"] = cfg.measure;
    write_text_file(*cfg.out_path, j.dump(2) + "\n");
  }
  return 0;
}

inline void write_report(const RunConfig& cfg, const ScanReport& report, const Json& extra = Json::object()) {
  if (cfg.out_path) write_text_file(*cfg.out_path, scan_csv(report));
  if (cfg.report_path) {
    Json j = scan_report_to_json(report);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_text_file(*cfg.report_path, j.dump(2) + "\n");
  }
}

inline void print_summary(std::ostream& out, const ScanReport& report) {
  out << "samples=" << report.samples.size() << " violations=" << report.violations
      << " min_slack=" << format_number(report.samples.empty() ? 0.0 : report.min_slack)
      << " slack_kind=" << to_string(report.kind) << (report.heuristic_rhs ? " rhs=heuristic_upper_bound" : "") << '\n';
}

inline int run_scan_ckw(const RunConfig& cfg, std::ostream& out) {
  const ScanReport report = cfg.env > 0 ? scan_ckw_mixed(cfg.n_samples, cfg.master_seed, cfg.env, cfg.optimizer, cfg.threads)
                                        : scan_ckw(cfg.n_samples, cfg.master_seed, cfg.threads);
  write_report(cfg, report);
  print_summary(out, report);
  return report.violations > 0 ? 3 : 0;
}

inline int run_scan_region(const RunConfig& cfg, std::ostream& out) {
  const MeasureId id = *parse_measure_id(cfg.measure);
  const ScanReport report = region_scan(id, cfg.dims, cfg.n_samples, cfg.master_seed, cfg.threads, cfg.optimizer);
  Json extra = Json::object();
  if (id == MeasureId::eof || id == MeasureId::ree) {
    // Parametric in c; informational only.
    const BoundKind kind = id == MeasureId::eof ? BoundKind::bound_45 : BoundKind::bound_46;
    const BoundParams params{cfg.constant_c, 0.0, cfg.dims};
    std::size_t below = 0;
    for (const auto& s : report.samples)
      if (bound_eval(kind, params, {s.triple.e_ab, s.triple.e_ac, s.triple.e_abc}) <= s.triple.e_abc + 1e-9) ++below;
    extra["bound"] = {{"kind", id == MeasureId::eof ? "bound_45" : "bound_46"},
                      {"constant_c", json_number(cfg.constant_c)},
                      {"samples_satisfying", below}};
  }
  write_report(cfg, report, extra);
  print_summary(out, report);
  return report.violations > 0 ? 3 : 0;
}

inline int run_scan_alpha(const RunConfig& cfg, std::ostream& out) {
  const MeasureId id = *parse_measure_id(cfg.measure);
  const AlphaResult r = alpha_search(id, cfg.dims, cfg.n_samples, cfg.master_seed, cfg.alpha_tol, cfg.threads, cfg.optimizer);
  ScanReport report;
  report.measure = id;
  report.dims = cfg.dims;
  report.master_seed = cfg.master_seed;
  report.kind = slack_kind(id);
  report.tolerance = default_tolerance(id);
  for (std::size_t i = 0; i < r.triples.size(); ++i) report.samples.push_back({i, r.triples[i].state_ref, r.triples[i], slack(r.triples[i])});
  finalize(report);
  report.alpha_star = r.alpha;
  Json extra = Json::object();
  if (r.violating_index) extra["violating_sample"] = *r.violating_index;
  write_report(cfg, report, extra);
  out << "alpha=" << format_number(r.alpha) << " samples=" << r.triples.size() << " measure=" << to_string(id) << '\n';
  return std::isinf(r.alpha) ? 3 : 0;
}

inline int run_scan_def15(const RunConfig& cfg, std::ostream& out) {
  const MeasureId id = *parse_measure_id(cfg.measure);
  const Def15Report r = def15_probe(id, cfg.dims, cfg.n_samples, cfg.master_seed, cfg.epsilon, cfg.threads, cfg.optimizer);
  Json targeted = Json::array();
  for (const auto& t : r.targeted)
    targeted.push_back({{"label", t.label},
                        {"e_ab", json_number(t.triple.e_ab)},
                        {"e_ac", json_number(t.triple.e_ac)},
                        {"e_abc", json_number(t.triple.e_abc)},
                        {"in_slab", t.in_slab}});
  const Json j{{"measure", to_string(id)},
               {"dims", cfg.dims},
               {"master_seed", cfg.master_seed},
               {"epsilon", json_number(r.epsilon)},
               {"random_samples", r.random_samples},
               {"in_slab", r.in_slab},
               {"max_e_ac_in_slab", json_number(r.max_e_ac_in_slab)},
               {"targeted", std::move(targeted)}};
  if (cfg.report_path) write_text_file(*cfg.report_path, j.dump(2) + "\n");
  if (cfg.out_path) write_text_file(*cfg.out_path, j.dump(2) + "\n");
  out << "in_slab=" << r.in_slab << " max_e_ac=" << format_number(r.max_e_ac_in_slab)
      << " epsilon=" << format_number(r.epsilon) << '\n';
  // CKW bounds E_AC by E_A(BC) - E_AB inside the slab for the squared concurrence.
  const bool violated = id == MeasureId::concurrence_sq && r.max_e_ac_in_slab > r.epsilon;
  return violated ? 3 : 0;
}

inline int run_teleport(const RunConfig& cfg, std::ostream& out) {
  Vector input;
  if (cfg.state_path) {
    const QuantumState s = read_state_file(*cfg.state_path);
    if (!s.has_vector() || s.dim() != 2) fail(ErrorCode::invalid_argument, "teleport needs a pure single-qubit state");
    input = s.vector();
  } else {
    Rng rng(cfg.master_seed);
    input = haar_random_vector(2, rng);
  }
  Json j;
  if (cfg.exhaustive) {
    j = Json::array();
    for (const auto& t : teleport_all_branches(input)) j.push_back(transcript_to_json(t));
  } else {
    Rng rng(derive_seed(cfg.master_seed, 1));
    j = transcript_to_json(teleport(input, rng));
  }
  emit(cfg, out, j.dump(2) + "\n");
  return 0;
}

inline int run_prepare(const RunConfig& cfg, std::ostream& out) {
  Json j;
  if (cfg.exhaustive) {
    j = Json::array();
    for (std::size_t k = 0; k < 2; ++k) j.push_back(transcript_to_json(locc_prepare_branch(cfg.alpha, cfg.beta, k)));
  } else {
    Rng rng(cfg.master_seed);
    j = transcript_to_json(locc_prepare_pure(cfg.alpha, cfg.beta, rng));
  }
  emit(cfg, out, j.dump(2) + "\n");
  return 0;
}

inline int run_random(const RunConfig& cfg, std::ostream& out) {
  const QuantumState s = [&] {
    if (cfg.env == 0) return haar_random_pure(cfg.dims, cfg.master_seed);
    std::size_t d = 1;
    for (std::size_t k : cfg.dims) d *= k;
    const QuantumState flat = induced_mixed(d, cfg.env, cfg.master_seed);
    return QuantumState::mixed(cfg.dims, flat.density());
  }();
  emit(cfg, out, state_to_json(s).dump(2) + "\n");
  return 0;
}

inline int run_plotdata(const RunConfig& cfg, std::ostream& out) {
  std::ostringstream os;
  if (cfg.plot_kind == "fig2") {
    os << "c_squared,e_f\n";
    constexpr int points = 1000;
    for (int i = 0; i < points; ++i) {
      const double c2 = static_cast<double>(i) / (points - 1);
      os << format_number(c2) << ',' << format_number(eof_from_concurrence(std::sqrt(c2))) << '\n';
    }
  } else if (cfg.plot_kind == "fig3") {
    os << region_csv(region_table(scan_ckw(cfg.n_samples, cfg.master_seed, cfg.threads)));
  } else {
    os << "alpha,x,y\n";
    constexpr int points = 201;
    for (double a : {2.0, 10.0, 15.0, 50.0})
      for (int k = 0; k < points; ++k) {
        const double theta = (std::numbers::pi / 2) * k / (points - 1);
        const double c = std::cos(theta), s = std::sin(theta);
        const double x = k == points - 1 ? 0.0 : std::pow(c * c, 1.0 / a);
        const double y = k == 0 ? 0.0 : std::pow(s * s, 1.0 / a);
        os << format_number(a) << ',' << format_number(x) << ',' << format_number(y) << '\n';
      }
  }
  emit(cfg, out, os.str());
  return 0;
}

}  // namespace detail

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::compute: return detail::run_compute(cfg, out);
      case Command::scan_ckw: return detail::run_scan_ckw(cfg, out);
      case Command::scan_alpha: return detail::run_scan_alpha(cfg, out);
      case Command::scan_def15: return detail::run_scan_def15(cfg, out);
      case Command::scan_region: return detail::run_scan_region(cfg, out);
      case Command::teleport: return detail::run_teleport(cfg, out);
      case Command::prepare: return detail::run_prepare(cfg, out);
      case Command::random: return detail::run_random(cfg, out);
      case Command::plotdata: return detail::run_plotdata(cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  return run(cfg, out, err);
}

}  // namespace entmono::cli
