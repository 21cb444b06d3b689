// Command-line front end.  Each subcommand resolves its configuration,
// computes through the library, and emits CSV (comment header carrying the
// resolved config) or JSON (config embedded) to stdout or --output.  Any
// failure prints a machine-readable error object and exits nonzero.

#include "CLI11.hpp"
#include "json.hpp"

#include "qsearch/io.hpp"
#include "qsearch/parallel.hpp"
#include "qsearch/root_analytics.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace qsearch;

namespace {

json tool_stamp() { return {{"name", kToolName}, {"version", kToolVersion}}; }

json config_json(const std::vector<ConfigEntry>& config) {
  json j = json::object();
  for (const auto& [key, value] : config) j[key] = value;
  return j;
}

// "8:64:4" -> {8, 12, ..., 64}; "8:20" -> step 1; "12" -> {12}.
std::vector<int> parse_depth_range(const std::string& text) {
  int lo = 0, hi = 0, step = 1;
  const int got = std::sscanf(text.c_str(), "%d:%d:%d", &lo, &hi, &step);
  if (got == 1) return {lo};
  if (got < 2 || step < 1 || hi < lo)
    throw std::invalid_argument("bad depth range '" + text + "' (want lo:hi[:step])");
  std::vector<int> depths;
  for (int v = lo; v <= hi; v += step) depths.push_back(v);
  return depths;
}

Complex parse_frequency(const std::string& text) {
  double re = 0.0, im = 0.0;
  const int got = std::sscanf(text.c_str(), "%lf,%lf", &re, &im);
  if (got < 1) throw std::invalid_argument("bad frequency '" + text + "' (want re[,im])");
  return {re, im};
}

Vector<double> time_grid(double t_max, int samples) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  if (!(t_max > 0.0)) throw std::invalid_argument("time horizon must be positive");
  Vector<double> times(samples);
  for (int j = 0; j < samples; ++j)
    times[j] = t_max * static_cast<double>(j) / static_cast<double>(samples - 1);
  return times;
}

json trace_json(const EvolutionTrace<double>& trace) {
  json t = json::array(), re = json::array(), im = json::array(), prob = json::array();
  for (Index i = 0; i < trace.times.size(); ++i) {
    t.push_back(trace.times[i]);
    re.push_back(trace.amplitude[i].real());
    im.push_back(trace.amplitude[i].imag());
    prob.push_back(trace.probability[i]);
  }
  return {{"t", t}, {"re", re}, {"im", im}, {"prob", prob}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

struct ReduceArgs {
  int n = 8, l = 1;
  double gamma = 1.0;
  bool verify = false, edges = false;
  std::string format = "json";
};

std::string cmd_reduce(const ReduceArgs& a) {
  const TreeParams params{a.n, a.l, a.gamma};
  params.validate();
  const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)},
                                        {"l", std::to_string(a.l)},
                                        {"gamma", format_g15(a.gamma)},
                                        {"verify", a.verify ? "1" : "0"},
                                        {"edges", a.edges ? "1" : "0"},
                                        {"format", a.format}};
  std::ostringstream out;
  if (a.edges) {
    write_comment_header(out, "reduce", config);
    out << "a,b,doubled\n";
    for (const auto& e : comb_layout(a.n, a.l).edges)
      out << e.a << ',' << e.b << ',' << (e.doubled ? 1 : 0) << '\n';
    return out.str();
  }
  const ReducedSystem<double> sys = reduce_comb<double>(params);
  if (a.format == "csv") {
    write_comment_header(out, "reduce", config);
    out << "i,j,value\n";
    for (Index k = 0; k < sys.hamiltonian.outerSize(); ++k)
      for (typename Sparse<double>::InnerIterator it(sys.hamiltonian, k); it; ++it)
        out << it.row() << ',' << it.col() << ',' << format_g15(it.value()) << '\n';
    return out.str();
  }
  json j;
  j["tool"] = tool_stamp();
  j["config"] = config_json(config);
  j["n"] = a.n;
  j["l"] = a.l;
  j["gamma"] = a.gamma;
  j["size"] = sys.size();
  j["marked_index"] = sys.marked_index;
  j["multiplicities"] = sys.multiplicities;
  json entries = json::array();
  for (Index k = 0; k < sys.hamiltonian.outerSize(); ++k)
    for (typename Sparse<double>::InnerIterator it(sys.hamiltonian, k); it; ++it)
      entries.push_back({it.row(), it.col(), it.value()});
  j["entries"] = entries;
  if (a.verify) {
    if (a.n > 12) throw std::invalid_argument("verification requires n <= 12");
    const FullSystem<double> full = build_full_hamiltonian<double>(params);
    const VerifyReport report = verify_reduction(full, reduction_map(a.n, a.l), sys);
    json checks = json::array();
    for (const VerifyCheck& c : report.checks)
      checks.push_back({{"name", c.name},
                        {"deviation", c.deviation},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass}});
    j["verify"] = {{"pass", report.all_pass}, {"checks", checks}};
  }
  return dump(j);
}

struct EvolveArgs {
  int n = 8, l = 1;
  double gamma = 1.0;
  double t_max = 0.0;  // <= 0: auto, 4 sqrt(N)
  int samples = 2048;
  std::string format = "csv";
};

std::string cmd_evolve(const EvolveArgs& a) {
  const TreeParams params{a.n, a.l, a.gamma};
  params.validate();
  const double t_max = a.t_max > 0.0 ? a.t_max : 4.0 * std::sqrt(tree_size_d(a.n));
  const EvolutionTrace<double> trace =
      evolve_amplitude(reduce_comb<double>(params), time_grid(t_max, a.samples));
  const std::vector<ConfigEntry> config{
      {"n", std::to_string(a.n)},       {"l", std::to_string(a.l)},
      {"gamma", format_g15(a.gamma)},   {"t-max", format_g15(t_max)},
      {"samples", std::to_string(a.samples)}, {"format", a.format}};
  if (a.format == "json") {
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j.update(trace_json(trace));
    return dump(j);
  }
  std::ostringstream out;
  write_comment_header(out, "evolve", config);
  write_trace_csv(out, trace);
  return out.str();
}

struct SweepArgs {
  int n = 10, l = 1;
  double gamma_max = 3.0;
  double coarse_step = 0.05, fine_step = 0.005;
  std::size_t max_samples = std::size_t{1} << 18;
  int workers = default_workers();
  std::string format = "csv";
};

std::string cmd_sweep(const SweepArgs& a) {
  SweepPolicy policy;
  policy.gamma_max = a.gamma_max;
  policy.coarse_step = a.coarse_step;
  policy.fine_step = a.fine_step;
  policy.max_samples = a.max_samples;
  policy.workers = a.workers;
  const GammaSweep sweep = sweep_gamma(a.n, a.l, policy);
  const std::vector<ConfigEntry> config{
      {"n", std::to_string(a.n)},
      {"l", std::to_string(a.l)},
      {"gamma-max", format_g15(a.gamma_max)},
      {"coarse-step", format_g15(a.coarse_step)},
      {"fine-step", format_g15(a.fine_step)},
      {"max-samples", std::to_string(a.max_samples)},
      {"format", a.format}};
  if (a.format == "json") {
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j["gamma_prime_star"] = sweep.gamma_prime_star;
    j["max_prob_star"] = sweep.max_prob_star;
    j["gamma_star"] = sweep.gamma_star ? json(*sweep.gamma_star) : json();
    j["efficiency_star"] = sweep.efficiency_star ? json(*sweep.efficiency_star) : json();
    json points = json::array();
    for (const SweepPoint& pt : sweep.points) {
      json p{{"gamma", pt.gamma},
             {"max_prob", pt.max_prob},
             {"max_prob_time", pt.max_prob_time},
             {"linear_regime", pt.linear_regime}};
      p["t0"] = pt.peak ? json(pt.peak->time) : json();
      p["p0"] = pt.peak ? json(pt.peak->probability) : json();
      p["efficiency"] = pt.efficiency ? json(*pt.efficiency) : json();
      points.push_back(p);
    }
    j["points"] = points;
    return dump(j);
  }
  std::ostringstream out;
  write_comment_header(out, "sweep", config);
  write_sweep_csv(out, sweep);
  return out.str();
}

struct ScalingArgs {
  std::string range = "8:32:4";
  int l = 1;
  std::optional<double> l_ratio;
  std::optional<double> gamma;
  std::size_t max_samples = std::size_t{1} << 21;
  int workers = default_workers();
  std::string format = "json";
};

std::string cmd_scaling(const ScalingArgs& a) {
  ScalingProtocol protocol;
  protocol.depths = parse_depth_range(a.range);
  protocol.fixed_level = a.l;
  protocol.level_ratio = a.l_ratio;
  protocol.gamma = a.gamma;
  protocol.max_samples = a.max_samples;
  protocol.workers = a.workers;
  const ScalingFit fit = scaling_experiment(protocol);
  std::vector<ConfigEntry> config{{"n", a.range}};
  if (a.l_ratio)
    config.emplace_back("l-ratio", format_g15(*a.l_ratio));
  else
    config.emplace_back("l", std::to_string(a.l));
  config.emplace_back("gamma", a.gamma ? format_g15(*a.gamma) : "auto");
  config.emplace_back("max-samples", std::to_string(a.max_samples));
  config.emplace_back("format", a.format);
  if (a.format == "csv") {
    std::ostringstream out;
    write_comment_header(out, "scaling", config);
    write_scaling_csv(out, fit);
    return out.str();
  }
  json j;
  j["tool"] = tool_stamp();
  j["config"] = config_json(config);
  j["beta"] = fit.beta;
  j["beta_stderr"] = fit.beta_stderr;
  j["slope_coefficient"] = fit.slope_coefficient;
  json points = json::array();
  for (const ScalingPoint& pt : fit.points) {
    json p{{"n", pt.n},
           {"l", pt.l},
           {"gamma", pt.gamma},
           {"log_size", pt.log_size},
           {"linear_regime", pt.linear_regime}};
    p["t0"] = pt.peak ? json(pt.peak->time) : json();
    p["p0"] = pt.peak ? json(pt.peak->probability) : json();
    p["efficiency"] = pt.efficiency ? json(*pt.efficiency) : json();
    p["local_slope"] = pt.local_slope ? json(*pt.local_slope) : json();
    points.push_back(p);
  }
  j["points"] = points;
  j["verify"] = {{"n", fit.verified_n}, {"l", fit.verified_l}, {"pass", fit.verify_pass}};
  return dump(j);
}

struct ClassicalArgs {
  int n = 8;
  std::uint64_t mc_walks = 0;  // 0: exact/elimination solve
  int start_level = 2;
  std::uint64_t seed = 12345;
  int workers = default_workers();
  std::string format = "csv";
};

std::string cmd_classical(const ClassicalArgs& a) {
  if (a.mc_walks > 0) {
    const McResult mc = mc_hitting_time(a.n, a.start_level, a.mc_walks, a.seed, a.workers);
    const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)},
                                          {"mc", std::to_string(a.mc_walks)},
                                          {"start-level", std::to_string(a.start_level)},
                                          {"seed", std::to_string(a.seed)},
                                          {"format", a.format}};
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j["mc"] = {{"mean", mc.mean}, {"stderr", mc.stderr_mean}, {"walks", mc.walks}};
    return dump(j);
  }
  const HittingTimes times = hitting_times(a.n);
  const ClassicalComplexityReport report = classical_complexity_class(a.n);
  const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)}, {"format", a.format}};
  if (a.format == "json") {
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j["n"] = times.n;
    j["exact"] = times.exact;
    j["t"] = times.per_level;
    j["average"] = times.average;
    j["t2"] = report.t2;
    j["t2_is_n_minus_2"] = report.t2_is_n_minus_2;
    j["deep_weight"] = report.deep_weight;
    j["linear_lower_bound"] = report.linear_lower_bound;
    return dump(j);
  }
  std::ostringstream out;
  write_comment_header(out, "classical", config);
  write_classical_csv(out, times);
  return out.str();
}

struct CentralityArgs {
  int n = 24;
  std::string format = "csv";
};

std::string cmd_centrality(const CentralityArgs& a) {
  const CentralityTable table = centrality_table(a.n);
  const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)}, {"format", a.format}};
  if (a.format == "json") {
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    json rows = json::array();
    for (const CentralityRow& row : table.rows)
      rows.push_back({{"l", row.level},
                      {"beta_pred", row.beta_pred},
                      {"closeness_norm", row.closeness_norm},
                      {"kappa", row.kappa},
                      {"betweenness_norm", row.betweenness_norm},
                      {"kappa_minus_two_beta", row.kappa_minus_two_beta}});
    j["rows"] = rows;
    j["max_kappa_two_beta_dev"] = table.max_kappa_two_beta_dev;
    return dump(j);
  }
  std::ostringstream out;
  write_comment_header(out, "centrality", config);
  write_centrality_csv(out, table);
  return out.str();
}

struct AnalyticArgs {
  std::string form;  // sine | pair | small-gamma (trace mode)
  int n = 15;
  double gamma = 0.5;
  double t_max = 0.0;
  int samples = 2048;
  std::string laplace;  // "re[,im]" (scalar mode)
  bool runtime = false;
  bool sg_efficiency = false;
  std::string format = "csv";
};

std::string cmd_analytic(const AnalyticArgs& a) {
  const int actions = static_cast<int>(!a.form.empty()) + static_cast<int>(!a.laplace.empty()) +
                      static_cast<int>(a.runtime) + static_cast<int>(a.sg_efficiency);
  if (actions != 1)
    throw std::invalid_argument(
        "pick exactly one of --form, --laplace, --runtime, --small-gamma-efficiency");

  if (a.runtime) {
    const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)}, {"runtime", "1"}};
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j["runtime"] = asymptotic_runtime(a.n);
    return dump(j);
  }
  if (a.sg_efficiency) {
    const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)},
                                          {"gamma", format_g15(a.gamma)},
                                          {"small-gamma-efficiency", "1"}};
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j["efficiency"] = small_gamma_efficiency(a.gamma, tree_size_d(a.n));
    return dump(j);
  }
  if (!a.laplace.empty()) {
    const Complex s = parse_frequency(a.laplace);
    const Complex value = laplace_psi1(s, a.n);
    const std::vector<ConfigEntry> config{{"n", std::to_string(a.n)}, {"laplace", a.laplace}};
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j["laplace"] = {{"re", value.real()}, {"im", value.imag()}};
    return dump(j);
  }

  // Trace mode: sample one closed form on a uniform grid.
  double t_max = a.t_max;
  EvolutionTrace<double> trace;
  if (a.form == "sine" || a.form == "pair") {
    if (t_max <= 0.0) t_max = 2.0 * std::numbers::pi * std::sqrt(std::exp2(a.n + 1));
    const CriticalForm form = a.form == "sine" ? CriticalForm::sine : CriticalForm::pair;
    const PolePair poles = form == CriticalForm::pair ? critical_poles(a.n) : PolePair{};
    trace.times = time_grid(t_max, a.samples);
    trace.amplitude.resize(trace.times.size());
    trace.probability.resize(trace.times.size());
    for (Index i = 0; i < trace.times.size(); ++i) {
      trace.amplitude[i] = approx_critical(trace.times[i], a.n, form, poles);
      trace.probability[i] = std::norm(trace.amplitude[i]);
    }
  } else if (a.form == "small-gamma") {
    if (t_max <= 0.0) t_max = 4.0 * std::sqrt(tree_size_d(a.n));
    trace.times = time_grid(t_max, a.samples);
    trace.amplitude.resize(trace.times.size());
    trace.probability.resize(trace.times.size());
    for (Index i = 0; i < trace.times.size(); ++i) {
      trace.amplitude[i] = approx_small_gamma(trace.times[i], a.gamma, tree_size_d(a.n));
      trace.probability[i] = std::norm(trace.amplitude[i]);
    }
  } else {
    throw std::invalid_argument("unknown form '" + a.form + "' (want sine|pair|small-gamma)");
  }
  const std::vector<ConfigEntry> config{
      {"form", a.form},                       {"n", std::to_string(a.n)},
      {"gamma", format_g15(a.gamma)},         {"t-max", format_g15(t_max)},
      {"samples", std::to_string(a.samples)}, {"format", a.format}};
  if (a.format == "json") {
    json j;
    j["tool"] = tool_stamp();
    j["config"] = config_json(config);
    j.update(trace_json(trace));
    return dump(j);
  }
  std::ostringstream out;
  write_comment_header(out, "analytic", config);
  write_trace_csv(out, trace);
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-time quantum search on balanced binary trees"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "read options from an INI file ([subcommand] sections)");
  app.require_subcommand(1);

  std::string output;
  std::string result;

  const auto add_common = [&output](CLI::App* sub) {
    sub->add_option("-o,--output", output, "write to this file instead of stdout");
  };
  const auto add_format = [](CLI::App* sub, std::string& format) {
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  ReduceArgs reduce_args;
  CLI::App* reduce = app.add_subcommand("reduce", "emit the lumped system");
  reduce->add_option("--n", reduce_args.n, "tree depth");
  reduce->add_option("--l", reduce_args.l, "marked level");
  reduce->add_option("--gamma", reduce_args.gamma, "coupling");
  reduce->add_flag("--verify", reduce_args.verify, "cross-check against the full system (n <= 12)");
  reduce->add_flag("--edges", reduce_args.edges, "emit the lumped edge list as CSV");
  add_format(reduce, reduce_args.format);
  add_common(reduce);
  reduce->callback([&] { result = cmd_reduce(reduce_args); });

  EvolveArgs evolve_args;
  CLI::App* evolve = app.add_subcommand("evolve", "marked-site amplitude trace");
  evolve->add_option("--n", evolve_args.n, "tree depth");
  evolve->add_option("--l", evolve_args.l, "marked level");
  evolve->add_option("--gamma", evolve_args.gamma, "coupling");
  evolve->add_option("--t-max", evolve_args.t_max, "time horizon (default 4 sqrt(N))");
  evolve->add_option("--samples", evolve_args.samples, "grid size");
  add_format(evolve, evolve_args.format);
  add_common(evolve);
  evolve->callback([&] { result = cmd_evolve(evolve_args); });

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "coupling sweep at fixed depth and level");
  sweep->add_option("--n", sweep_args.n, "tree depth");
  sweep->add_option("--l", sweep_args.l, "marked level");
  sweep->add_option("--gamma-max", sweep_args.gamma_max, "upper end of the sweep");
  sweep->add_option("--coarse-step", sweep_args.coarse_step, "coarse grid step");
  sweep->add_option("--fine-step", sweep_args.fine_step, "refinement grid step");
  sweep->add_option("--max-samples", sweep_args.max_samples, "peak-scan grid cap");
  sweep->add_option("--workers", sweep_args.workers, "parallel workers");
  add_format(sweep, sweep_args.format);
  add_common(sweep);
  sweep->callback([&] { result = cmd_sweep(sweep_args); });

  ScalingArgs scaling_args;
  CLI::App* scaling = app.add_subcommand("scaling", "runtime exponent across depths");
  scaling->add_option("--n", scaling_args.range, "depth range lo:hi[:step]");
  scaling->add_option("--l", scaling_args.l, "fixed marked level");
  double l_ratio_in = -1.0, gamma_in = -1.0;
  scaling->add_option("--l-ratio", l_ratio_in, "marked level as a fraction of depth");
  scaling->add_option("--gamma", gamma_in, "fixed coupling (default: per-level heuristic)");
  scaling->add_option("--max-samples", scaling_args.max_samples, "peak-scan grid cap");
  scaling->add_option("--workers", scaling_args.workers, "parallel workers");
  add_format(scaling, scaling_args.format);
  add_common(scaling);
  scaling->callback([&] {
    if (l_ratio_in >= 0.0) scaling_args.l_ratio = l_ratio_in;
    if (gamma_in >= 0.0) scaling_args.gamma = gamma_in;
    result = cmd_scaling(scaling_args);
  });

  ClassicalArgs classical_args;
  CLI::App* classical = app.add_subcommand("classical", "random-walk hitting times");
  classical->add_option("--n", classical_args.n, "tree depth");
  classical->add_option("--mc", classical_args.mc_walks, "Monte-Carlo walk count (0: solve)");
  classical->add_option("--start-level", classical_args.start_level, "Monte-Carlo start level");
  classical->add_option("--seed", classical_args.seed, "Monte-Carlo seed");
  classical->add_option("--workers", classical_args.workers, "parallel workers");
  add_format(classical, classical_args.format);
  add_common(classical);
  classical->callback([&] { result = cmd_classical(classical_args); });

  CentralityArgs centrality_args;
  CLI::App* centrality = app.add_subcommand("centrality", "level centrality table");
  centrality->add_option("--n", centrality_args.n, "tree depth (divisible by 4)");
  add_format(centrality, centrality_args.format);
  add_common(centrality);
  centrality->callback([&] { result = cmd_centrality(centrality_args); });

  AnalyticArgs analytic_args;
  CLI::App* analytic = app.add_subcommand("analytic", "closed-form amplitudes and scalars");
  analytic->add_option("--form", analytic_args.form, "trace form: sine|pair|small-gamma");
  analytic->add_option("--n", analytic_args.n, "tree depth");
  analytic->add_option("--gamma", analytic_args.gamma, "coupling (small-gamma forms)");
  analytic->add_option("--t-max", analytic_args.t_max, "trace horizon (default: one wavelength)");
  analytic->add_option("--samples", analytic_args.samples, "trace grid size");
  analytic->add_option("--laplace", analytic_args.laplace, "evaluate the transform at re[,im]");
  analytic->add_flag("--runtime", analytic_args.runtime, "critical-coupling runtime scalar");
  analytic->add_flag("--small-gamma-efficiency", analytic_args.sg_efficiency,
                     "small-coupling efficiency scalar");
  add_format(analytic, analytic_args.format);
  add_common(analytic);
  analytic->callback([&] { result = cmd_analytic(analytic_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    json err;
    err["error"] = {{"kind", e.get_name()}, {"message", e.what()}};
    std::cout << dump(err);
    return 1;
  } catch (const std::exception& e) {
    json err;
    const auto parsed = app.get_subcommands();
    err["error"] = {{"kind", "runtime"},
                    {"subcommand", parsed.empty() ? "" : parsed.front()->get_name()},
                    {"message", e.what()}};
    std::cout << dump(err);
    return 1;
  }

  if (output.empty()) {
    std::cout << result;
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) {
      json err;
      err["error"] = {{"kind", "io"}, {"message", "cannot open output file '" + output + "'"}};
      std::cout << dump(err);
      return 1;
    }
    file << result;
  }
  return 0;
}
