#include "lossperc/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lossperc/oracle.hpp"
#include "lossperc/sweep.hpp"
#include "lossperc/verification.hpp"

namespace lossperc {

using json = nlohmann::ordered_json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string boundary_text(const LatticeSpec& s) {
  std::string out;
  for (int a = 0; a < s.dimension; ++a) {
    if (a) out += ',';
    out += to_string(s.boundary_of(a));
  }
  return out;
}

std::string class_text(const DisplacementClass& c) {
  std::string s;
  for (int v : c) s += std::to_string(v);
  return s;
}

json lattice_json(const LatticeSpec& s) {
  json j;
  j["family"] = std::string(to_string(s.family));
  j["dimension"] = s.dimension;
  j["size"] = s.size;
  json b = json::array();
  for (int a = 0; a < s.dimension; ++a) b.push_back(std::string(to_string(s.boundary_of(a))));
  j["boundary"] = b;
  if (s.family == LatticeFamily::extended_hypercubic) {
    json n = json::array();
    for (const auto& c : s.neighborhood) n.push_back(class_text(c));
    j["neighborhood"] = n;
  }
  return j;
}

json params_json(const ModelParams& p) {
  return json{{"p_s", p.p_s}, {"n_max", p.n_max}, {"boost_n", p.boost_n}};
}

Lattice build_or_config_error(const LatticeSpec& spec) {
  try {
    return build(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace

void RunConfig::check() const {
  if (repetitions < 1) throw ConfigError("--reps must be at least 1");
  if (scale <= 0.0) throw ConfigError("scale must be positive");
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("grid values must lie in [0, 1]");
  }
  for (int s : sizes) {
    if (s < 2) throw ConfigError("sizes must be at least 2");
  }
  if (out.empty()) throw ConfigError("--out must not be empty");
  try {
    params.check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!lattice.boundary.empty() && static_cast<int>(lattice.boundary.size()) != lattice.dimension) {
    throw ConfigError("--boundary needs one entry per axis");
  }
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count < 1) throw ConfigError("grid count must be at least 1");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  g.back() = hi;
  return g;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad grid value '" + s + "'");
    }
  };
  std::vector<double> g;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("grid must be min:max:count");
    const double count = number(parts[2]);
    if (count < 1 || count != std::floor(count)) throw ConfigError("grid count must be a positive integer");
    g = uniform_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(count));
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) g.push_back(number(part));
  }
  if (g.empty()) throw ConfigError("empty grid");
  for (double p : g) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("grid values must lie in [0, 1]");
  }
  return g;
}

std::string config_hash(const RunConfig& c, const std::string& command) {
  std::string s = "command=" + command;
  s += ";family=" + std::string(to_string(c.lattice.family));
  s += ";dimension=" + std::to_string(c.lattice.dimension);
  s += ";size=" + std::to_string(c.lattice.size);
  s += ";boundary=" + boundary_text(c.lattice);
  s += ";neighborhood=";
  for (const auto& n : c.lattice.neighborhood) s += class_text(n) + ",";
  s += ";sizes=";
  for (int v : c.sizes) s += std::to_string(v) + ",";
  s += ";model=" + std::string(to_string(c.params.model));
  s += ";p_s=" + format_double(c.params.p_s);
  s += ";n_max=" + std::to_string(c.params.n_max);
  s += ";boost_n=" + std::to_string(c.params.boost_n);
  s += ";repetitions=" + std::to_string(c.repetitions);
  s += ";seed=" + std::to_string(c.seed);
  s += ";grid=";
  for (double p : c.grid) s += format_double(p) + ",";
  if (command == "verify") s += ";suite=" + c.suite + ";scale=" + format_double(c.scale);
  if (command == "bench") {
    s += ";n_eta=";
    for (auto v : c.bench_n_eta) s += std::to_string(v) + ",";
    s += ";nodes=";
    for (auto v : c.bench_nodes) s += std::to_string(v) + ",";
    s += ";repeats=" + std::to_string(c.bench_repeats);
  }
  return hex64(fnv1a(s));
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  config.check();
  const auto t0 = std::chrono::steady_clock::now();
  const Lattice lattice = build_or_config_error(config.lattice);
  const std::vector<double> grid = config.grid.empty() ? uniform_grid(0.0, 1.0, 101) : config.grid;

  CanonicalCurve curve;
  std::size_t photons_total = 0;
  if (config.params.variable_photon_count()) {
    auto e = canonical_ensemble(lattice, config.params, config.repetitions, config.seed, grid, config.workers);
    curve = std::move(e.curve);
    photons_total = e.photons_total;
  } else {
    auto e = run_ensemble(lattice, config.params, config.repetitions, config.seed, config.workers);
    curve = convolve(e.mean_largest, e.span_probability, grid);
    photons_total = e.total_photons * e.repetitions;
  }
  const double wall = seconds_since(t0);
  const std::string hash = config_hash(config, "sweep");

  write_text(config.out + ".csv", curve_csv(curve, hash));
  json meta;
  meta["schema"] = "run v1";
  meta["command"] = "sweep";
  meta["lattice"] = lattice_json(config.lattice);
  meta["model"] = std::string(to_string(config.params.model));
  meta["params"] = params_json(config.params);
  meta["seed"] = config.seed;
  meta["repetitions"] = config.repetitions;
  meta["wall_time_s"] = wall;
  meta["photons_total"] = photons_total;
  meta["nodes"] = lattice.node_count();
  meta["edges"] = lattice.edge_count();
  meta["grid_count"] = grid.size();
  meta["config_hash"] = hash;
  write_json(config.out + ".json", meta);
  log << "sweep: " << lattice.node_count() << " nodes, " << config.repetitions << " runs, " << grid.size()
      << " grid points in " << wall << " s -> " << config.out << ".csv\n";
  return kExitOk;
}

ThresholdStudy run_threshold_study(const RunConfig& config) {
  config.check();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> sizes = config.sizes.empty() ? std::vector<int>{config.lattice.size} : config.sizes;
  ThresholdStudy study;
  std::vector<SizeThreshold> usable;
  for (int L : sizes) {
    LatticeSpec spec = config.lattice;
    spec.size = L;
    if (spec.boundary_of(0) != Boundary::open) throw ConfigError("spanning detection needs axis 0 open");
    const Lattice lattice = build_or_config_error(spec);
    ThresholdEstimate t;
    if (config.params.variable_photon_count()) {
      const std::vector<double> unit{1.0};
      t = canonical_ensemble(lattice, config.params, config.repetitions, config.seed, unit, config.workers)
              .threshold();
    } else {
      t = run_ensemble(lattice, config.params, config.repetitions, config.seed, config.workers).threshold();
    }
    SizeThreshold row{static_cast<double>(L), t.value, t.error};
    study.per_size.push_back(row);
    if (!t.valid()) {
      study.warnings.push_back("L=" + std::to_string(L) + ": no run spanned; size excluded");
      continue;
    }
    if (!t.all_spanned()) {
      study.warnings.push_back("L=" + std::to_string(L) + ": " + std::to_string(t.runs - t.spanned) +
                               " runs never spanned and are excluded from the mean");
    }
    usable.push_back(row);
  }
  std::vector<double> distinct;
  for (const auto& r : usable) distinct.push_back(r.size);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() >= 3) {
    study.extrapolation = extrapolate(usable);
  } else {
    study.warnings.push_back("fewer than three sizes; extrapolation skipped");
  }
  study.wall_time_s = seconds_since(t0);
  return study;
}

int cmd_threshold(const RunConfig& config, std::ostream& log) {
  const ThresholdStudy study = run_threshold_study(config);
  const std::string hash = config_hash(config, "threshold");
  for (const auto& w : study.warnings) log << "warning: " << w << "\n";
  write_text(config.out + ".csv", threshold_csv(study.per_size, hash));
  json j;
  j["schema"] = "threshold-fit v1";
  j["lattice"] = lattice_json(config.lattice);
  j["model"] = std::string(to_string(config.params.model));
  j["params"] = params_json(config.params);
  j["seed"] = config.seed;
  j["repetitions"] = config.repetitions;
  json rows = json::array();
  for (const auto& r : study.per_size) {
    rows.push_back({{"L", r.size},
                    {"lambda", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
                    {"stderr", std::isfinite(r.error) ? json(r.error) : json(nullptr)}});
  }
  j["per_size"] = rows;
  if (study.extrapolation) {
    const auto& x = *study.extrapolation;
    j["lambda_inf"] = x.value;
    j["error"] = x.error;
    j["fit_mode"] = to_string(x.mode);
    j["exponent"] = x.exponent;
    j["amplitude"] = x.amplitude;
    j["chi2"] = x.chi2;
    j["note"] = x.note;
  } else {
    j["lambda_inf"] = nullptr;
    j["error"] = nullptr;
    j["fit_mode"] = nullptr;
  }
  j["warnings"] = study.warnings;
  j["wall_time_s"] = study.wall_time_s;
  j["config_hash"] = hash;
  write_json(config.out + ".json", j);
  for (const auto& r : study.per_size) log << "L=" << r.size << " lambda=" << r.value << " +- " << r.error << "\n";
  if (study.extrapolation) {
    log << "lambda_inf=" << study.extrapolation->value << " +- " << study.extrapolation->error << " ("
        << to_string(study.extrapolation->mode) << " exponent " << study.extrapolation->exponent << ")\n";
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  config.check();
  SuiteOptions opt;
  opt.scale = config.scale;
  opt.corrupt_lattice = config.corrupt_lattice;
  opt.workers = config.workers;
  opt.seed = config.seed;
  opt.scratch_dir = config.out + "_scratch";
  std::vector<CheckResult> results;
  try {
    suite_checks(config.suite);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  results = run_suite(config.suite, opt, [&](const CheckResult& r) {
    log << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s): " << r.detail << "\n";
    log.flush();
  });
  bool pass = true;
  std::string text;
  json checks = json::array();
  for (const auto& r : results) {
    pass = pass && r.pass;
    text += (r.pass ? "PASS " : "FAIL ") + r.name + ": " + r.detail + "\n";
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  text += pass ? "suite passed\n" : "suite FAILED\n";
  json j{{"schema", "verify v1"},
         {"suite", config.suite},
         {"scale", config.scale},
         {"seed", config.seed},
         {"pass", pass},
         {"checks", checks},
         {"config_hash", config_hash(config, "verify")}};
  write_text(config.out + ".txt", text);
  write_json(config.out + ".json", j);
  log << (pass ? "suite passed" : "suite FAILED") << "\n";
  return pass ? kExitOk : kExitVerifyFailed;
}

BenchReport run_bench(const RunConfig& config) {
  config.check();
  if (config.bench_repeats < 1) throw ConfigError("bench repeats must be at least 1");
  BenchReport report;
  const Lattice lattice = build_or_config_error(config.lattice);
  const ModelParams& params = config.params;

  auto timed_ensemble = [&](const Lattice& g, const std::vector<double>* grid) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < config.bench_repeats; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      if (params.variable_photon_count()) {
        const std::vector<double> unit{1.0};
        canonical_ensemble(g, params, config.repetitions, config.seed, grid ? *grid : unit, 1);
      } else {
        auto e = run_ensemble(g, params, config.repetitions, config.seed, 1);
        if (grid) convolve(e.mean_largest, e.span_probability, *grid);
      }
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };

  std::vector<double> sweep_times, baseline_times;
  for (std::size_t n_eta : config.bench_n_eta) {
    const std::vector<double> grid = uniform_grid(0.0, 1.0, n_eta);
    const double t = timed_ensemble(lattice, &grid);
    sweep_times.push_back(t);
    report.rows.push_back({"n_eta", static_cast<double>(n_eta), t});
  }
  for (std::size_t n_eta : config.bench_n_eta) {
    // Naive approach: a fresh direct-sampling ensemble for every grid point.
    const std::vector<double> grid = uniform_grid(0.0, 1.0, n_eta);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      Rng rng(config.seed + k);
      for (std::size_t r = 0; r < config.repetitions; ++r) canonical_sample(lattice, params, grid[k], rng);
    }
    const double t = seconds_since(t0);
    baseline_times.push_back(t);
    report.rows.push_back({"n_eta_baseline", static_cast<double>(n_eta), t});
  }
  std::vector<std::pair<double, double>> node_times;
  for (std::size_t nodes : config.bench_nodes) {
    LatticeSpec spec = config.lattice;
    const double per_cell = static_cast<double>(basis_size(spec));
    spec.size = std::max(2, static_cast<int>(std::lround(
                                std::pow(static_cast<double>(nodes) / per_cell, 1.0 / spec.dimension))));
    const Lattice g = build_or_config_error(spec);
    const double t = timed_ensemble(g, nullptr);
    node_times.emplace_back(static_cast<double>(g.node_count()), t);
    report.rows.push_back({"nodes", static_cast<double>(g.node_count()), t});
  }

  if (sweep_times.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(sweep_times.begin(), sweep_times.end());
    report.sweep_variation = (*hi - *lo) / *lo;
  }
  if (baseline_times.size() >= 2) report.baseline_growth = baseline_times.back() / baseline_times.front();
  for (std::size_t k = 1; k < node_times.size(); ++k) {
    const double decades = std::log10(node_times[k].first / node_times[k - 1].first);
    if (decades <= 0.0) continue;
    const double ratio = std::pow(node_times[k].second / node_times[k - 1].second, 1.0 / decades);
    report.worst_decade_ratio = std::max(report.worst_decade_ratio, ratio);
  }
  return report;
}

int cmd_bench(const RunConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const BenchReport r = run_bench(config);
  const std::string hash = config_hash(config, "bench");
  write_text(config.out + ".csv", bench_csv(r.rows, hash));
  json j{{"schema", "bench-summary v1"},
         {"lattice", lattice_json(config.lattice)},
         {"model", std::string(to_string(config.params.model))},
         {"params", params_json(config.params)},
         {"seed", config.seed},
         {"repetitions", config.repetitions},
         {"repeats", config.bench_repeats},
         {"wall_time_s", seconds_since(t0)},
         {"config_hash", hash}};
  if (config.bench_n_eta.size() >= 2) {
    j["sweep_variation"] = r.sweep_variation;
    j["baseline_growth"] = r.baseline_growth;
  }
  if (config.bench_nodes.size() >= 2) j["worst_decade_ratio"] = r.worst_decade_ratio;
  write_json(config.out + ".json", j);
  for (const auto& row : r.rows) log << row.variable << "=" << row.value << ": " << row.wall_time_s << " s\n";
  if (config.bench_n_eta.size() >= 2) {
    log << "sweep time variation across n_eta: " << 100.0 * r.sweep_variation << "%\n";
    log << "baseline growth: " << r.baseline_growth << "x\n";
  }
  if (config.bench_nodes.size() >= 2) log << "worst time ratio per decade of nodes: " << r.worst_decade_ratio << "x\n";
  if (config.bench_n_eta.size() < 2 && config.bench_nodes.size() < 2) log << "single point; no scaling claim\n";
  return kExitOk;
}

int cmd_lattice(const RunConfig& config, std::ostream& log) {
  config.check();
  const Lattice lattice = build_or_config_error(config.lattice);
  const ValidationReport v = validate(lattice);
  std::ostringstream edges;
  write_edge_list(lattice, edges);
  write_text(config.out + ".edges", edges.str());
  log << "nodes=" << v.node_count << " edges=" << v.edge_count << " z=" << lattice.expected_coordination()
      << " face_min=" << v.face_min_count << " face_max=" << v.face_max_count << "\ndegrees:";
  for (const auto& [d, c] : v.degree_histogram) log << " " << d << ":" << c;
  log << "\n" << (v.pass ? "valid" : "INVALID") << "\n";
  for (const auto& p : v.problems) log << "  " << p << "\n";
  return v.pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace lossperc
