#include "lossperc/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lossperc/commands.hpp"
#include "lossperc/io.hpp"
#include "lossperc/oracle.hpp"
#include "lossperc/sweep.hpp"

namespace lossperc {

namespace {

// Feeds fusion outcomes from a bit pattern, lowest bit first.
struct ScriptedBits {
  std::uint64_t bits = 0;
  int next = 0;
  bool bernoulli(double) { return (bits >> next++) & 1; }
};

// Exact average of the sweep trajectory over all pool permutations and all
// outcome patterns of the `draws` fusion draws, for a prepared state.
void permutation_average(PercolationState& state, std::size_t draws, double p_s, std::vector<double>& mean_s,
                         std::vector<double>& mean_b) {
  const std::size_t t = state.photon_count();
  mean_s.assign(t + 1, 0.0);
  mean_b.assign(t + 1, 0.0);
  std::vector<std::size_t> order(t);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double permutations = 0.0;
  const std::uint64_t patterns = std::uint64_t{1} << draws;
  std::vector<double> pattern_weight(patterns);
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    const int ones = __builtin_popcountll(mask);
    pattern_weight[mask] = std::pow(p_s, ones) * std::pow(1.0 - p_s, static_cast<double>(draws) - ones);
  }
  do {
    permutations += 1.0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      const double w = pattern_weight[mask];
      if (w == 0.0) continue;
      ScriptedBits gen{mask, 0};
      state.reset();
      mean_s[0] += w * static_cast<double>(state.largest());
      mean_b[0] += w * state.spanning();
      for (std::size_t i = 0; i < t; ++i) {
        state.add_photon(order[i], gen);
        mean_s[i + 1] += w * static_cast<double>(state.largest());
        mean_b[i + 1] += w * state.spanning();
      }
      if (static_cast<std::size_t>(gen.next) != draws) throw std::logic_error("unexpected number of fusion draws");
    }
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : mean_s) v /= permutations;
  for (double& v : mean_b) v /= permutations;
}

struct SlotChoice {
  std::uint32_t slots;
  bool fail;
  double weight;
};

std::vector<SlotChoice> slot_choices(const ModelParams& p) {
  std::vector<SlotChoice> c;
  if (p.model == Model::boosted) {
    const std::uint32_t photons = 1u << p.boost_n;
    const double f = 1.0 / static_cast<double>(photons);
    c.push_back({photons, false, 1.0 - f});
    c.push_back({photons, true, f});
    return c;
  }
  double fail_so_far = 1.0;
  for (int n = 1; n <= p.n_max; ++n) {
    c.push_back({2u * static_cast<std::uint32_t>(n), false, fail_so_far * p.p_s});
    fail_so_far *= 1.0 - p.p_s;
  }
  c.push_back({2u * static_cast<std::uint32_t>(p.n_max), true, fail_so_far});
  return c;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::size_t scaled(std::size_t base, double scale, std::size_t minimum) {
  return std::max<std::size_t>(minimum, static_cast<std::size_t>(std::llround(static_cast<double>(base) * scale)));
}

// ---------------------------------------------------------------- lattices

CheckResult check_lattice_structure(const SuiteOptions& opt) {
  struct Case {
    LatticeFamily family;
    int dim;
    int size;
    int z;
    std::vector<DisplacementClass> neighborhood;
  };
  const std::vector<Case> cases = {
      {LatticeFamily::hypercubic, 2, 4, 4, {}},     {LatticeFamily::hypercubic, 3, 4, 6, {}},
      {LatticeFamily::hypercubic, 4, 3, 8, {}},     {LatticeFamily::diamond, 2, 4, 3, {}},
      {LatticeFamily::diamond, 3, 3, 4, {}},        {LatticeFamily::diamond, 4, 3, 5, {}},
      {LatticeFamily::bcc, 2, 4, 4, {}},            {LatticeFamily::bcc, 3, 4, 8, {}},
      {LatticeFamily::fcc, 2, 4, 4, {}},            {LatticeFamily::fcc, 3, 4, 12, {}},
      {LatticeFamily::extended_hypercubic, 2, 5, 8, {{1}, {1, 1}}},
      {LatticeFamily::extended_hypercubic, 3, 5, 18, {{1}, {1, 1}}},
      {LatticeFamily::rhg, 3, 3, 4, {}},
  };
  std::vector<std::string> failures;
  for (const auto& c : cases) {
    for (bool periodic : {true, false}) {
      LatticeSpec spec;
      spec.family = c.family;
      spec.dimension = c.dim;
      spec.size = c.size;
      spec.neighborhood = c.neighborhood;
      if (periodic) spec.boundary.assign(c.dim, Boundary::periodic);
      const std::string label = std::string(to_string(c.family)) + " d=" + std::to_string(c.dim) +
                                (periodic ? " periodic" : " open axis 0");
      Lattice g = build(spec);
      if (opt.corrupt_lattice && g.edge_count() > 0) {
        const EdgeId drop = 0;
        g = g.without_edges(std::span<const EdgeId>(&drop, 1));
      }
      const ValidationReport v = validate(g);
      if (!v.pass) {
        failures.push_back(label + ": " + (v.problems.empty() ? "invalid" : v.problems.front()));
        continue;
      }
      if (coordination_number(spec) != c.z) {
        failures.push_back(label + ": coordination " + std::to_string(coordination_number(spec)) + " != " +
                           std::to_string(c.z));
      }
      if (periodic && 2 * g.edge_count() != static_cast<std::size_t>(c.z) * g.node_count()) {
        failures.push_back(label + ": 2|E| != z|V|");
      }
      if (!periodic && (v.face_min_count == 0 || v.face_max_count == 0)) failures.push_back(label + ": no faces");
    }
  }
  CheckResult r;
  r.pass = failures.empty();
  r.detail = r.pass ? std::to_string(2 * cases.size()) + " lattices valid" : failures.front();
  if (failures.size() > 1) r.detail += " (+" + std::to_string(failures.size() - 1) + " more)";
  return r;
}

struct ThresholdCase {
  std::string label;
  LatticeFamily family;
  int dim;
  Model model;
  std::vector<int> sizes;
  std::size_t reps;
  double expected;
  double tolerance;
};

CheckResult threshold_cases(const std::vector<ThresholdCase>& cases, double budget_s, const SuiteOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.pass = true;
  for (const auto& c : cases) {
    RunConfig cfg;
    cfg.lattice.family = c.family;
    cfg.lattice.dimension = c.dim;
    cfg.sizes = c.sizes;
    cfg.params.model = c.model;
    cfg.repetitions = scaled(c.reps, opt.scale, 10);
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;
    const ThresholdStudy s = run_threshold_study(cfg);
    if (!r.detail.empty()) r.detail += "; ";
    if (!s.extrapolation) {
      r.pass = false;
      r.detail += c.label + ": no extrapolation";
      continue;
    }
    const double v = s.extrapolation->value;
    const bool ok = std::abs(v - c.expected) <= c.tolerance;
    r.pass = r.pass && ok;
    r.detail += fmt("%s lambda_inf=%.4f+-%.4f (%s fit, target %.4f+-%.4f)", c.label.c_str(), v,
                    s.extrapolation->error, to_string(s.extrapolation->mode).c_str(), c.expected, c.tolerance);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed > budget_s) {
    r.pass = false;
    r.detail += fmt("; runtime %.1f s over budget %.0f s", elapsed, budget_s);
  }
  return r;
}

// ------------------------------------------------------------------ oracle

Lattice path_lattice(std::size_t nodes) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < nodes; ++v) edges.push_back({v, v + 1});
  std::vector<std::uint8_t> lo(nodes, 0), hi(nodes, 0);
  lo.front() = 1;
  hi.back() = 1;
  return Lattice::from_edges(nodes, std::move(edges), std::move(lo), std::move(hi));
}

Lattice open_square(int size) {
  LatticeSpec s;
  s.dimension = 2;
  s.size = size;
  s.boundary = {Boundary::open, Boundary::open};
  return build(s);
}

CheckResult check_oracle_equivalence(const SuiteOptions& opt) {
  struct Case {
    std::string label;
    LatticeSpec spec;
    ModelParams params;
  };
  LatticeSpec square;
  square.dimension = 2;
  square.size = 8;
  LatticeSpec cubic;
  cubic.dimension = 3;
  cubic.size = 8;
  ModelParams m1{Model::model1};
  ModelParams m2{Model::model2};
  ModelParams m2p{Model::model2prime};
  ModelParams m3{Model::model3};
  m3.n_max = 2;
  const std::vector<Case> cases = {{"model1 square L=8", square, m1},
                                   {"model2 cubic L=8", cubic, m2},
                                   {"model2prime cubic L=8", cubic, m2p},
                                   {"model3 n_max=2 cubic L=8", cubic, m3}};
  const std::size_t samples = scaled(2000, opt.scale, 50);
  const std::vector<double> grid = uniform_grid(0.5, 1.0, 11);
  Tolerance tol;
  tol.kind = Tolerance::Kind::sigma;
  tol.value = 3.0;
  tol.span_floor = 1e-9;
  tol.largest_floor = 1e-9;
  CheckResult r;
  r.pass = true;
  for (const auto& c : cases) {
    const Lattice g = build(c.spec);
    const CanonicalCurve nz = canonical_ensemble(g, c.params, samples, opt.seed, grid, opt.workers).curve;
    const CanonicalCurve direct = canonical_curve(g, c.params, grid, samples, opt.seed + 7919);
    const ComparisonReport cmp = compare(nz, direct, tol);
    r.pass = r.pass && cmp.pass;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += c.label + " " + cmp.summary();
  }
  return r;
}

CheckResult check_exhaustive_equivalence(const SuiteOptions&) {
  struct Case {
    std::string label;
    Lattice lattice;
    ModelParams params;
  };
  ModelParams bond{Model::bond}, site{Model::site}, m1{Model::model1}, m2{Model::model2};
  ModelParams m2p{Model::model2prime}, m2p_biased{Model::model2prime}, m3{Model::model3}, boosted{Model::boosted};
  m2p_biased.p_s = 0.3;
  m3.n_max = 2;
  boosted.boost_n = 2;
  std::vector<Case> cases;
  cases.push_back({"bond 2x2 open square", open_square(2), bond});
  cases.push_back({"site 3x3 open square", open_square(3), site});
  cases.push_back({"model1 3x3 open square", open_square(3), m1});
  cases.push_back({"model2 3-node path", path_lattice(3), m2});
  cases.push_back({"model2prime 2x2 open square", open_square(2), m2p});
  cases.push_back({"model2prime p_s=0.3 2x2 open square", open_square(2), m2p_biased});
  cases.push_back({"model3 n_max=2 3-node path", path_lattice(3), m3});
  cases.push_back({"boosted n=2 3-node path", path_lattice(3), boosted});
  const std::vector<double> grid = uniform_grid(0.0, 1.0, 11);
  Tolerance tol;
  tol.value = 1e-10;
  CheckResult r;
  r.pass = true;
  double worst = 0.0;
  std::string failed;
  for (const auto& c : cases) {
    const CanonicalCurve exact = exhaustive_curve(c.lattice, c.params, grid);
    const CanonicalCurve perm = exact_microcanonical_curve(c.lattice, c.params, grid);
    const ComparisonReport cmp = compare(exact, perm, tol);
    worst = std::max(worst, cmp.max_deviation);
    if (!cmp.pass) {
      r.pass = false;
      if (failed.empty()) failed = c.label + " " + cmp.summary();
    }
  }
  r.detail = r.pass ? fmt("%zu instances, max deviation %.2e (tol 1e-10)", cases.size(), worst) : failed;
  return r;
}

CheckResult check_model3_vs_model2prime(const SuiteOptions& opt) {
  LatticeSpec cubic;
  cubic.dimension = 3;
  cubic.size = 10;
  const Lattice g = build(cubic);
  ModelParams m3{Model::model3};
  m3.n_max = 1;
  ModelParams m2p{Model::model2prime};
  const std::size_t reps = scaled(100, opt.scale, 10);
  const std::vector<double> grid = uniform_grid(0.5, 1.0, 11);
  // Independent seed ranges for the two ensembles.
  const CanonicalCurve a = canonical_ensemble(g, m3, reps, opt.seed, grid, opt.workers).curve;
  const CanonicalCurve b = canonical_ensemble(g, m2p, reps, opt.seed + 1'000'003, grid, opt.workers).curve;
  Tolerance tol;
  tol.kind = Tolerance::Kind::sigma;
  tol.value = 3.0;
  tol.span_floor = 1e-9;
  tol.check_largest = false;
  const ComparisonReport cmp = compare(a, b, tol);
  CheckResult r;
  r.pass = cmp.pass;
  r.detail = fmt("%zu runs each: ", reps) + cmp.summary();
  return r;
}

// -------------------------------------------------------------- identities

CheckResult check_adaptive_identities(const SuiteOptions& opt) {
  CheckResult r;
  r.pass = true;
  double worst_sum = 0.0;
  for (double p_s : {0.5, 0.25, 0.8}) {
    for (int n = 1; n <= 12; ++n) {
      for (int k = 0; k <= 100; ++k) {
        const auto pr = adaptive_probs(k / 100.0, n, p_s);
        worst_sum = std::max(worst_sum, std::abs(pr.failure + pr.success + pr.loss - 1.0));
        if (pr.failure < 0 || pr.success < 0 || pr.loss < 0) r.pass = false;
      }
    }
  }
  if (worst_sum > 1e-12) r.pass = false;
  const auto half = adaptive_probs(1.0, 2, 0.5);
  if (half.success != 0.75) r.pass = false;
  r.detail = fmt("max |sum-1|=%.1e, p_S(1,2,1/2)=%.17g", worst_sum, half.success);

  // Presample frequencies over at least 1e5 fusions.
  LatticeSpec spec;
  spec.dimension = 3;
  spec.size = 33;
  spec.boundary.assign(3, Boundary::periodic);
  const Lattice g = build(spec);
  const std::size_t m = g.edge_count();
  ModelParams m3{Model::model3};
  m3.n_max = 2;
  PercolationState s3(g, m3);
  Rng rng(opt.seed);
  s3.presample(rng);
  std::size_t one = 0, fails = 0;
  for (EdgeId e = 0; e < m; ++e) {
    one += s3.required_photons(e) == 2;
    fails += s3.all_fail(e);
  }
  ModelParams b2{Model::boosted};
  b2.boost_n = 2;
  PercolationState sb(g, b2);
  sb.presample(rng);
  std::size_t boosted_success = 0;
  for (EdgeId e = 0; e < m; ++e) boosted_success += !sb.all_fail(e);
  auto within = [&](std::size_t count, double p, const char* what) {
    const double n = static_cast<double>(m);
    const double z = (static_cast<double>(count) - n * p) / std::sqrt(n * p * (1.0 - p));
    const bool ok = std::abs(z) <= 3.0;
    r.pass = r.pass && ok;
    r.detail += fmt(", %s %.4f (z=%.2f)", what, count / n, z);
  };
  r.detail += fmt("; %zu fusions:", m);
  within(one, 0.5, "P(n=1)");
  within(fails, 0.25, "P(b=1)");
  within(boosted_success, 0.75, "boosted success");
  return r;
}

// ------------------------------------------------------------ monotonicity

CheckResult check_monotonicity(const SuiteOptions& opt) {
  std::vector<Lattice> lattices;
  {
    LatticeSpec s;
    s.dimension = 2;
    s.size = 8;
    lattices.push_back(build(s));
    s.dimension = 3;
    s.size = 5;
    lattices.push_back(build(s));
    s.family = LatticeFamily::diamond;
    s.dimension = 2;
    s.size = 6;
    lattices.push_back(build(s));
    s.family = LatticeFamily::rhg;
    s.dimension = 3;
    s.size = 3;
    lattices.push_back(build(s));
    s.family = LatticeFamily::bcc;
    s.dimension = 2;
    s.size = 6;
    lattices.push_back(build(s));
  }
  const Model models[] = {Model::bond,  Model::site,   Model::model1, Model::model2,
                          Model::model2prime, Model::model3, Model::boosted};
  const double p_values[] = {0.5, 0.3, 1.0, 0.7};
  const std::size_t sweeps = scaled(100, std::min(1.0, opt.scale), 14);
  std::size_t steps = 0;
  std::string failure;
  for (std::size_t k = 0; k < sweeps && failure.empty(); ++k) {
    const Lattice& g = lattices[k % lattices.size()];
    ModelParams p;
    p.model = models[k % 7];
    p.p_s = p_values[(k / 7) % 4];
    p.n_max = 1 + static_cast<int>(k % 3);
    p.boost_n = 1 + static_cast<int>(k % 2);
    Sweeper sw(g, p);
    std::size_t last_largest = 0;
    bool last_span = false;
    std::vector<std::uint8_t> node_e(g.node_count(), 0), edge_done(g.edge_count(), 0);
    std::vector<EdgeLabel> edge_label(g.edge_count(), EdgeLabel::lost);
    const std::string label = std::string(to_string(p.model)) + " sweep " + std::to_string(k);
    sw.run(opt.seed + k, [&](std::size_t i, const PercolationState& st) {
      if (!failure.empty()) return;
      ++steps;
      std::string why;
      if (st.largest() < last_largest) failure = label + ": S decreased at i=" + std::to_string(i);
      if (last_span && !st.spanning()) failure = label + ": B reverted at i=" + std::to_string(i);
      if (!st.check_consistency(&why)) failure = label + " at i=" + std::to_string(i) + ": " + why;
      for (NodeId v = 0; v < g.node_count() && failure.empty(); ++v) {
        const bool e = st.node_label(v) == NodeLabel::exists;
        if (node_e[v] && !e) failure = label + ": node left the graph";
        node_e[v] = e;
      }
      if (p.model != Model::site && p.model != Model::model1) {
        for (EdgeId e = 0; e < g.edge_count() && failure.empty(); ++e) {
          const EdgeLabel now = st.edge_label(e);
          if (edge_done[e] && now != edge_label[e]) failure = label + ": fusion outcome changed";
          if (now != EdgeLabel::lost) edge_done[e] = 1;
          edge_label[e] = now;
        }
      }
      last_largest = st.largest();
      last_span = st.spanning();
    });
  }
  CheckResult r;
  r.pass = failure.empty();
  r.detail = r.pass ? fmt("%zu sweeps, %zu steps rescanned", sweeps, steps) : failure;
  return r;
}

// ------------------------------------------------------------- determinism

CheckResult check_determinism(const SuiteOptions& opt) {
  namespace fs = std::filesystem;
  const fs::path dir = opt.scratch_dir.empty() ? fs::temp_directory_path() / "lossperc_determinism"
                                               : fs::path(opt.scratch_dir);
  fs::create_directories(dir);
  CheckResult r;
  r.pass = true;
  std::ostringstream sink;
  auto run = [&](RunConfig cfg, unsigned workers, const std::string& tag) {
    cfg.workers = workers;
    cfg.out = (dir / tag).string();
    cmd_sweep(cfg, sink);
    return read_text(cfg.out + ".csv");
  };
  RunConfig base;
  base.lattice.dimension = 3;
  base.lattice.size = 10;
  base.params.model = Model::model2prime;
  base.repetitions = scaled(50, std::min(1.0, opt.scale), 10);
  base.seed = opt.seed;
  base.grid = uniform_grid(0.0, 1.0, 51);
  RunConfig variable = base;
  variable.params.model = Model::model3;
  variable.params.n_max = 2;
  int checked = 0;
  for (const auto& [cfg, name] : {std::pair{base, "model2prime"}, std::pair{variable, "model3"}}) {
    const std::string a = run(cfg, 1, std::string(name) + "_w1");
    const std::string b = run(cfg, 8, std::string(name) + "_w8");
    const std::string c = run(cfg, 1, std::string(name) + "_w1_again");
    if (a != b || a != c) {
      r.pass = false;
      r.detail += std::string(name) + ": curve files differ; ";
    }
    ++checked;
  }
  if (r.pass) r.detail = fmt("%d configurations byte-identical with 1 and 8 workers", checked);
  return r;
}

// ----------------------------------------------------------------- runtime

CheckResult check_runtime(const SuiteOptions& opt) {
  RunConfig cfg;
  cfg.lattice.dimension = 3;
  cfg.lattice.size = 50;
  cfg.params.model = Model::model2prime;
  cfg.repetitions = 2;
  cfg.seed = opt.seed;
  cfg.bench_repeats = 5;
  const BenchReport b = run_bench(cfg);
  CheckResult r;
  const bool flat = b.sweep_variation <= 0.20;
  const bool grows = b.baseline_growth >= 50.0;
  const bool linear = b.worst_decade_ratio <= 12.0;
  r.pass = flat && grows && linear;
  r.detail = fmt("sweep time variation %.1f%% (<=20%%), baseline growth %.0fx (>=50x), "
                 "worst per-decade ratio %.2fx (<=12x)",
                 100.0 * b.sweep_variation, b.baseline_growth, b.worst_decade_ratio);
  return r;
}

using CheckFn = CheckResult (*)(const SuiteOptions&);

struct NamedCheck {
  const char* name;
  CheckFn fn;
};

CheckResult square_threshold(const SuiteOptions& o) {
  return threshold_cases({{"square bond", LatticeFamily::hypercubic, 2, Model::bond, {16, 32, 64}, 200, 0.5, 0.010}},
                         120.0, o);
}
CheckResult cubic_threshold(const SuiteOptions& o) {
  return threshold_cases(
      {{"simple cubic bond", LatticeFamily::hypercubic, 3, Model::bond, {16, 24, 32}, 200, 0.249, 0.005}}, 300.0, o);
}
CheckResult diamond_thresholds(const SuiteOptions& o) {
  return threshold_cases({{"diamond d=2 bond", LatticeFamily::diamond, 2, Model::bond, {16, 32, 64}, 200, 0.653, 0.010},
                          {"diamond d=3 bond", LatticeFamily::diamond, 3, Model::bond, {8, 12, 16, 24}, 200, 0.389,
                           0.006}},
                         600.0, o);
}
CheckResult rhg_thresholds(const SuiteOptions& o) {
  return threshold_cases({{"rhg bond", LatticeFamily::rhg, 3, Model::bond, {12, 16, 24, 32}, 300, 0.3845, 0.006},
                          {"rhg site", LatticeFamily::rhg, 3, Model::site, {12, 16, 24, 32}, 300, 0.4220, 0.006}},
                         600.0, o);
}

const std::vector<NamedCheck>& registry() {
  static const std::vector<NamedCheck> checks = {
      {"lattice_structure", check_lattice_structure},
      {"square_bond_threshold", square_threshold},
      {"cubic_bond_threshold", cubic_threshold},
      {"diamond_bond_thresholds", diamond_thresholds},
      {"rhg_thresholds", rhg_thresholds},
      {"model3_model2prime_equivalence", check_model3_vs_model2prime},
      {"oracle_equivalence", check_oracle_equivalence},
      {"exhaustive_equivalence", check_exhaustive_equivalence},
      {"adaptive_identities", check_adaptive_identities},
      {"monotonicity", check_monotonicity},
      {"determinism", check_determinism},
      {"runtime_scaling", check_runtime},
  };
  return checks;
}

}  // namespace

CanonicalCurve exact_microcanonical_curve(const Lattice& lattice, const ModelParams& params,
                                          std::span<const double> grid, std::size_t max_photons) {
  params.check();
  PercolationState state(lattice, params);
  std::vector<double> mean_s, mean_b;
  if (!params.variable_photon_count()) {
    const std::size_t t = state.photon_count();
    if (t > max_photons) throw std::invalid_argument("pool too large for permutation enumeration");
    const bool fusion = params.model == Model::model2 || params.model == Model::model2prime;
    const std::size_t draws = fusion ? lattice.edge_count() : 0;
    permutation_average(state, draws, params.p_s, mean_s, mean_b);
    return convolve(mean_s, mean_b, grid);
  }
  // Enumerate every presample with its probability.
  const std::vector<SlotChoice> choices = slot_choices(params);
  const std::size_t m = lattice.edge_count();
  if (2 * static_cast<std::size_t>(params.n_max) * m > max_photons && params.model == Model::model3) {
    throw std::invalid_argument("pool too large for permutation enumeration");
  }
  if (params.model == Model::boosted && (std::size_t{1} << params.boost_n) * m > max_photons) {
    throw std::invalid_argument("pool too large for permutation enumeration");
  }
  CanonicalCurve total;
  total.p.assign(grid.begin(), grid.end());
  total.mean_largest.assign(grid.size(), 0.0);
  total.span_probability.assign(grid.size(), 0.0);
  std::vector<std::size_t> pick(m, 0);
  while (true) {
    double w = 1.0;
    for (EdgeId e = 0; e < m; ++e) {
      const SlotChoice& c = choices[pick[e]];
      state.set_slots(e, c.slots, c.fail);
      w *= c.weight;
    }
    state.finish_presample();
    if (w > 0.0) {
      permutation_average(state, 0, params.p_s, mean_s, mean_b);
      const CanonicalCurve c = convolve(mean_s, mean_b, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        total.mean_largest[k] += w * c.mean_largest[k];
        total.span_probability[k] += w * c.span_probability[k];
      }
    }
    std::size_t e = 0;
    while (e < m && ++pick[e] == choices.size()) pick[e++] = 0;
    if (e == m) break;
  }
  return total;
}

std::vector<std::string> check_names() {
  std::vector<std::string> names;
  for (const auto& c : registry()) names.emplace_back(c.name);
  return names;
}

std::vector<std::string> suite_names() {
  return {"lattices", "oracle", "identities", "monotonicity", "determinism", "runtime", "default"};
}

std::vector<std::string> suite_checks(const std::string& suite) {
  if (suite == "lattices") {
    return {"lattice_structure", "square_bond_threshold", "cubic_bond_threshold", "diamond_bond_thresholds",
            "rhg_thresholds"};
  }
  if (suite == "oracle") return {"oracle_equivalence", "exhaustive_equivalence", "model3_model2prime_equivalence"};
  if (suite == "identities") return {"adaptive_identities"};
  if (suite == "monotonicity") return {"monotonicity"};
  if (suite == "determinism") return {"determinism"};
  if (suite == "runtime") return {"runtime_scaling"};
  if (suite == "default" || suite == "all") return check_names();
  for (const auto& c : registry()) {
    if (suite == c.name) return {suite};
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

CheckResult run_check(const std::string& name, const SuiteOptions& options) {
  for (const auto& c : registry()) {
    if (name != c.name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.fn(options);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  throw std::invalid_argument("unknown check '" + name + "'");
}

std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& options,
                                   const std::function<void(const CheckResult&)>& on_result) {
  std::vector<CheckResult> results;
  for (const auto& name : suite_checks(suite)) {
    results.push_back(run_check(name, options));
    if (on_result) on_result(results.back());
  }
  return results;
}

}  // namespace lossperc
