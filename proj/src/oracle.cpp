#include "lossperc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lossperc {

namespace {

bool lossy_centres(Model m) { return m == Model::site || m == Model::model1 || m == Model::model2; }

double power(double x, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r *= x;
  return r;
}

// Per-edge outcome probabilities of one literal fusion, found by walking the
// attempt sequence rather than by a closed form.
struct EdgeProbs {
  double lost = 0.0, failed = 0.0, success = 0.0;
};

EdgeProbs literal_edge_probs(const ModelParams& params, double eta) {
  EdgeProbs e;
  if (params.model == Model::boosted) {
    const std::size_t photons = std::size_t{1} << params.boost_n;
    const double all = power(eta, photons);
    e.failed = all / static_cast<double>(photons);
    e.success = all - e.failed;
    e.lost = 1.0 - all;
    return e;
  }
  const int attempts = params.model == Model::model3 ? params.n_max : 1;
  double reach = 1.0;  // probability that this attempt is made
  for (int k = 0; k < attempts; ++k) {
    const double both = reach * eta * eta;
    e.lost += reach - both;
    e.success += both * params.p_s;
    reach = both * (1.0 - params.p_s);
  }
  e.failed = reach;
  return e;
}

std::size_t max_pool(const Lattice& g, const ModelParams& params) {
  const std::size_t n = g.node_count(), m = g.edge_count();
  switch (params.model) {
    case Model::bond: return m;
    case Model::site:
    case Model::model1: return n;
    case Model::model2: return n + 2 * m;
    case Model::model2prime: return 2 * m;
    case Model::model3: return 2 * static_cast<std::size_t>(params.n_max) * m;
    case Model::boosted: return (std::size_t{1} << params.boost_n) * m;
  }
  return 0;
}

// Sum over k of coeff[k] eta^k (1 - eta)^(T - k), T = coeff.size() - 1.
double bernstein(const std::vector<double>& coeff, double eta) {
  const std::size_t t = coeff.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k <= t; ++k) {
    if (coeff[k] == 0.0) continue;
    acc += coeff[k] * power(eta, k) * power(1.0 - eta, t - k);
  }
  return acc;
}

}  // namespace

OracleSample evaluate(const Lattice& g, Model model, const Configuration& config) {
  const std::size_t n = g.node_count();
  if (config.edge.size() != g.edge_count()) throw std::invalid_argument("configuration edge count mismatch");
  if (lossy_centres(model) && config.node_present.size() != n) {
    throw std::invalid_argument("configuration node count mismatch");
  }
  auto present = [&](NodeId v) { return !lossy_centres(model) || config.node_present[v] != 0; };

  std::vector<std::uint8_t> alive(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    bool ok = present(v);
    const auto nb = g.neighbors(v);
    const auto inc = g.incident_edges(v);
    for (std::size_t k = 0; ok && k < nb.size(); ++k) {
      const FusionOutcome f = config.edge[inc[k]];
      switch (model) {
        case Model::bond:
        case Model::site:
          break;
        case Model::model1:
          // A lost qubit forces its whole neighbourhood out.
          if (!present(nb[k])) ok = false;
          break;
        case Model::model2:
        case Model::model2prime:
        case Model::model3:
        case Model::boosted:
          // A lost fusion photon removes both centres; a lost centre linked
          // by a successful fusion removes its partner.
          if (f == FusionOutcome::lost) ok = false;
          if (f == FusionOutcome::success && !present(nb[k])) ok = false;
          break;
      }
    }
    alive[v] = ok;
  }

  const bool all_links = model == Model::site || model == Model::model1;
  OracleSample out;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (!alive[s] || seen[s]) continue;
    std::size_t size = 0;
    bool lo = false, hi = false;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      ++size;
      lo = lo || g.face_min(v);
      hi = hi || g.face_max(v);
      const auto nb = g.neighbors(v);
      const auto inc = g.incident_edges(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const NodeId w = nb[k];
        if (seen[w] || !alive[w]) continue;
        if (!all_links && config.edge[inc[k]] != FusionOutcome::success) continue;
        seen[w] = 1;
        stack.push_back(w);
      }
    }
    out.largest = std::max(out.largest, size);
    out.spanning = out.spanning || (lo && hi);
  }
  return out;
}

OracleSample canonical_sample(const Lattice& g, const ModelParams& params, double eta, Rng& rng) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  params.check();
  Configuration c;
  c.edge.assign(g.edge_count(), FusionOutcome::lost);
  if (lossy_centres(params.model)) {
    c.node_present.resize(g.node_count());
    for (auto& p : c.node_present) p = rng.bernoulli(eta);
  }
  for (auto& f : c.edge) {
    switch (params.model) {
      case Model::bond:
        f = rng.bernoulli(eta) ? FusionOutcome::success : FusionOutcome::lost;
        break;
      case Model::site:
      case Model::model1:
        break;
      case Model::model2:
      case Model::model2prime:
      case Model::model3: {
        // Repeat until success, loss, or the attempt budget runs out.
        const int attempts = params.model == Model::model3 ? params.n_max : 1;
        f = FusionOutcome::failed;
        for (int k = 0; k < attempts; ++k) {
          const bool a = rng.bernoulli(eta);
          const bool b = rng.bernoulli(eta);
          if (!a || !b) {
            f = FusionOutcome::lost;
            break;
          }
          if (rng.bernoulli(params.p_s)) {
            f = FusionOutcome::success;
            break;
          }
        }
        break;
      }
      case Model::boosted: {
        const int photons = 1 << params.boost_n;
        bool all = true;
        for (int k = 0; k < photons; ++k) all = rng.bernoulli(eta) && all;
        if (!all) {
          f = FusionOutcome::lost;
        } else {
          f = rng.bernoulli(1.0 / photons) ? FusionOutcome::failed : FusionOutcome::success;
        }
        break;
      }
    }
  }
  return evaluate(g, params.model, c);
}

CanonicalCurve canonical_curve(const Lattice& g, const ModelParams& params, std::span<const double> grid,
                               std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("need at least two samples per grid point");
  CanonicalCurve c;
  c.p.assign(grid.begin(), grid.end());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Rng rng(seed + k);
    double s = 0.0, s2 = 0.0;
    std::size_t spans = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      const OracleSample o = canonical_sample(g, params, grid[k], rng);
      const double x = static_cast<double>(o.largest);
      s += x;
      s2 += x * x;
      spans += o.spanning;
    }
    const double count = static_cast<double>(samples);
    const double mean = s / count;
    const double var = std::max(0.0, (s2 - count * mean * mean) / (count - 1.0));
    const double pb = static_cast<double>(spans) / count;
    c.mean_largest.push_back(mean);
    c.span_probability.push_back(pb);
    c.largest_error.push_back(std::sqrt(var / count));
    // Adjusted (Agresti-Coull) estimate: stays positive when no sample or
    // every sample spans.
    const double adj = (static_cast<double>(spans) + 2.0) / (count + 4.0);
    c.span_error.push_back(std::sqrt(adj * (1.0 - adj) / (count + 4.0)));
  }
  return c;
}

CanonicalCurve exhaustive_curve(const Lattice& g, const ModelParams& params, std::span<const double> grid) {
  params.check();
  const std::size_t pool = max_pool(g, params);
  if (pool > kExhaustiveMaxPhotons) {
    throw std::invalid_argument("instance too large for exhaustive enumeration (" + std::to_string(pool) +
                                " photons, cap " + std::to_string(kExhaustiveMaxPhotons) + ")");
  }
  const std::size_t n = g.node_count(), m = g.edge_count();
  const Model model = params.model;
  CanonicalCurve curve;
  curve.p.assign(grid.begin(), grid.end());
  Configuration c;
  c.node_present.assign(n, 1);
  c.edge.assign(m, FusionOutcome::lost);

  if (model == Model::model3 || model == Model::boosted) {
    // Edges are independent with eta-dependent outcome probabilities.
    std::size_t configs = 1;
    for (std::size_t e = 0; e < m; ++e) configs *= 3;
    std::vector<double> s(grid.size(), 0.0), b(grid.size(), 0.0);
    std::vector<EdgeProbs> probs;
    for (double eta : grid) probs.push_back(literal_edge_probs(params, eta));
    for (std::size_t code = 0; code < configs; ++code) {
      std::size_t x = code;
      for (std::size_t e = 0; e < m; ++e, x /= 3) c.edge[e] = static_cast<FusionOutcome>(x % 3);
      const OracleSample o = evaluate(g, model, c);
      if (o.largest == 0) continue;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        double w = 1.0;
        for (std::size_t e = 0; e < m; ++e) {
          switch (c.edge[e]) {
            case FusionOutcome::lost: w *= probs[k].lost; break;
            case FusionOutcome::failed: w *= probs[k].failed; break;
            case FusionOutcome::success: w *= probs[k].success; break;
          }
        }
        s[k] += w * static_cast<double>(o.largest);
        if (o.spanning) b[k] += w;
      }
    }
    curve.mean_largest = std::move(s);
    curve.span_probability = std::move(b);
    return curve;
  }

  // Fixed pool: accumulate, per number k of present photons, the
  // outcome-weighted sums; the curve is then a Bernstein polynomial in eta.
  std::vector<double> sum_s(pool + 1, 0.0), sum_b(pool + 1, 0.0);
  auto add = [&](std::size_t k, double w) {
    const OracleSample o = evaluate(g, model, c);
    sum_s[k] += w * static_cast<double>(o.largest);
    if (o.spanning) sum_b[k] += w;
  };

  if (model == Model::bond) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      for (std::size_t e = 0; e < m; ++e) {
        c.edge[e] = (mask >> e) & 1 ? FusionOutcome::success : FusionOutcome::lost;
      }
      add(static_cast<std::size_t>(__builtin_popcountll(mask)), 1.0);
    }
  } else if (model == Model::site || model == Model::model1) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (std::size_t v = 0; v < n; ++v) c.node_present[v] = (mask >> v) & 1;
      add(static_cast<std::size_t>(__builtin_popcountll(mask)), 1.0);
    }
  } else {
    // Per edge: no photon (k 0), exactly one of the two (k 1, two ways),
    // both and success (k 2, p_s), both and failure (k 2, 1 - p_s).
    const bool centres = model == Model::model2;
    const std::uint64_t centre_patterns = centres ? std::uint64_t{1} << n : 1;
    std::size_t edge_patterns = 1;
    for (std::size_t e = 0; e < m; ++e) edge_patterns *= 4;
    for (std::uint64_t cm = 0; cm < centre_patterns; ++cm) {
      std::size_t k0 = 0;
      if (centres) {
        for (std::size_t v = 0; v < n; ++v) c.node_present[v] = (cm >> v) & 1;
        k0 = static_cast<std::size_t>(__builtin_popcountll(cm));
      }
      for (std::size_t code = 0; code < edge_patterns; ++code) {
        std::size_t x = code, k = k0;
        double w = 1.0;
        for (std::size_t e = 0; e < m; ++e, x /= 4) {
          switch (x % 4) {
            case 0: c.edge[e] = FusionOutcome::lost; break;
            case 1: c.edge[e] = FusionOutcome::lost; k += 1; w *= 2.0; break;
            case 2: c.edge[e] = FusionOutcome::success; k += 2; w *= params.p_s; break;
            case 3: c.edge[e] = FusionOutcome::failed; k += 2; w *= 1.0 - params.p_s; break;
          }
        }
        if (w != 0.0) add(k, w);
      }
    }
  }
  for (double eta : grid) {
    curve.mean_largest.push_back(bernstein(sum_s, eta));
    curve.span_probability.push_back(bernstein(sum_b, eta));
  }
  return curve;
}

std::string ComparisonReport::summary() const {
  char buf[256];
  if (points.empty()) return "no points compared";
  const PointDeviation& w = points[worst_index];
  const bool span = worst_quantity == "span_prob";
  std::snprintf(buf, sizeof buf, "%s: max deviation %.3g; worst at p=%.6g (%s diff %.3g, allowed %.3g)",
                pass ? "pass" : "fail", max_deviation, w.p, worst_quantity.c_str(),
                span ? w.span_diff : w.largest_diff, span ? w.span_allowed : w.largest_allowed);
  return buf;
}

ComparisonReport compare(const CanonicalCurve& a, const CanonicalCurve& b, const Tolerance& tol) {
  if (a.p.size() != b.p.size()) throw std::invalid_argument("curves have different grid sizes");
  for (std::size_t k = 0; k < a.p.size(); ++k) {
    if (std::abs(a.p[k] - b.p[k]) > 1e-12) throw std::invalid_argument("curves have different grids");
  }
  auto err = [](const std::vector<double>& v, std::size_t k) { return v.empty() ? 0.0 : v[k]; };
  ComparisonReport r;
  double worst_ratio = -1.0;
  for (std::size_t k = 0; k < a.p.size(); ++k) {
    PointDeviation d;
    d.p = a.p[k];
    d.largest_diff = std::abs(a.mean_largest[k] - b.mean_largest[k]);
    d.span_diff = std::abs(a.span_probability[k] - b.span_probability[k]);
    if (tol.kind == Tolerance::Kind::absolute) {
      d.largest_allowed = d.span_allowed = tol.value;
    } else {
      const double sl = std::hypot(err(a.largest_error, k), err(b.largest_error, k));
      const double sb = std::hypot(err(a.span_error, k), err(b.span_error, k));
      d.largest_allowed = std::max(tol.value * sl, tol.largest_floor);
      d.span_allowed = std::max(tol.value * sb, tol.span_floor);
    }
    if (!tol.check_largest) d.largest_allowed = INFINITY;
    d.pass = d.largest_diff <= d.largest_allowed && d.span_diff <= d.span_allowed;
    r.pass = r.pass && d.pass;
    r.max_deviation = std::max({r.max_deviation, d.largest_diff, d.span_diff});
    auto ratio = [](double diff, double allowed) {
      return allowed > 0.0 ? diff / allowed : (diff > 0.0 ? INFINITY : 0.0);
    };
    const double rl = ratio(d.largest_diff, d.largest_allowed);
    const double rb = ratio(d.span_diff, d.span_allowed);
    if (rl > worst_ratio) {
      worst_ratio = rl;
      r.worst_index = k;
      r.worst_quantity = "mean_S";
    }
    if (rb > worst_ratio) {
      worst_ratio = rb;
      r.worst_index = k;
      r.worst_quantity = "span_prob";
    }
    r.points.push_back(d);
  }
  return r;
}

}  // namespace lossperc
