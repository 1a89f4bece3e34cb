#include "kgaudit/ppr.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "kgaudit/errors.hpp"

namespace kgaudit {

double PprVector::value(EntityId e) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), e,
      [](const std::pair<EntityId, double>& a, EntityId b) { return a.first < b; });
  if (it != entries.end() && it->first == e) return it->second;
  return 0.0;
}

double PprVector::sum() const {
  double s = 0.0;
  for (const auto& [_, v] : entries) s += v;
  return s;
}

double walk_weight(int k, double alpha) {
  return std::pow(1.0 - alpha, static_cast<double>(k));
}

PprVector exact_ppr(const UndirectedView& view, EntityId source,
                    const PprConfig& cfg) {
  const std::uint32_t n = view.n;
  std::vector<double> p(n, 0.0), next(n, 0.0);
  p[source] = 1.0;

  for (int iter = 0; iter < cfg.max_iter_exact; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    double dangling = 0.0;
    for (std::uint32_t u = 0; u < n; ++u) {
      const double mass = p[u];
      if (mass == 0.0) continue;
      const auto deg = view.degree[u];
      if (deg == 0) {
        dangling += mass;  // degree-0 walk teleports back to the source
        continue;
      }
      const double share = mass / static_cast<double>(deg);
      const auto nbrs = view.neighbors_of(u);
      const auto wts = view.weights_of(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        next[nbrs[i]] += share * wts[i];
      }
    }
    for (std::uint32_t u = 0; u < n; ++u) next[u] *= (1.0 - cfg.alpha);
    next[source] += cfg.alpha + (1.0 - cfg.alpha) * dangling;

    double l1 = 0.0;
    for (std::uint32_t u = 0; u < n; ++u) l1 += std::abs(next[u] - p[u]);
    p.swap(next);
    if (l1 <= cfg.oracle_tol) {
      PprVector out;
      out.source = source;
      for (std::uint32_t u = 0; u < n; ++u) {
        if (p[u] != 0.0) out.entries.emplace_back(u, p[u]);
      }
      out.residual_mass = 0.0;
      return out;
    }
  }
  throw ConvergenceError("exact PPR did not converge within " +
                         std::to_string(cfg.max_iter_exact) + " iterations");
}

namespace {

// Per-thread push workspace, reset via the touched list so repeated calls on
// large graphs cost O(support), not O(n). The per-node termination thresholds
// (epsilon * degree) are cached per (view, epsilon) and amortized over the
// thousands of sources a dataset evaluation pushes from.
struct PushWorkspace {
  std::vector<double> estimate;
  std::vector<double> residual;
  std::vector<bool> queued;
  std::vector<EntityId> touched;
  std::vector<double> threshold;
  std::vector<double> inv_degree;
  std::priority_queue<std::pair<double, EntityId>> heap;
  std::uint64_t view_key = 0;
  double eps_key = -1.0;

  void prepare(const UndirectedView& view, double eps) {
    if (estimate.size() < view.n) {
      estimate.resize(view.n, 0.0);
      residual.resize(view.n, 0.0);
      queued.resize(view.n, false);
    }
    if (view_key != view.build_stamp || eps_key != eps ||
        threshold.size() < view.n) {
      threshold.resize(view.n);
      inv_degree.resize(view.n);
      for (std::uint32_t v = 0; v < view.n; ++v) {
        const auto d = static_cast<double>(view.degree[v]);
        threshold[v] = eps * d;
        inv_degree[v] = d > 0 ? 1.0 / d : 0.0;
      }
      view_key = view.build_stamp;
      eps_key = eps;
    }
    touched.clear();
  }

  void reset() {
    for (const EntityId v : touched) {
      estimate[v] = 0.0;
      residual[v] = 0.0;
      queued[v] = false;
    }
    while (!heap.empty()) heap.pop();
  }
};

}  // namespace

PprVector approx_ppr(const UndirectedView& view, EntityId source,
                     const PprConfig& cfg) {
  PprVector out;
  out.source = source;
  if (view.degree[source] == 0) {
    // Isolated source: every walk teleports straight back.
    out.entries.emplace_back(source, 1.0);
    out.residual_mass = 0.0;
    return out;
  }

  const double alpha = cfg.alpha;
  thread_local PushWorkspace ws;
  ws.prepare(view, cfg.epsilon);
  auto& estimate = ws.estimate;
  auto& residual = ws.residual;
  auto& queued = ws.queued;
  auto& heap = ws.heap;  // max-heap on scaled residual, ties to larger id

  residual[source] = 1.0;
  heap.emplace(ws.inv_degree[source], source);
  queued[source] = true;
  ws.touched.push_back(source);

  auto relax = [&](EntityId u, double amount) {
    double& ru = residual[u];
    if (ru == 0.0 && estimate[u] == 0.0) ws.touched.push_back(u);
    ru += amount;
    if (!queued[u] && ru >= ws.threshold[u]) {
      heap.emplace(ru * ws.inv_degree[u], u);
      queued[u] = true;
    }
  };

  while (!heap.empty()) {
    const EntityId v = heap.top().second;
    heap.pop();
    queued[v] = false;
    const double r = residual[v];
    if (r < ws.threshold[v]) continue;  // stale heap entry

    estimate[v] += alpha * r;
    residual[v] = 0.0;
    const double share = (1.0 - alpha) * r * ws.inv_degree[v];
    const auto nbrs = view.neighbors_of(v);
    if (view.unit_weights) {
      for (const EntityId u : nbrs) relax(u, share);
    } else {
      const auto wts = view.weights_of(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        relax(nbrs[i], share * wts[i]);
      }
    }
  }

  std::sort(ws.touched.begin(), ws.touched.end());
  double residual_mass = 0.0;
  out.entries.reserve(ws.touched.size());
  for (const EntityId v : ws.touched) {
    if (estimate[v] > 0.0) out.entries.emplace_back(v, estimate[v]);
    residual_mass += residual[v];
  }
  out.residual_mass = residual_mass;
  ws.reset();
  return out;
}

}  // namespace kgaudit
