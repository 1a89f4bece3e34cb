#include "kgaudit/louvain.hpp"

#include <algorithm>
#include <cmath>

#include "kgaudit/errors.hpp"
#include "kgaudit/rng.hpp"

namespace kgaudit {

double modularity(const UndirectedView& view, const PartitionAssignment& assignment,
                  double resolution) {
  if (view.total_edge_weight == 0) throw UndefinedModularityError();
  const double w_total = static_cast<double>(view.total_edge_weight);

  std::vector<std::uint64_t> intra(assignment.community_count, 0);
  std::vector<std::uint64_t> degree(assignment.community_count, 0);
  for (std::uint32_t u = 0; u < view.n; ++u) {
    degree[assignment.community_of[u]] += view.degree[u];
    const auto nbrs = view.neighbors_of(u);
    const auto wts = view.weights_of(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const std::uint32_t v = nbrs[i];
      if (v <= u) continue;  // each undirected edge once
      if (assignment.community_of[u] == assignment.community_of[v]) {
        intra[assignment.community_of[u]] += wts[i];
      }
    }
  }

  double q = 0.0;
  for (std::uint32_t c = 0; c < assignment.community_count; ++c) {
    const double frac = static_cast<double>(degree[c]) / (2.0 * w_total);
    q += static_cast<double>(intra[c]) / w_total - resolution * frac * frac;
  }
  return q;
}

namespace {

// Aggregated working graph; unlike UndirectedView it carries self-loops
// (collapsed intra-community weight).
struct WorkGraph {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint32_t> neighbors;
  std::vector<std::uint64_t> weights;
  std::vector<std::uint64_t> self_loop;  // full loop weight (counted once)
  std::vector<std::uint64_t> degree;     // includes 2 * self_loop
  std::uint64_t total_weight = 0;        // W

  std::span<const std::uint32_t> neighbors_of(std::uint32_t u) const {
    return {neighbors.data() + offsets[u], neighbors.data() + offsets[u + 1]};
  }
  std::span<const std::uint64_t> weights_of(std::uint32_t u) const {
    return {weights.data() + offsets[u], weights.data() + offsets[u + 1]};
  }
};

WorkGraph from_view(const UndirectedView& view) {
  WorkGraph g;
  g.n = view.n;
  g.offsets.assign(view.offsets.begin(), view.offsets.end());
  g.neighbors = view.neighbors;
  g.weights.assign(view.weights.begin(), view.weights.end());
  g.self_loop.assign(view.n, 0);
  g.degree.assign(view.degree.begin(), view.degree.end());
  g.total_weight = view.total_edge_weight;
  return g;
}

// One sweep-until-stable local-move phase. Returns the number of moves.
std::uint64_t local_phase(const WorkGraph& g, double resolution, Rng& rng,
                          std::vector<std::uint32_t>& community) {
  const double two_w = 2.0 * static_cast<double>(g.total_weight);
  std::vector<std::uint64_t> comm_degree(g.n, 0);
  for (std::uint32_t u = 0; u < g.n; ++u) comm_degree[community[u]] += g.degree[u];

  std::vector<std::uint32_t> sweep(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i) sweep[i] = i;
  rng.shuffle(sweep);

  // Scratch for neighbor-community weights.
  std::vector<double> weight_to(g.n, 0.0);
  std::vector<std::uint32_t> touched;

  std::uint64_t total_moves = 0;
  bool moved = true;
  while (moved) {
    moved = false;
    for (const std::uint32_t u : sweep) {
      const std::uint32_t old_comm = community[u];
      touched.clear();
      for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
        const std::uint32_t v = g.neighbors[i];
        if (v == u) continue;
        const std::uint32_t c = community[v];
        if (weight_to[c] == 0.0) touched.push_back(c);
        weight_to[c] += static_cast<double>(g.weights[i]);
      }

      comm_degree[old_comm] -= g.degree[u];
      const double deg_u = static_cast<double>(g.degree[u]);
      // gain(c) ~ k_{u,c} - resolution * d(u) * Sigma_tot(c) / 2W
      auto gain = [&](std::uint32_t c) {
        return weight_to[c] -
               resolution * deg_u * static_cast<double>(comm_degree[c]) / two_w;
      };
      std::uint32_t best = old_comm;
      double best_gain = gain(old_comm);
      std::sort(touched.begin(), touched.end());
      // Strict improvement only (no oscillation on ties); among equally good
      // candidates the smallest community id wins via the ascending sweep.
      for (const std::uint32_t c : touched) {
        const double gc = gain(c);
        if (gc > best_gain) {
          best = c;
          best_gain = gc;
        }
      }
      comm_degree[best] += g.degree[u];
      if (best != old_comm) {
        community[u] = best;
        moved = true;
        ++total_moves;
      }
      for (const std::uint32_t c : touched) weight_to[c] = 0.0;
    }
  }
  return total_moves;
}

void renumber(std::vector<std::uint32_t>& community, std::uint32_t& count) {
  std::vector<std::uint32_t> remap(community.size(), 0xFFFFFFFFu);
  std::uint32_t next = 0;
  for (auto& c : community) {
    if (remap[c] == 0xFFFFFFFFu) remap[c] = next++;
    c = remap[c];
  }
  count = next;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<std::uint32_t>& community,
                    std::uint32_t comm_count) {
  WorkGraph out;
  out.n = comm_count;
  out.self_loop.assign(comm_count, 0);
  out.degree.assign(comm_count, 0);
  out.total_weight = g.total_weight;

  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;  // (key, weight)
  for (std::uint32_t u = 0; u < g.n; ++u) {
    const std::uint32_t cu = community[u];
    out.self_loop[cu] += g.self_loop[u];
    for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      const std::uint32_t v = g.neighbors[i];
      if (v < u) continue;  // each undirected edge once; v == u impossible here
      const std::uint32_t cv = community[v];
      if (cu == cv) {
        out.self_loop[cu] += g.weights[i];
      } else {
        const std::uint64_t a = std::min(cu, cv), b = std::max(cu, cv);
        edges.emplace_back((a << 32) | b, g.weights[i]);
      }
    }
  }
  std::sort(edges.begin(), edges.end());

  std::vector<std::pair<std::uint64_t, std::uint64_t>> merged;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    std::uint64_t w = 0;
    while (j < edges.size() && edges[j].first == edges[i].first) w += edges[j++].second;
    merged.emplace_back(edges[i].first, w);
    i = j;
  }

  out.offsets.assign(comm_count + 1, 0);
  for (const auto& [key, w] : merged) {
    ++out.offsets[(key >> 32) + 1];
    ++out.offsets[(key & 0xFFFFFFFFu) + 1];
  }
  for (std::uint32_t c = 0; c < comm_count; ++c) out.offsets[c + 1] += out.offsets[c];
  out.neighbors.resize(merged.size() * 2);
  out.weights.resize(merged.size() * 2);
  std::vector<std::uint64_t> pos(out.offsets.begin(), out.offsets.end() - 1);
  for (const auto& [key, w] : merged) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    out.neighbors[pos[a]] = b;
    out.weights[pos[a]++] = w;
    out.neighbors[pos[b]] = a;
    out.weights[pos[b]++] = w;
  }
  for (std::uint32_t c = 0; c < comm_count; ++c) {
    std::uint64_t d = 2 * out.self_loop[c];
    for (std::size_t i = out.offsets[c]; i < out.offsets[c + 1]; ++i) {
      d += out.weights[i];
    }
    out.degree[c] = d;
  }
  return out;
}

double work_modularity(const WorkGraph& g, const std::vector<std::uint32_t>& community,
                       std::uint32_t comm_count, double resolution) {
  const double w_total = static_cast<double>(g.total_weight);
  std::vector<std::uint64_t> intra(comm_count, 0), degree(comm_count, 0);
  for (std::uint32_t u = 0; u < g.n; ++u) {
    const std::uint32_t cu = community[u];
    degree[cu] += g.degree[u];
    intra[cu] += g.self_loop[u];
    for (std::size_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      const std::uint32_t v = g.neighbors[i];
      if (v <= u) continue;
      if (community[v] == cu) intra[cu] += g.weights[i];
    }
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < comm_count; ++c) {
    const double frac = static_cast<double>(degree[c]) / (2.0 * w_total);
    q += static_cast<double>(intra[c]) / w_total - resolution * frac * frac;
  }
  return q;
}

constexpr double kMinGain = 1e-7;

}  // namespace

PartitionAssignment louvain_partition(const UndirectedView& view,
                                      double resolution, std::uint64_t rng_seed) {
  PartitionAssignment result;
  result.community_of.resize(view.n);
  for (std::uint32_t u = 0; u < view.n; ++u) result.community_of[u] = u;
  result.community_count = view.n;
  if (view.n == 0 || view.total_edge_weight == 0) {
    renumber(result.community_of, result.community_count);
    return result;
  }

  Rng rng = substream(rng_seed, "louvain");
  WorkGraph work = from_view(view);

  // node_to_comm maps original entities through all aggregation levels.
  std::vector<std::uint32_t> node_to_comm(view.n);
  for (std::uint32_t u = 0; u < view.n; ++u) node_to_comm[u] = u;

  std::vector<std::uint32_t> community(work.n);
  for (std::uint32_t u = 0; u < work.n; ++u) community[u] = u;
  double prev_q = work_modularity(work, community, work.n, resolution);

  for (;;) {
    for (std::uint32_t u = 0; u < work.n; ++u) community[u] = u;
    const std::uint64_t moves = local_phase(work, resolution, rng, community);
    std::uint32_t comm_count = 0;
    renumber(community, comm_count);
    const double q = work_modularity(work, community, comm_count, resolution);
    if (moves == 0 || q - prev_q < kMinGain) {
      if (q > prev_q) {  // keep the final improving phase
        for (auto& c : node_to_comm) c = community[c];
      }
      break;
    }
    prev_q = q;
    for (auto& c : node_to_comm) c = community[c];
    work = aggregate(work, community, comm_count);
    community.assign(work.n, 0);
  }

  result.community_of = node_to_comm;
  renumber(result.community_of, result.community_count);
  return result;
}

}  // namespace kgaudit
