#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kgaudit/graph.hpp"

namespace kgaudit {

struct PprConfig {
  double alpha = 0.15;        // teleport probability
  double epsilon = 1e-7;      // push tolerance (per unit of degree)
  int max_iter_exact = 10'000;
  double oracle_tol = 1e-12;  // L1 convergence tolerance for the exact solver
};

// Sparse personalized-pagerank vector. Entries hold the nonzero scores;
// residual_mass is the total unpushed residual (0 for the exact solver).
struct PprVector {
  EntityId source = 0;
  std::vector<std::pair<EntityId, double>> entries;  // sorted by entity id
  double residual_mass = 0.0;

  double value(EntityId e) const;
  double sum() const;
};

// (1 - alpha)^k, the decay weight of a length-k walk.
double walk_weight(int k, double alpha);

// Dense fixed point of p = alpha * x_s + (1 - alpha) * p^T W by power
// iteration, converged to cfg.oracle_tol in L1. Dangling (degree-0) nodes
// teleport back to the source, so the result is a probability distribution.
// Throws ConvergenceError if max_iter_exact is exhausted.
PprVector exact_ppr(const UndirectedView& view, EntityId source,
                    const PprConfig& cfg = {});

// Local-push approximation (estimate/residual pairs, highest scaled residual
// first). Terminates when every residual is below epsilon * degree, which
// bounds the per-node underestimate by epsilon * degree(v).
PprVector approx_ppr(const UndirectedView& view, EntityId source,
                     const PprConfig& cfg = {});

}  // namespace kgaudit
