#pragma once

#include "tenet/wick.hpp"

#include <vector>

namespace tenet::cli {

struct CCOptions {
  int max_rank = 2;
  bool topology = true;
  bool use_connectivity = true;
  const IndexSpaceRegistry* registry = nullptr;
};

struct CCResult {
  /// residual per projection rank 0..max_rank (rank 0 = energy)
  std::vector<ExprHandle> residuals;
  WickStats stats;
  double seconds = 0;
};

/// Normal-ordered one- plus two-body Hamiltonian f{p_1;p_2} ã{p_2;p_1} + 1/4 ḡ{..}:A ã{..}.
ExprHandle cc_hamiltonian(const IndexSpaceRegistry& reg);

/// Coupled-cluster amplitude equations <rank| H exp(T) |0>_connected for T = T_1 + ... + T_max_rank.
CCResult derive_cc(const CCOptions& opts);

}  // namespace tenet::cli
