#pragma once

#include "tenet/expr.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace tenet {

/// Result of contracting one creator/annihilator pair.
struct Contraction {
  int sign = 1;
  std::vector<ExprHandle> factors;  // δ and s tensors
};

/// Contract `left` (earlier in the product) with `right`; nullopt if the contraction vanishes.
/// Fresh dummies for δ/s chains are drawn from `dummies`.
std::optional<Contraction> contract_pair(const Index& left, bool left_creator, const Index& right, bool right_creator,
                                         Vacuum vacuum, const IndexSpaceRegistry& reg, DummySession& dummies);

/// n! m! / ((n-k)! (m-k)! k!)
Rational degeneracy_factor(int n, int m, int k);

struct WickOptions {
  Vacuum vacuum = Vacuum::fermi;
  bool full_contractions = false;
  /// pairs of operator ordinals (0-based, order of appearance) that must be connected
  std::vector<std::pair<int, int>> connectivity;
  bool topology = true;
  bool use_connectivity = true;
  bool dead_end = true;
  unsigned threads = 1;
  const IndexSpaceRegistry* registry = nullptr;
};

struct WickStats {
  std::size_t nodes = 0;
  std::size_t terms = 0;
};

/// Wick's theorem on a product (or on each term of a sum).
ExprHandle wick(const ExprHandle& e, const WickOptions& opts, WickStats* stats = nullptr);

/// Replace δ factors with index substitutions until nothing changes.
ExprHandle reduce(const ExprHandle& e, const IndexSpaceRegistry* reg = nullptr);

/// wick -> reduce -> simplify
ExprHandle wick_full_pipeline(const ExprHandle& e, const WickOptions& opts, WickStats* stats = nullptr);

}  // namespace tenet
