#pragma once

#include "tenet/expr.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tenet {

enum class IndexRole { batching, contracted, free };

/// Role of every index of a binary product; the target layout decides what is summed.
std::map<Index, IndexRole> classify_indices(const std::vector<Index>& left, const std::vector<Index>& right,
                                            const std::vector<Index>& target);

struct NodeIdentity {
  std::uint64_t id = 0;
  /// expression = phase * (canonical value laid out as `layout`)
  int phase = 1;
  std::vector<Index> layout;
  /// canonical rank of each factor, in input order
  std::vector<int> factor_rank;
};

/// Identity of a network whose `keep` indices are visible outside; externals are anonymous.
NodeIdentity network_identity(const std::vector<ExprHandle>& factors, const std::set<Index>& keep,
                              const IndexSpaceRegistry* reg = nullptr);
/// Tensor/product -> network identity over its external indices; sums and scalars combine sorted children.
NodeIdentity canonical_identity(const ExprHandle& e, const IndexSpaceRegistry* reg = nullptr);

enum class IRKind { leaf, sum, product, permute, scale };

struct IRNode;
using IRPtr = std::shared_ptr<IRNode>;

struct IRNode {
  IRKind kind = IRKind::leaf;
  std::vector<IRPtr> children;
  /// represented sub-expression (leaf atom, product of the covered factors, ...)
  ExprHandle expr;
  std::uint64_t identity = 0;
  /// expr = phase * value; only product and leaf nodes carry a phase
  int phase = 1;
  std::vector<Index> layout;
  /// multiply-add count of this node alone
  double flops = 0;
  /// scale factor (scale nodes)
  Scalar factor{1};
  /// shared-intermediate tag, -1 if not shared
  int reuse = -1;
};

using Extents = std::function<std::size_t(const IndexSpace&)>;
Extents registry_extents(const IndexSpaceRegistry& reg);

/// Optimal full-binary product tree for one term (scalar factors included) by dynamic programming.
/// `keep` defaults to the external indices of the term.
IRPtr binarize_tnco(const ExprHandle& term, const Extents& extents, const IndexSpaceRegistry* reg = nullptr,
                    const std::optional<std::set<Index>>& keep = std::nullopt);

/// Total multiply-add count of a tree.
double total_flops(const IRNode& n);

struct Plan {
  std::vector<IRPtr> roots;  // one tree per planned expression
  /// identity -> evaluations needed at run time when shared results are reused
  std::map<std::uint64_t, int> uses;
  int shared = 0;
};

/// Lower an expression: each term planned by TNCO, summed into a binary chain, and permuted to `target`
/// (sorted external indices if omitted).
IRPtr lower(const ExprHandle& e, const Extents& extents, const IndexSpaceRegistry* reg = nullptr,
            const std::optional<std::vector<Index>>& target = std::nullopt);

/// Tag nodes with equal identity across the forest and count run-time uses.
Plan mark_cse(std::vector<IRPtr> roots);

/// Factor the largest common subnetwork out of two product terms: common * (rest_a + c * rest_b).
std::optional<ExprHandle> fuse(const ExprHandle& a, const ExprHandle& b, const IndexSpaceRegistry* reg = nullptr);

/// JSON dump: nodes with kind, identity (hex), layout, flops, reuse tag.
std::string plan_json(const Plan& p, const IndexSpaceRegistry& reg);

std::string hex_identity(std::uint64_t id);

}  // namespace tenet
