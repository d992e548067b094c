#pragma once

#include "tenet/expr.hpp"
#include "tenet/labeling.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tenet {

class CovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product of Tensor / NormalOperator atoms with a set of fixed (named) indices.
struct TensorNetwork {
  std::vector<ExprHandle> factors;
  std::set<Index> named;
};

/// Indices occupying exactly one slot, plus indices that only appear as protoindices.
std::set<Index> external_indices(const std::vector<ExprHandle>& factors);

enum class VertexKind { core, braket, bra, ket, aux, column, slot, index, proto, extra };

struct GraphVertex {
  VertexKind kind = VertexKind::extra;
  Color color = 0;
  int factor = -1;
  BundleKind bundle = BundleKind::bra;
  int position = -1;
  Index index;
};

struct FactorVertices {
  int core = -1, braket = -1, bra = -1, ket = -1, aux = -1;
  std::vector<int> columns;
  // one entry per slot; -1 for empty slots
  std::vector<int> bra_slots, ket_slots, aux_slots;
};

struct TensorNetworkGraph {
  std::vector<GraphVertex> vertices;
  std::vector<std::pair<int, int>> edges;
  std::vector<FactorVertices> factors;
  std::map<Index, int> index_vertex;

  int add_vertex(VertexKind kind, Color c);
  void add_edge(int a, int b) { edges.emplace_back(a, b); }
  ColoredGraph colored() const;
  /// vertex label = kind:color-hex
  std::string dot() const;
};

struct GraphOptions {
  /// color named indices by space only (IR identity mode)
  bool anonymous_named = false;
  /// add ordering gadgets between operators that do not commute
  bool order_gadgets = true;
  /// extra shading of slot vertices (Wick bookkeeping)
  std::function<Color(int factor, BundleKind bundle, int position)> slot_salt;
  const IndexSpaceRegistry* registry = nullptr;
};

TensorNetworkGraph build_graph(const TensorNetwork& tn, const GraphOptions& opts = {});

/// True if some Wick contraction exists between a slot of `left` and a later slot of `right`.
bool can_contract(const NormalOperator& left, const NormalOperator& right, const IndexSpaceRegistry& reg);
bool ops_commute(const NormalOperator& a, const NormalOperator& b, const IndexSpaceRegistry& reg);

struct CanonicalizeOptions {
  bool anonymous_named = false;
  const IndexSpaceRegistry* registry = nullptr;
};

struct CanonicalizationResult {
  std::vector<ExprHandle> factors;
  ExprHandle canonical;
  int phase = 1;
  /// an odd automorphism exists, so the network vanishes
  bool zero = false;
  std::map<Index, Index> dummy_map;
  std::vector<Permutation> aut_generators;
  /// named indices in canonical order
  std::vector<Index> named_order;
  /// canonical label of each input factor's core vertex
  std::vector<int> factor_rank;
  std::uint64_t identity = 0;
};

CanonicalizationResult canonicalize_network(const TensorNetwork& tn, const CanonicalizeOptions& opts = {});

struct EquivalentGroups {
  /// orbits of (factor, bundle, position) slots
  std::vector<std::vector<std::tuple<int, BundleKind, int>>> slots;
  std::vector<std::vector<int>> factors;
};
EquivalentGroups equivalent_groups(const TensorNetwork& tn, const IndexSpaceRegistry* reg = nullptr);

/// Sign of an automorphism acting on antisymmetric bundles and odd operators.
int automorphism_phase(const TensorNetworkGraph& g, const std::vector<ExprHandle>& factors, const Permutation& p);

/// Commuting factors sorted by (label rank, text), operators last, dummies renamed again.
/// Accumulates the sign of any bundle re-sorting into `phase`.
/// `label_rank` lists tensor labels in preferred order; unlisted labels follow alphabetically.
std::vector<ExprHandle> lexicographic_post_sort(const std::vector<ExprHandle>& factors, const std::set<Index>& named,
                                                int& phase, const std::vector<std::string>& label_rank = {});

struct CanonicalTerm {
  Scalar coefficient;
  std::vector<ExprHandle> factors;  // variables first, then the network
  bool zero = false;
};
/// Canonical form of one product term (named indices derived from occurrence counts).
CanonicalTerm canonicalize_term(const ExprHandle& term, bool lexicographic, const IndexSpaceRegistry& reg,
                                const std::vector<std::string>& label_rank = {});

}  // namespace tenet
