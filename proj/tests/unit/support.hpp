#pragma once

#include "tenet/canonicalize.hpp"
#include "tenet/interp.hpp"
#include "tenet/ir.hpp"
#include "tenet/parser.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace tenet::testing {

/// Registry with the default vocabulary (i, a, p) and small extents.
IndexSpaceRegistry small_registry(std::size_t nocc, std::size_t nvirt);

/// Deterministic pseudo-random tensor data over all orbitals, with each label's symmetry imposed.
/// δ and s are the identity. Orbitals are positions in the concatenation of the base spaces.
class LeafStore {
 public:
  LeafStore(const IndexSpaceRegistry& reg, std::uint64_t seed = 1) : reg_(reg), seed_(seed) {}

  /// value at global orbital positions, slots in bra, ket, aux order (empty slots skipped)
  double value(const Tensor& t, const std::vector<std::size_t>& orbitals) const;
  double variable(const std::string& name) const;
  /// blocks for the interpreter
  LeafEvaluator leaves() const;

  const IndexSpaceRegistry& registry() const { return reg_; }

 private:
  double raw(const std::string& label, const std::vector<std::size_t>& orbitals) const;
  const IndexSpaceRegistry& reg_;
  std::uint64_t seed_;
};

/// Brute-force sum over every index assignment; result modes follow `target`.
Result naive_evaluate(const ExprHandle& e, const std::vector<Index>& target, const LeafStore& store);

/// Minimum cost over every sequence of pairwise merges (product of extents of the merged index union).
double exhaustive_flops(const std::vector<std::set<Index>>& factors, const std::set<Index>& keep, const Extents& ext);

/// Number of sets of k disjoint pairs between n left and m right items, by enumeration.
std::size_t count_matchings(int n, int m, int k);

/// Random covariant product term over tensors of mixed symmetry with i and a indices. With `extras`,
/// aux-slot tensors (shared aux indices make the network noncovariant) and protoindexed a indices appear.
ExprHandle random_term(std::mt19937& rng, int nfactors, const IndexSpaceRegistry& reg, bool extras = false);

/// Same network in another presentation: factors shuffled, dummies renamed, slots of symmetric bundles
/// permuted (sign folded into the coefficient).
ExprHandle scramble(const ExprHandle& term, std::mt19937& rng, const IndexSpaceRegistry& reg);

/// Dense operator on the Fock space of all orbitals, rows = output occupation bitmask.
using FockMatrix = std::vector<double>;

/// Fock-space value of an expression with operators, for fixed values of `fixed` indices.
/// Every other index is summed over its space. Occupied base orbitals are filled in the Fermi vacuum.
class FockOracle {
 public:
  FockOracle(const LeafStore& store) : store_(store) {}
  std::size_t norbitals() const;
  FockMatrix evaluate(const ExprHandle& e, const std::map<Index, std::size_t>& fixed) const;

 private:
  const LeafStore& store_;
};

/// Compare the Fock-space value of `a` and `b` for every assignment of `externals`; returns max deviation.
double fock_deviation(const ExprHandle& a, const ExprHandle& b, const std::set<Index>& externals, const LeafStore& store);

}  // namespace tenet::testing
