#pragma once

#include "tenet/color.hpp"

#include <cstddef>
#include <vector>

namespace tenet {

/// Undirected vertex-colored simple graph.
struct ColoredGraph {
  std::vector<Color> colors;
  std::vector<std::vector<int>> adj;

  int add_vertex(Color c) {
    colors.push_back(c);
    adj.emplace_back();
    return static_cast<int>(colors.size()) - 1;
  }
  void add_edge(int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::size_t size() const { return colors.size(); }
};

using Permutation = std::vector<int>;

struct Labeling {
  /// canonical position of each vertex
  std::vector<int> label;
  /// vertex at each canonical position
  std::vector<int> order;
  /// generators of the color-preserving automorphism group (vertex -> image)
  std::vector<Permutation> generators;
  /// colors and sorted adjacency in canonical order; equal iff the graphs are isomorphic
  std::vector<std::uint64_t> certificate;
  std::size_t nodes = 0;
};

/// Individualization-refinement canonical labeling with automorphism pruning.
Labeling canonical_labeling(const ColoredGraph& g);

/// Orbits of the group generated by `gens`, as a representative per vertex (smallest member).
std::vector<int> orbits(std::size_t n, const std::vector<Permutation>& gens);

}  // namespace tenet
