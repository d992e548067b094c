#include "tenet/labeling.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace tenet {

namespace {

// ordered partition: lab holds vertices grouped by cell, cells identified by their start
struct Partition {
  std::vector<int> lab;
  std::vector<int> pos;       // vertex -> position in lab
  std::vector<int> cell;      // vertex -> cell start
  std::vector<int> cell_end;  // cell start -> one past end (valid at cell starts only)
  int ncells = 0;

  bool discrete() const { return ncells == static_cast<int>(lab.size()); }
  int size_of(int start) const { return cell_end[start] - start; }
};

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      p[b] = a;
    else
      p[a] = b;
  }
};

class Search {
 public:
  explicit Search(const ColoredGraph& g) : g_(g), n_(static_cast<int>(g.size())), cnt_(n_, 0) {}

  Labeling run() {
    Partition p = initial();
    std::vector<int> queue;
    for (int s = 0; s < n_; s = p.cell_end[s]) queue.push_back(s);
    refine(p, queue);
    std::vector<int> path;
    dfs(p, path);

    Labeling out;
    out.order = best_lab_;
    out.label.assign(n_, 0);
    for (int k = 0; k < n_; ++k) out.label[best_lab_[k]] = k;
    out.generators = std::move(gens_);
    out.certificate.reserve(best_cert_.size() + n_);
    for (int k = 0; k < n_; ++k) out.certificate.push_back(g_.colors[best_lab_[k]]);
    out.certificate.insert(out.certificate.end(), best_cert_.begin(), best_cert_.end());
    out.nodes = nodes_;
    return out;
  }

 private:
  const ColoredGraph& g_;
  int n_;
  std::vector<int> cnt_;
  std::vector<int> first_lab_, best_lab_;
  std::vector<std::uint64_t> first_cert_, best_cert_;
  std::vector<int> first_path_;
  std::vector<Permutation> gens_;
  bool have_first_ = false;
  int backjump_ = -1;  // unwind until this level
  std::size_t nodes_ = 0;

  Partition initial() const {
    Partition p;
    p.lab.resize(n_);
    std::iota(p.lab.begin(), p.lab.end(), 0);
    std::stable_sort(p.lab.begin(), p.lab.end(), [&](int a, int b) { return g_.colors[a] < g_.colors[b]; });
    p.pos.resize(n_);
    p.cell.resize(n_);
    p.cell_end.assign(n_, 0);
    int start = 0;
    for (int k = 0; k < n_; ++k) {
      p.pos[p.lab[k]] = k;
      if (k > 0 && g_.colors[p.lab[k]] != g_.colors[p.lab[k - 1]]) {
        p.cell_end[start] = k;
        start = k;
        ++p.ncells;
      }
      p.cell[p.lab[k]] = start;
    }
    if (n_ > 0) {
      p.cell_end[start] = n_;
      ++p.ncells;
    }
    return p;
  }

  // equitable refinement driven by a queue of splitter cells
  void refine(Partition& p, std::vector<int>& queue) {
    std::vector<char> in_queue(n_, 0);
    for (int s : queue) in_queue[s] = 1;
    std::vector<int> touched, cells;
    std::size_t head = 0;
    while (head < queue.size() && !p.discrete()) {
      const int w = queue[head++];
      in_queue[w] = 0;
      touched.clear();
      for (int k = w; k < p.cell_end[w]; ++k) {
        for (int u : g_.adj[p.lab[k]]) {
          if (cnt_[u]++ == 0) touched.push_back(u);
        }
      }
      cells.clear();
      for (int u : touched) cells.push_back(p.cell[u]);
      std::sort(cells.begin(), cells.end());
      cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
      for (int c : cells) {
        const int end = p.cell_end[c];
        if (end - c == 1) continue;
        auto first = p.lab.begin() + c, last = p.lab.begin() + end;
        std::stable_sort(first, last, [&](int a, int b) { return cnt_[a] < cnt_[b]; });
        if (cnt_[p.lab[c]] == cnt_[p.lab[end - 1]]) continue;
        const bool was_queued = in_queue[c];
        int s = c;
        for (int k = c; k < end; ++k) {
          const int v = p.lab[k];
          p.pos[v] = k;
          if (k > c && cnt_[v] != cnt_[p.lab[k - 1]]) {
            p.cell_end[s] = k;
            s = k;
            ++p.ncells;
            if (!in_queue[s]) {
              in_queue[s] = 1;
              queue.push_back(s);
            }
          }
          p.cell[v] = s;
        }
        p.cell_end[s] = end;
        if (!was_queued && !in_queue[c]) {
          in_queue[c] = 1;
          queue.push_back(c);
        }
      }
      for (int u : touched) cnt_[u] = 0;
    }
  }

  void individualize(Partition& p, int v) {
    const int c = p.cell[v];
    const int end = p.cell_end[c];
    const int k = p.pos[v];
    std::swap(p.lab[c], p.lab[k]);
    p.pos[p.lab[k]] = k;
    p.pos[v] = c;
    p.cell_end[c] = c + 1;
    p.cell_end[c + 1] = end;
    for (int j = c + 1; j < end; ++j) p.cell[p.lab[j]] = c + 1;
    ++p.ncells;
    std::vector<int> queue{c};
    refine(p, queue);
  }

  std::vector<std::uint64_t> certificate(const std::vector<int>& lab) const {
    std::vector<int> inv(n_);
    for (int k = 0; k < n_; ++k) inv[lab[k]] = k;
    std::vector<std::uint64_t> cert;
    std::vector<int> nb;
    for (int k = 0; k < n_; ++k) {
      nb.clear();
      for (int u : g_.adj[lab[k]]) nb.push_back(inv[u]);
      std::sort(nb.begin(), nb.end());
      cert.push_back(nb.size());
      cert.insert(cert.end(), nb.begin(), nb.end());
    }
    return cert;
  }

  Permutation mapping(const std::vector<int>& from, const std::vector<int>& to) const {
    Permutation g(n_);
    for (int k = 0; k < n_; ++k) g[from[k]] = to[k];
    return g;
  }

  void leaf(const Partition& p, const std::vector<int>& path) {
    auto cert = certificate(p.lab);
    if (!have_first_) {
      have_first_ = true;
      first_lab_ = best_lab_ = p.lab;
      first_cert_ = best_cert_ = std::move(cert);
      first_path_ = path;
      return;
    }
    if (cert == first_cert_) {
      gens_.push_back(mapping(first_lab_, p.lab));
      int d = 0;
      while (d < static_cast<int>(path.size()) && d < static_cast<int>(first_path_.size()) &&
             path[d] == first_path_[d])
        ++d;
      backjump_ = d;
      return;
    }
    if (cert == best_cert_) {
      gens_.push_back(mapping(best_lab_, p.lab));
      return;
    }
    if (cert < best_cert_) {
      best_cert_ = std::move(cert);
      best_lab_ = p.lab;
    }
  }

  // orbit representatives of the subgroup fixing `prefix` pointwise
  std::vector<int> stabilizer_orbits(const std::vector<int>& prefix) const {
    UnionFind uf(n_);
    for (const auto& g : gens_) {
      bool fixes = true;
      for (int v : prefix)
        if (g[v] != v) {
          fixes = false;
          break;
        }
      if (!fixes) continue;
      for (int v = 0; v < n_; ++v) uf.unite(v, g[v]);
    }
    std::vector<int> rep(n_);
    for (int v = 0; v < n_; ++v) rep[v] = uf.find(v);
    return rep;
  }

  void dfs(const Partition& p, std::vector<int>& path) {
    ++nodes_;
    if (p.discrete()) {
      leaf(p, path);
      return;
    }
    int target = -1;
    for (int s = 0; s < n_; s = p.cell_end[s]) {
      if (p.size_of(s) > 1) {
        target = s;
        break;
      }
    }
    std::vector<int> children(p.lab.begin() + target, p.lab.begin() + p.cell_end[target]);
    std::sort(children.begin(), children.end());
    const int level = static_cast<int>(path.size());
    std::vector<int> done;
    std::size_t ngens = static_cast<std::size_t>(-1);
    std::vector<int> rep;
    for (int v : children) {
      if (!done.empty()) {
        if (gens_.size() != ngens) {
          rep = stabilizer_orbits(path);
          ngens = gens_.size();
        }
        bool seen = false;
        for (int u : done)
          if (rep[u] == rep[v]) {
            seen = true;
            break;
          }
        if (seen) continue;
      }
      Partition q = p;
      individualize(q, v);
      path.push_back(v);
      dfs(q, path);
      path.pop_back();
      done.push_back(v);
      if (backjump_ >= 0) {
        if (backjump_ < level) return;
        backjump_ = -1;
      }
    }
  }
};

}  // namespace

Labeling canonical_labeling(const ColoredGraph& g) {
  if (g.size() == 0) return {};
  return Search(g).run();
}

std::vector<int> orbits(std::size_t n, const std::vector<Permutation>& gens) {
  UnionFind uf(n);
  for (const auto& g : gens)
    for (std::size_t v = 0; v < n; ++v) uf.unite(static_cast<int>(v), g[v]);
  std::vector<int> rep(n);
  for (std::size_t v = 0; v < n; ++v) rep[v] = uf.find(static_cast<int>(v));
  return rep;
}

}  // namespace tenet
