#include "tenet/canonicalize.hpp"
#include "tenet/parser.hpp"

#include <algorithm>
#include <numeric>

namespace tenet {

namespace {

bool is_op(const ExprHandle& f) { return f->is(ExprKind::normal_operator); }

bool antisymmetric(const ExprHandle& f) {
  return is_op(f) || (f->is(ExprKind::tensor) && f->tensor().symmetry == Symmetry::antisymm);
}

int inversion_parity(const std::vector<int>& seq) {
  int n = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++n;
  return n % 2 ? -1 : 1;
}

void named_closure(const Index& i, std::set<Index>& out) {
  out.insert(i);
  for (const auto& p : i.proto()) named_closure(p, out);
}

struct Slots {
  std::vector<Index> bra, ket, aux;
};

Slots slots_of(const ExprHandle& f) {
  if (is_op(f)) return {f->op().annihilators, f->op().creators, {}};
  const auto& t = f->tensor();
  return {t.bra, t.ket, t.aux};
}

ExprHandle rebuild(const ExprHandle& f, Slots s) {
  if (is_op(f)) {
    NormalOperator op = f->op();
    op.annihilators = std::move(s.bra);
    op.creators = std::move(s.ket);
    return make_operator(std::move(op));
  }
  Tensor t = f->tensor();
  t.bra = std::move(s.bra);
  t.ket = std::move(s.ket);
  t.aux = std::move(s.aux);
  return make_tensor(std::move(t));
}

// sort the non-empty slots of a bundle by key; returns the permutation sign
template <class Key>
int sort_bundle(std::vector<Index>& idx, std::vector<int>* verts, Key key) {
  std::vector<int> pos;
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (!idx[k].is_null()) pos.push_back(static_cast<int>(k));
  std::vector<int> perm(pos.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return key(pos[a]) < key(pos[b]); });
  auto old_idx = idx;
  std::vector<int> old_v = verts ? *verts : std::vector<int>{};
  for (std::size_t k = 0; k < pos.size(); ++k) {
    idx[pos[k]] = old_idx[pos[perm[k]]];
    if (verts) (*verts)[pos[k]] = old_v[pos[perm[k]]];
  }
  return inversion_parity(perm);
}

Index rename_index(const Index& i, const std::set<Index>& named, DummySession& ses, std::map<Index, Index>& m) {
  if (i.is_null() || named.count(i)) return i;
  auto it = m.find(i);
  if (it != m.end()) return it->second;
  std::vector<Index> proto;
  for (const auto& p : i.proto()) proto.push_back(rename_index(p, named, ses, m));
  Index r = ses.next_dummy(i.space(), std::move(proto));
  m.emplace(i, r);
  return r;
}

std::vector<ExprHandle> rename_dummies(const std::vector<ExprHandle>& factors, const std::set<Index>& named,
                                       std::map<Index, Index>& m) {
  DummySession ses;
  for (const auto& n : named) ses.reserve(n);
  std::vector<Slots> all;
  for (const auto& f : factors) {
    Slots s = slots_of(f);
    for (auto* b : {&s.bra, &s.ket, &s.aux})
      for (auto& i : *b) i = rename_index(i, named, ses, m);
    all.push_back(std::move(s));
  }
  std::vector<ExprHandle> out;
  for (std::size_t k = 0; k < factors.size(); ++k) out.push_back(rebuild(factors[k], std::move(all[k])));
  return out;
}

std::uint64_t certificate_hash(const std::vector<std::uint64_t>& cert) {
  Color h = color(static_cast<std::uint64_t>(cert.size()));
  for (auto x : cert) h = ccolor(color(x), h);
  return h;
}

}  // namespace

int automorphism_phase(const TensorNetworkGraph& g, const std::vector<ExprHandle>& factors, const Permutation& p) {
  int sign = 1;
  std::vector<int> odd;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (is_op(factors[f]) && factors[f]->op().rank() % 2) odd.push_back(static_cast<int>(f));
    if (!antisymmetric(factors[f])) continue;
    for (const auto* slots : {&g.factors[f].bra_slots, &g.factors[f].ket_slots}) {
      std::vector<int> img;
      for (int s : *slots)
        if (s >= 0) img.push_back(g.vertices[p[s]].position);
      sign *= inversion_parity(img);
    }
  }
  std::vector<int> img;
  for (int f : odd) img.push_back(g.vertices[p[g.factors[f].core]].factor);
  sign *= inversion_parity(img);
  return sign;
}

CanonicalizationResult canonicalize_network(const TensorNetwork& tn, const CanonicalizeOptions& opts) {
  const IndexSpaceRegistry& reg = opts.registry ? *opts.registry : default_registry();
  CanonicalizationResult res;
  const auto& F = tn.factors;
  const std::size_t n = F.size();
  if (n == 0) {
    res.canonical = constant(1);
    return res;
  }

  TensorNetwork net{F, {}};
  for (const auto& i : tn.named) named_closure(i, net.named);
  GraphOptions go;
  go.anonymous_named = opts.anonymous_named;
  go.registry = &reg;
  const auto g = build_graph(net, go);
  auto lab = canonical_labeling(g.colored());
  const auto& L = lab.label;
  res.identity = certificate_hash(lab.certificate);
  if (!opts.anonymous_named) {
    for (const auto& gen : lab.generators)
      if (automorphism_phase(g, F, gen) < 0) res.zero = true;
  }
  res.aut_generators = std::move(lab.generators);
  for (std::size_t f = 0; f < n; ++f) res.factor_rank.push_back(L[g.factors[f].core]);

  // factor order: smallest canonical core first, non-commuting operators keep their order
  std::vector<std::vector<int>> pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_op(F[i])) continue;
    for (std::size_t j = i + 1; j < n; ++j)
      if (is_op(F[j]) && !ops_commute(F[i]->op(), F[j]->op(), reg)) pred[j].push_back(static_cast<int>(i));
  }
  std::vector<int> order;
  std::vector<char> placed(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    int pick = -1;
    for (std::size_t f = 0; f < n; ++f) {
      if (placed[f]) continue;
      bool ready = std::all_of(pred[f].begin(), pred[f].end(), [&](int q) { return placed[q]; });
      if (ready && (pick < 0 || L[g.factors[f].core] < L[g.factors[pick].core])) pick = static_cast<int>(f);
    }
    placed[pick] = 1;
    order.push_back(pick);
  }
  int phase = 1;
  {
    std::vector<int> odd_new;
    for (int f : order)
      if (is_op(F[f]) && F[f]->op().rank() % 2) odd_new.push_back(f);
    phase *= inversion_parity(odd_new);
  }

  // slot order within each factor
  std::vector<ExprHandle> sorted;
  for (int f : order) {
    Slots s = slots_of(F[f]);
    auto fv = g.factors[f];
    auto by_label = [&](const std::vector<int>& verts) {
      return [&L, &verts](int k) { return L[verts[k]]; };
    };
    if (is_op(F[f])) {
      phase *= sort_bundle(s.bra, &fv.bra_slots, by_label(fv.bra_slots));
      phase *= sort_bundle(s.ket, &fv.ket_slots, by_label(fv.ket_slots));
    } else {
      const auto& t = F[f]->tensor();
      if (t.braket_symmetry == BraKetSymmetry::symm && L[fv.ket] < L[fv.bra]) {
        std::swap(s.bra, s.ket);
        std::swap(fv.bra_slots, fv.ket_slots);
      }
      if (t.symmetry == Symmetry::nonsymm) {
        if (t.column_symmetry == ColumnSymmetry::symm && !fv.columns.empty()) {
          std::vector<int> cols(fv.columns.size());
          std::iota(cols.begin(), cols.end(), 0);
          std::stable_sort(cols.begin(), cols.end(),
                           [&](int a, int b) { return L[fv.columns[a]] < L[fv.columns[b]]; });
          Slots r = s;
          for (std::size_t k = 0; k < cols.size(); ++k) {
            r.bra[k] = s.bra[cols[k]];
            r.ket[k] = s.ket[cols[k]];
          }
          s = std::move(r);
        }
      } else {
        int sb = sort_bundle(s.bra, &fv.bra_slots, by_label(fv.bra_slots));
        int sk = sort_bundle(s.ket, &fv.ket_slots, by_label(fv.ket_slots));
        if (t.symmetry == Symmetry::antisymm) phase *= sb * sk;
      }
    }
    sorted.push_back(rebuild(F[f], std::move(s)));
  }

  res.factors = rename_dummies(sorted, net.named, res.dummy_map);
  res.phase = phase;
  res.canonical = product(Scalar(1), res.factors);
  for (const auto& i : net.named)
    if (g.index_vertex.count(i)) res.named_order.push_back(i);
  std::sort(res.named_order.begin(), res.named_order.end(),
            [&](const Index& a, const Index& b) { return L[g.index_vertex.at(a)] < L[g.index_vertex.at(b)]; });
  return res;
}

EquivalentGroups equivalent_groups(const TensorNetwork& tn, const IndexSpaceRegistry* reg) {
  GraphOptions go;
  go.registry = reg;
  TensorNetwork net{tn.factors, {}};
  for (const auto& i : tn.named) named_closure(i, net.named);
  const auto g = build_graph(net, go);
  const auto lab = canonical_labeling(g.colored());
  const auto rep = orbits(g.vertices.size(), lab.generators);
  EquivalentGroups out;
  std::map<int, std::size_t> slot_group, factor_group;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& gv = g.vertices[v];
    if (gv.kind == VertexKind::slot) {
      auto [it, fresh] = slot_group.emplace(rep[v], out.slots.size());
      if (fresh) out.slots.emplace_back();
      out.slots[it->second].emplace_back(gv.factor, gv.bundle, gv.position);
    } else if (gv.kind == VertexKind::core) {
      auto [it, fresh] = factor_group.emplace(rep[v], out.factors.size());
      if (fresh) out.factors.emplace_back();
      out.factors[it->second].push_back(gv.factor);
    }
  }
  return out;
}

std::vector<ExprHandle> lexicographic_post_sort(const std::vector<ExprHandle>& factors, const std::set<Index>& named,
                                                int& phase, const std::vector<std::string>& label_rank) {
  auto rank = [&](const ExprHandle& f) -> std::size_t {
    auto it = std::find(label_rank.begin(), label_rank.end(), f->tensor().label);
    return static_cast<std::size_t>(it - label_rank.begin());
  };
  std::vector<std::pair<ExprHandle, std::string>> scalars;
  std::vector<ExprHandle> ops;
  for (const auto& f : factors) {
    if (is_op(f))
      ops.push_back(f);
    else
      scalars.emplace_back(f, serialize(f));
  }
  std::stable_sort(scalars.begin(), scalars.end(), [&](const auto& a, const auto& b) {
    auto ra = rank(a.first), rb = rank(b.first);
    if (ra != rb) return ra < rb;
    if (a.first->tensor().label != b.first->tensor().label) return a.first->tensor().label < b.first->tensor().label;
    return a.second < b.second;
  });
  std::vector<ExprHandle> out;
  for (auto& s : scalars) out.push_back(s.first);
  out.insert(out.end(), ops.begin(), ops.end());

  std::set<Index> closure;
  for (const auto& i : named) named_closure(i, closure);
  std::map<Index, Index> m;
  out = rename_dummies(out, closure, m);
  for (auto& f : out) {
    if (!is_op(f) && f->tensor().symmetry == Symmetry::nonsymm) continue;
    Slots s = slots_of(f);
    auto key = [&s](std::vector<Index>& v) { return [&v](int k) { return v[k]; }; };
    int sb = sort_bundle(s.bra, nullptr, key(s.bra));
    int sk = sort_bundle(s.ket, nullptr, key(s.ket));
    if (antisymmetric(f)) phase *= sb * sk;
    f = rebuild(f, std::move(s));
  }
  return out;
}

CanonicalTerm canonicalize_term(const ExprHandle& term, bool lexicographic, const IndexSpaceRegistry& reg,
                                const std::vector<std::string>& label_rank) {
  auto [coef, factors] = split_term(term);
  CanonicalTerm out;
  std::vector<ExprHandle> vars, net;
  for (const auto& f : factors) {
    if (f->is(ExprKind::variable))
      vars.push_back(f);
    else if (f->is(ExprKind::tensor) || f->is(ExprKind::normal_operator))
      net.push_back(f);
    else if (f->is(ExprKind::constant))
      coef *= f->scalar();
    else
      throw std::logic_error("canonicalize_term: term is not expanded");
  }
  std::stable_sort(vars.begin(), vars.end(),
                   [](const ExprHandle& a, const ExprHandle& b) { return a->variable().name < b->variable().name; });
  if (!net.empty()) {
    auto named = external_indices(net);
    CanonicalizeOptions co;
    co.registry = &reg;
    auto r = canonicalize_network({net, named}, co);
    out.zero = r.zero;
    int phase = r.phase;
    net = r.factors;
    if (lexicographic) net = lexicographic_post_sort(net, named, phase, label_rank);
    coef *= Scalar(phase);
  }
  out.coefficient = coef;
  out.factors = std::move(vars);
  out.factors.insert(out.factors.end(), net.begin(), net.end());
  return out;
}

}  // namespace tenet
