#include "tenet/canonicalize.hpp"
#include "tenet/ir.hpp"

#include <algorithm>
#include <functional>

namespace tenet {

namespace {

bool taggable(const IRNode& n) { return n.kind == IRKind::product || n.kind == IRKind::sum; }

void all_indices(const ExprHandle& f, std::set<Index>& out) {
  std::function<void(const Index&)> add = [&](const Index& i) {
    if (i.is_null()) return;
    out.insert(i);
    for (const auto& p : i.proto()) add(p);
  };
  if (f->is(ExprKind::tensor))
    for (const auto& i : f->tensor().slots()) add(i);
}

Index rename(const Index& i, const std::map<Index, Index>& m) {
  if (i.is_null()) return i;
  auto it = m.find(i);
  if (it != m.end()) return it->second;
  if (!i.has_proto()) return i;
  std::vector<Index> p;
  for (const auto& q : i.proto()) p.push_back(rename(q, m));
  return i.with_proto(std::move(p));
}

ExprHandle rename(const ExprHandle& f, const std::map<Index, Index>& m) {
  if (!f->is(ExprKind::tensor)) return f;
  Tensor t = f->tensor();
  for (auto* v : {&t.bra, &t.ket, &t.aux})
    for (auto& i : *v) i = rename(i, m);
  return make_tensor(std::move(t));
}

struct Split {
  Scalar coef;
  std::vector<ExprHandle> tensors;
  std::vector<ExprHandle> others;
  std::set<Index> external;
};

Split split(const ExprHandle& term) {
  Split s;
  auto [c, fs] = split_term(term);
  s.coef = c;
  for (const auto& f : fs) (f->is(ExprKind::tensor) ? s.tensors : s.others).push_back(f);
  s.external = external_indices(s.tensors);
  return s;
}

struct Sub {
  unsigned mask;
  NodeIdentity id;
};

std::vector<Sub> subnetworks(const Split& s, const IndexSpaceRegistry* reg) {
  const unsigned n = static_cast<unsigned>(s.tensors.size());
  std::vector<Sub> out;
  for (unsigned m = 1; m < (1u << n); ++m) {
    std::vector<ExprHandle> in;
    std::set<Index> inside, outside = s.external;
    for (unsigned k = 0; k < n; ++k) {
      if (m >> k & 1) {
        in.push_back(s.tensors[k]);
        all_indices(s.tensors[k], inside);
      } else {
        all_indices(s.tensors[k], outside);
      }
    }
    std::set<Index> keep;
    for (const auto& i : inside)
      if (outside.count(i)) keep.insert(i);
    out.push_back({m, network_identity(in, keep, reg)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Sub& a, const Sub& b) { return __builtin_popcount(a.mask) > __builtin_popcount(b.mask); });
  return out;
}

}  // namespace

Plan mark_cse(std::vector<IRPtr> roots) {
  Plan p;
  p.roots = std::move(roots);
  std::map<std::uint64_t, int> count;
  std::function<void(const IRPtr&)> census = [&](const IRPtr& n) {
    if (taggable(*n)) ++count[n->identity];
    for (const auto& c : n->children) census(c);
  };
  for (const auto& r : p.roots) census(r);

  std::map<std::uint64_t, int> tags;
  std::set<std::uint64_t> seen;
  // run-time uses: a hit on a shared node skips its subtree
  std::function<void(const IRPtr&)> walk = [&](const IRPtr& n) {
    if (taggable(*n) && count[n->identity] > 1) {
      auto it = tags.find(n->identity);
      if (it == tags.end()) it = tags.emplace(n->identity, static_cast<int>(tags.size())).first;
      n->reuse = it->second;
      ++p.uses[n->identity];
      if (!seen.insert(n->identity).second) {
        std::function<void(const IRPtr&)> tag_only = [&](const IRPtr& m) {
          if (taggable(*m) && count[m->identity] > 1) {
            auto jt = tags.find(m->identity);
            if (jt == tags.end()) jt = tags.emplace(m->identity, static_cast<int>(tags.size())).first;
            m->reuse = jt->second;
          }
          for (const auto& c : m->children) tag_only(c);
        };
        for (const auto& c : n->children) tag_only(c);
        return;
      }
    }
    for (const auto& c : n->children) walk(c);
  };
  for (const auto& r : p.roots) walk(r);
  p.shared = static_cast<int>(tags.size());
  return p;
}

std::optional<ExprHandle> fuse(const ExprHandle& a, const ExprHandle& b, const IndexSpaceRegistry* reg) {
  const Split sa = split(a), sb = split(b);
  if (sa.tensors.empty() || sb.tensors.empty()) return std::nullopt;
  if (sa.external != sb.external) return std::nullopt;
  const auto subs_a = subnetworks(sa, reg), subs_b = subnetworks(sb, reg);

  for (const auto& x : subs_a) {
    for (const auto& y : subs_b) {
      if (__builtin_popcount(y.mask) != __builtin_popcount(x.mask)) continue;
      if (x.id.id != y.id.id || x.id.layout.size() != y.id.layout.size()) continue;
      // interface indices must line up: externals by name, dummies by position
      bool ok = true;
      for (std::size_t k = 0; k < x.id.layout.size() && ok; ++k) {
        const Index &u = x.id.layout[k], &v = y.id.layout[k];
        const bool eu = sa.external.count(u) != 0, ev = sb.external.count(v) != 0;
        ok = eu == ev && (!eu || u == v);
      }
      if (!ok) continue;

      std::vector<ExprHandle> common, rest_a, rest_b;
      for (std::size_t k = 0; k < sa.tensors.size(); ++k)
        (x.mask >> k & 1 ? common : rest_a).push_back(sa.tensors[k]);
      for (std::size_t k = 0; k < sb.tensors.size(); ++k)
        if (!(y.mask >> k & 1)) rest_b.push_back(sb.tensors[k]);

      // fresh names for b's remaining dummies, then align the interface with a
      DummySession ses;
      std::set<Index> used_a, used_b;
      for (const auto& f : sa.tensors) all_indices(f, used_a);
      for (const auto& f : sb.tensors) all_indices(f, used_b);
      for (const auto& i : used_a) ses.reserve(i);
      for (const auto& i : used_b) ses.reserve(i);
      std::map<Index, Index> m;
      std::set<Index> iface(y.id.layout.begin(), y.id.layout.end());
      for (std::size_t k = 0; k < y.id.layout.size(); ++k) m[y.id.layout[k]] = x.id.layout[k];
      std::set<Index> rest_idx;
      for (const auto& f : rest_b) all_indices(f, rest_idx);
      for (const auto& i : rest_idx)
        if (!iface.count(i) && !sb.external.count(i) && !i.has_proto()) m[i] = ses.next_dummy(i.space());
      for (auto& f : rest_b) f = rename(f, m);

      const Scalar rel = sb.coef * Scalar(x.id.phase * y.id.phase) / sa.coef;
      std::vector<ExprHandle> fa = sa.others, fb = sb.others;
      fa.insert(fa.end(), rest_a.begin(), rest_a.end());
      fb.insert(fb.end(), rest_b.begin(), rest_b.end());
      common.push_back(sum({product(std::move(fa)), product(rel, std::move(fb))}));
      return product(sa.coef, std::move(common));
    }
  }
  return std::nullopt;
}

}  // namespace tenet
