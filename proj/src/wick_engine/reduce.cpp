#include "tenet/canonicalize.hpp"
#include "tenet/wick.hpp"

#include <map>

namespace tenet {

namespace {

Index subst(const Index& i, const std::map<Index, Index>& m) {
  if (i.is_null()) return i;
  auto it = m.find(i);
  if (it != m.end()) return it->second;
  if (!i.has_proto()) return i;
  std::vector<Index> p;
  for (const auto& q : i.proto()) p.push_back(subst(q, m));
  return i.with_proto(std::move(p));
}

ExprHandle subst(const ExprHandle& f, const std::map<Index, Index>& m) {
  auto list = [&](const std::vector<Index>& v) {
    std::vector<Index> r;
    for (const auto& i : v) r.push_back(subst(i, m));
    return r;
  };
  if (f->is(ExprKind::tensor)) {
    Tensor t = f->tensor();
    t.bra = list(t.bra);
    t.ket = list(t.ket);
    t.aux = list(t.aux);
    return make_tensor(std::move(t));
  }
  if (f->is(ExprKind::normal_operator)) {
    NormalOperator op = f->op();
    op.creators = list(op.creators);
    op.annihilators = list(op.annihilators);
    return make_operator(std::move(op));
  }
  return f;
}

bool is_pair(const ExprHandle& f, const char* label) {
  if (!f->is(ExprKind::tensor)) return false;
  const auto& t = f->tensor();
  return t.label == label && t.bra.size() == 1 && t.ket.size() == 1 && t.aux.empty() && !t.bra[0].is_null() &&
         !t.ket[0].is_null();
}

ExprHandle reduce_term(const ExprHandle& term, const IndexSpaceRegistry& reg) {
  auto [coef, factors] = split_term(term);
  DummySession ses;
  for (const auto& f : factors) {
    if (f->is(ExprKind::tensor))
      for (const auto& i : f->tensor().slots()) ses.reserve(i);
    if (f->is(ExprKind::normal_operator)) {
      for (const auto& i : f->op().creators) ses.reserve(i);
      for (const auto& i : f->op().annihilators) ses.reserve(i);
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<ExprHandle> kept;
    for (const auto& f : factors) {
      if ((is_pair(f, kDeltaLabel) || is_pair(f, kOverlapLabel)) && f->tensor().bra[0] == f->tensor().ket[0]) continue;
      if (f->is(ExprKind::constant)) {
        coef *= f->scalar();
        continue;
      }
      kept.push_back(f);
    }
    factors = std::move(kept);
    if (coef.is_zero()) return constant(0);

    std::vector<ExprHandle> net;
    for (const auto& f : factors)
      if (f->is(ExprKind::tensor) || f->is(ExprKind::normal_operator)) net.push_back(f);
    const auto named = external_indices(net);
    std::map<Index, Index> rule;
    for (const auto& f : factors) {
      if (!is_pair(f, kDeltaLabel)) continue;
      const Index x = f->tensor().bra[0], y = f->tensor().ket[0];
      const bool dx = !named.count(x), dy = !named.count(y);
      if (!dx && !dy) continue;
      if (dx && dy) {
        if (y.space().includes(x.space())) {
          rule[y] = x;
        } else if (x.space().includes(y.space())) {
          rule[x] = y;
        } else {
          const IndexSpace s = reg.intersect(x.space(), y.space());
          if (s.is_null()) return constant(0);
          Index z = ses.next_dummy(s, x.proto());
          rule[x] = z;
          rule[y] = z;
        }
      } else {
        const Index& d = dx ? x : y;
        const Index& n = dx ? y : x;
        if (d.space().includes(n.space())) {
          rule[d] = n;
        } else {
          const IndexSpace s = reg.intersect(d.space(), n.space());
          if (s.is_null()) return constant(0);
          if (s == d.space()) continue;
          rule[d] = ses.next_dummy(s, d.proto());
        }
      }
      break;
    }
    if (rule.empty()) break;
    for (auto& f : factors) f = subst(f, rule);
    changed = true;
  }
  return product(coef, std::move(factors));
}

}  // namespace

ExprHandle reduce(const ExprHandle& e, const IndexSpaceRegistry* reg) {
  const IndexSpaceRegistry& r = reg ? *reg : default_registry();
  std::vector<ExprHandle> out;
  for (const auto& t : terms_of(expand(e))) out.push_back(reduce_term(t, r));
  return sum(std::move(out));
}

}  // namespace tenet
