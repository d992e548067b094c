#include "tenet/wick.hpp"

#include <stdexcept>

namespace tenet {

namespace {

ExprHandle delta(const Index& bra, const Index& ket) {
  return make_tensor(kDeltaLabel, {{bra}, {ket}, {}}, default_symmetry(kDeltaLabel));
}

ExprHandle overlap(const Index& bra, const Index& ket) {
  return make_tensor(kOverlapLabel, {{bra}, {ket}, {}}, default_symmetry(kOverlapLabel));
}

// l -- x (-- s -- y) -- r through `space`; `hole` flips the bra/ket orientation
Contraction chain(const Index& l, const Index& r, const IndexSpace& space, bool hole, DummySession& dummies) {
  Contraction c;
  c.sign = hole ? -1 : 1;
  auto link = [&](const Index& a, const Index& b) {
    if (a == b) return;
    c.factors.push_back(hole ? delta(b, a) : delta(a, b));
  };
  if (l.proto() == r.proto()) {
    if (space == l.space() || space == r.space()) {
      link(l, r);
    } else {
      Index x = dummies.next_dummy(space, l.proto());
      link(l, x);
      link(x, r);
    }
    return c;
  }
  Index x = space == l.space() ? l : dummies.next_dummy(space, l.proto());
  Index y = space == r.space() ? r : dummies.next_dummy(space, r.proto());
  link(l, x);
  c.factors.push_back(hole ? overlap(y, x) : overlap(x, y));
  link(y, r);
  return c;
}

}  // namespace

std::optional<Contraction> contract_pair(const Index& left, bool left_creator, const Index& right, bool right_creator,
                                         Vacuum vacuum, const IndexSpaceRegistry& reg, DummySession& dummies) {
  if (left_creator == right_creator) return std::nullopt;
  if (vacuum == Vacuum::genuine) {
    if (left_creator) return std::nullopt;
    const IndexSpace s = reg.intersect(left.space(), right.space());
    if (s.is_null()) return std::nullopt;
    if (left.proto() == right.proto()) return Contraction{1, {delta(left, right)}};
    return chain(left, right, s, false, dummies);
  }
  const bool hole = left_creator;
  const std::uint32_t mask = hole ? reg.occupied_mask() | reg.mixed_mask() : reg.unoccupied_mask() | reg.mixed_mask();
  const IndexSpace s = reg.restrict_to(reg.intersect(left.space(), right.space()), mask);
  if (s.is_null()) return std::nullopt;
  return chain(left, right, s, hole, dummies);
}

Rational degeneracy_factor(int n, int m, int k) {
  if (n < 0 || m < 0 || k < 0 || k > n || k > m) throw std::domain_error("degeneracy_factor: need 0 <= k <= min(n, m)");
  auto fact = [](int x) {
    Rational r = 1;
    for (int i = 2; i <= x; ++i) r *= i;
    return r;
  };
  return fact(n) * fact(m) / (fact(n - k) * fact(m - k) * fact(k));
}

}  // namespace tenet
