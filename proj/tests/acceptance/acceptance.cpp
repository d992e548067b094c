// acceptance checks, one PASS/FAIL line per criterion

#include "support.hpp"

#include "derive_cc.hpp"
#include "tenet/wick.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

using namespace tenet;
using namespace tenet::testing;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// failures collected per criterion
struct Check {
  std::vector<std::string> failures;
  std::string info;
  void operator()(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

ExprHandle P(const std::string& s, const IndexSpaceRegistry& reg = default_registry()) { return parse_expr(s, reg); }

WickOptions genuine() {
  WickOptions o;
  o.vacuum = Vacuum::genuine;
  return o;
}

WickOptions naive(WickOptions o) {
  o.topology = false;
  o.use_connectivity = false;
  o.dead_end = false;
  return o;
}

std::pair<Scalar, ExprHandle> canon_parts(const ExprHandle& term, const IndexSpaceRegistry& reg = default_registry()) {
  auto c = canonicalize_term(term, true, reg);
  return {c.coefficient, product(Scalar(1), c.factors)};
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double num = 0, den = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  return den == 0 ? num : num / den;
}

std::size_t slot_count(const ExprHandle& term) {
  std::size_t n = 0;
  for (const auto& f : split_term(term).second)
    if (f->is(ExprKind::tensor))
      for (const auto& i : f->tensor().slots()) n += !i.is_null();
  return n;
}

std::set<Index> slot_set(const ExprHandle& f) {
  std::set<Index> s;
  for (const auto& i : f->tensor().slots())
    if (!i.is_null()) s.insert(i);
  return s;
}

// ---- 1

void wick_results(Check& check) {
  auto eq30 = simplify(wick(P("a{p_2;p_1} a{p_4;p_3}"), genuine()));
  check(eq30 == simplify(P("a{p_2,p_4;p_1,p_3} + δ{p_2;p_3} a{p_4;p_1}")), "one-body pair");
  check(terms_of(eq30).size() == 2, "one-body pair term count");

  auto raw35 = wick(P("a{p_2,p_4;p_1,p_3} a{p_6,p_8;p_5,p_7}"), genuine());
  check(terms_of(raw35).size() == 7, "two-body pair term count");
  check(simplify(raw35) ==
            simplify(P("a{p_2,p_4,p_6,p_8;p_1,p_3,p_5,p_7} + δ{p_2;p_5} δ{p_4;p_7} a{p_6,p_8;p_1,p_3}"
                       " - δ{p_2;p_7} δ{p_4;p_5} a{p_6,p_8;p_1,p_3} - δ{p_2;p_5} a{p_4,p_6,p_8;p_1,p_3,p_7}"
                       " + δ{p_4;p_5} a{p_2,p_6,p_8;p_1,p_3,p_7} + δ{p_2;p_7} a{p_4,p_6,p_8;p_1,p_3,p_5}"
                       " - δ{p_4;p_7} a{p_2,p_6,p_8;p_1,p_3,p_5}")),
        "two-body pair result");

  auto gg = P("g{p_1,p_2;p_3,p_4}:A a{p_3,p_4;p_1,p_2} g{p_5,p_6;p_7,p_8}:A a{p_7,p_8;p_5,p_6}");
  auto r36 = wick_full_pipeline(gg, genuine());
  check(r36 == simplify(P("g{p_1,p_2;p_3,p_4}:A g{p_5,p_6;p_7,p_8}:A a{p_3,p_4,p_7,p_8;p_1,p_2,p_5,p_6}"
                          " + 4 g{p_1,p_2;p_3,p_4}:A g{p_3,p_6;p_7,p_8}:A a{p_7,p_4,p_8;p_1,p_2,p_6}"
                          " + 2 g{p_1,p_2;p_3,p_4}:A g{p_3,p_4;p_7,p_8}:A a{p_7,p_8;p_1,p_2}")),
        "antisymmetric two-body pair result");
  std::multiset<Rational> coefs;
  for (const auto& t : terms_of(r36)) coefs.insert(abs(split_term(t).first.real()));
  check(coefs == std::multiset<Rational>{1, 2, 4}, "coefficients 1, 4, 2");
  check(r36 == wick_full_pipeline(gg, naive(genuine())), "folded equals unfolded");

  WickOptions o;
  auto r47 = wick_full_pipeline(P("ã{p_1<i_1>;} h{;;p_3} ã{p_3;p_3} ã{;p_2<i_2>}"), o);
  check(r47 == simplify(P("- h{;;p_3} ã{p_1<i_1>,p_3;p_2<i_2>,p_3}"
                          " + h{;;p_3} δ{p_1<i_1>;a_1<i_1>} δ{a_2<i_2>;p_2<i_2>} ã{p_3;p_3} s{a_1<i_1>;a_2<i_2>}"
                          " - h{;;a_1} δ{a_2<i_2>;p_2<i_2>} ã{p_1<i_1>;a_1} s{a_1;a_2<i_2>}"
                          " - h{;;a_2} δ{p_1<i_1>;a_1<i_1>} s{a_1<i_1>;a_2} ã{a_2;p_2<i_2>}"
                          " + h{;;a_3} δ{p_1<i_1>;a_1<i_1>} δ{a_2<i_2>;p_2<i_2>} s{a_1<i_1>;a_3} s{a_3;a_2<i_2>}")),
        "reduction listing result");
  check(terms_of(r47).size() == 5, "reduction listing term count");
}

// ---- 2

void canonicalizer_axioms(Check& check) {
  std::mt19937 rng(2025);
  const auto reg = small_registry(2, 2);
  LeafStore store(reg, 5);
  int networks = 0, rewrites = 0, valued = 0;
  while (networks < 50) {
    const ExprHandle t = random_term(rng, 2 + static_cast<int>(rng() % 5), reg, true);
    if (slot_count(t) > 12) continue;
    ++networks;
    const std::string text = serialize(t, reg);
    const auto ref = canonicalize_term(t, true, reg);
    for (int k = 0; k < 10; ++k, ++rewrites) {
      const ExprHandle s = scramble(t, rng, reg);
      const auto c = canonicalize_term(s, true, reg);
      if (c.zero != ref.zero) {
        check(false, "zero flag differs: " + text);
        continue;
      }
      if (ref.zero) continue;
      check(product(Scalar(1), c.factors) == product(Scalar(1), ref.factors), "canonical forms differ: " + text);
      check(c.coefficient == ref.coefficient, "phases differ: " + text);
    }
    // reachability: same labels, same value
    const ExprHandle ref_e = ref.zero ? constant(Scalar(0)) : product(ref.coefficient, ref.factors);
    if (!ref.zero) {
      std::multiset<std::string> in, out;
      for (const auto& f : split_term(t).second) in.insert(f->tensor().label);
      for (const auto& f : ref.factors) out.insert(f->tensor().label);
      check(in == out, "tensors lost: " + text);
    }
    auto ext = external_indices(split_term(t).second);
    std::vector<Index> target(ext.begin(), ext.end());
    if (target.size() <= 6) {
      ++valued;
      const auto a = naive_evaluate(t, target, store), b = naive_evaluate(ref_e, target, store);
      double d = 0, n = 0;
      for (std::size_t k = 0; k < a.values().size(); ++k) {
        d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
        n = std::max(n, std::abs(a.values()[k]));
      }
      check(d <= 1e-9 * std::max(1.0, n), "canonical value differs: " + text);
    }
  }
  check.info = std::to_string(networks) + " networks, " + std::to_string(rewrites) + " rewrites, " +
               std::to_string(valued) + " checked numerically";
}

// ---- 3

void identity_pairs(Check& check) {
  auto one = P("ã{i_2,i_1;a_2,a_1} t{a_2;i_2} t{a_1;i_1}");
  auto two = P("t{a_2;i_1} ã{i_2,i_1;a_2,a_1} t{a_1;i_2}");
  auto [c1, f1] = canon_parts(one);
  auto [c2, f2] = canon_parts(two);
  check(f1 == f2, "operator network pair: canonical forms differ");
  check(c1 == -c2, "operator network pair: relative phase is not -1");

  auto a = P("ḡ{i_2,a_1<i_1>;a_2<i_3>,a_3<i_4>}:A");
  auto b = P("ḡ{i_2,a_1<i_4>;a_3<i_1>,a_2<i_3>}:A");
  const auto ia = canonical_identity(a), ib = canonical_identity(b);
  check(ia.id == ib.id, "protoindexed leaf pair: identities differ");
  // i_1 <-> i_4 maps one onto the other up to sign
  auto [ca, fa] = canon_parts(a);
  auto [cb, fb] = canon_parts(P("ḡ{i_2,a_1<i_1>;a_3<i_4>,a_2<i_3>}:A"));
  check(fa == fb, "protoindexed leaf pair: forms differ after relabeling");
  check(ca == -cb, "protoindexed leaf pair: relative phase is not -1");

  check(canonical_identity(P("g{i_2,a_1<i_1>;i_3,a_2<i_4>}")).id !=
            canonical_identity(P("g{i_2,a_1<i_1>;a_2<i_4>,i_3}")).id,
        "nonsymmetric leaf pair shares an identity");
  check(canonical_identity(P("g{i_2,i_3;a_2<i_4,i_5>,a_3<i_4,i_5>} s{i_4;i_2}")).id ==
            canonical_identity(P("g{i_2,i_3;a_2<i_4,i_5>,a_3<i_4,i_5>} s{i_5;i_2}")).id,
        "equivalent intermediates differ");
  check(canonical_identity(P("g{i_2,i_3;a_2<i_5>,a_3<i_4,i_6>} s{i_5;i_3} t{a_2<i_5>;i_5} s{i_6;i_2} "
                             "t{a_3<i_4,i_6>,a_4<i_4,i_6>;i_6,i_4}"))
                .id != canonical_identity(P("g{i_2,i_3;a_2<i_5>,a_3<i_4,i_6>} s{i_5;i_3} t{a_2<i_5>;i_5} "
                                            "s{i_6;i_2} t{a_3<i_4,i_6>,a_4<i_4,i_6>;i_4,i_6}"))
                          .id,
        "nonequivalent intermediates share an identity");
}

// ---- 4

void scaling(Check& check) {
  std::mt19937 rng(29);
  const auto& reg = default_registry();
  std::vector<double> xs, ys;
  std::ostringstream info;
  for (int n : {8, 16, 32, 64}) {
    std::vector<double> times;
    for (int rep = 0; rep < 7; ++rep) {
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 1);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::string s;
      for (int k = 1; k < n; k += 2) s += "D{i_" + std::to_string(k) + ",i_" + std::to_string(k + 1) + ";} ";
      s += "U{;";
      for (int k = 0; k < n; ++k) s += (k ? ",i_" : "i_") + std::to_string(perm[k]);
      s += "}:S";
      const auto term = P(s);
      const auto t0 = Clock::now();
      const auto c = canonicalize_term(term, true, reg);
      times.push_back(since(t0));
      check(!c.zero, "network vanished at N=" + std::to_string(n));
    }
    std::sort(times.begin(), times.end());
    const double med = times[times.size() / 2];
    xs.push_back(std::log(n));
    ys.push_back(std::log(med));
    info << "N=" << n << ":" << med << "s ";
    if (n == 64) check(med < 1.0, "N=64 takes " + std::to_string(med) + " s");
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  const double slope = sxy / sxx;
  info << "slope=" << slope;
  check(slope <= 3.0, "log-log slope " + std::to_string(slope));
  check.info = info.str();
}

// ---- 5

void wick_optimizations(Check& check) {
  cli::CCOptions o;
  o.max_rank = 2;
  const auto t0 = Clock::now();
  const auto ref = cli::derive_cc(o);
  const double secs = since(t0);
  check(secs < 10.0, "rank-2 derivation took " + std::to_string(secs) + " s");
  for (bool topo : {false, true})
    for (bool conn : {false, true}) {
      if (topo && conn) continue;
      cli::CCOptions q = o;
      q.topology = topo;
      q.use_connectivity = conn;
      const auto r = cli::derive_cc(q);
      bool same = r.residuals.size() == ref.residuals.size();
      for (std::size_t k = 0; same && k < r.residuals.size(); ++k) same = r.residuals[k] == ref.residuals[k];
      check(same, std::string("rank-2 residuals differ with topology=") + (topo ? "on" : "off") +
                      " connectivity=" + (conn ? "on" : "off"));
    }

  std::mt19937 rng(11);
  const std::vector<std::string> pieces = {
      "f{p_#1;p_#2} ã{p_#2;p_#1}", "g{p_#1,p_#2;p_#3,p_#4}:A ã{p_#3,p_#4;p_#1,p_#2}", "t{a_#1;i_#1}:A ã{i_#1;a_#1}",
      "t{a_#1,a_#2;i_#1,i_#2}:A ã{i_#1,i_#2;a_#1,a_#2}", "λ{i_#1;a_#1}:A ã{a_#1;i_#1}",
      "x{p_#1;i_#1} ã{i_#1;p_#1}"};
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    std::string s;
    int next = 1;
    for (int k = 0; k < n; ++k) {
      std::string piece = pieces[rng() % pieces.size()];
      for (int slot = 1; slot <= 4; ++slot) {
        const std::string key = "#" + std::to_string(slot);
        for (auto p = piece.find(key); p != std::string::npos; p = piece.find(key))
          piece.replace(p, key.size(), std::to_string(next + slot - 1));
      }
      next += 4;
      s += (k ? " " : "") + piece;
    }
    const auto in = P(s);
    for (bool full : {false, true}) {
      WickOptions w;
      w.full_contractions = full;
      check(wick_full_pipeline(in, w) == wick_full_pipeline(in, naive(w)), "random product differs: " + s);
    }
  }

  // ablation at rank 3
  cli::CCOptions r3;
  r3.max_rank = 3;
  const auto fast = cli::derive_cc(r3);
  r3.topology = false;
  const auto slow = cli::derive_cc(r3);
  check(slow.seconds > fast.seconds, "topology off is not slower at rank 3");
  bool same = fast.residuals.size() == slow.residuals.size();
  for (std::size_t k = 0; same && k < fast.residuals.size(); ++k) same = fast.residuals[k] == slow.residuals[k];
  check(same, "rank-3 residuals differ with topology off");
  std::ostringstream info;
  info << "rank 2 " << secs << "s; rank 3 topology on " << fast.seconds << "s (" << fast.stats.nodes
       << " nodes), off " << slow.seconds << "s (" << slow.stats.nodes << " nodes)";
  check.info = info.str();
}

// ---- 6

void degeneracy(Check& check) {
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m)
      for (int k = 0; k <= std::min(n, m); ++k)
        check(degeneracy_factor(n, m, k) == Rational(count_matchings(n, m, k)),
              "n=" + std::to_string(n) + " m=" + std::to_string(m) + " k=" + std::to_string(k));
}

// ---- 7

void tnco(Check& check) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    IndexSpaceRegistry reg;
    for (int s = 0; s < 6; ++s) reg.register_base("b" + std::to_string(s), VacuumTrait::occupied, 2 + rng() % 63);
    reg.freeze();
    const auto ext = registry_extents(reg);
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<std::string>> slots(n);
    const int nidx = n + static_cast<int>(rng() % 4);
    for (int k = 0; k < nidx; ++k) {
      const std::string idx = "b" + std::to_string(rng() % 6) + "_" + std::to_string(k + 1);
      std::vector<int> who(n);
      std::iota(who.begin(), who.end(), 0);
      std::shuffle(who.begin(), who.end(), rng);
      const int uses = std::min(n, 1 + static_cast<int>(rng() % 3));
      for (int u = 0; u < uses; ++u) slots[who[u]].push_back(idx);
    }
    std::string text;
    for (int t = 0; t < n; ++t) {
      std::string s = "T" + std::to_string(t) + "{;;";
      for (std::size_t k = 0; k < slots[t].size(); ++k) s += (k ? "," : "") + slots[t][k];
      text += s + "} ";
    }
    const auto term = P(text, reg);
    const auto fs = split_term(term).second;
    std::vector<std::set<Index>> sets;
    for (const auto& f : fs) sets.push_back(slot_set(f));
    const double dp = total_flops(*binarize_tnco(term, ext, &reg));
    const double best = exhaustive_flops(sets, external_indices(fs), ext);
    check(dp == best, "cost " + std::to_string(dp) + " vs " + std::to_string(best) + ": " + text);
  }
}

// ---- 8

void cse(Check& check) {
  const auto reg = small_registry(2, 3);
  const auto ext = registry_extents(reg);
  LeafStore store(reg, 11);
  auto e = P("1/16 ḡ{i_3,i_4;a_3,a_4}:A t{a_3,a_4;i_1,i_2}:A t{a_1,a_2;i_3,i_4}:A + "
             "1/8 ḡ{i_3,i_4;a_3,a_4}:A t{a_3,a_4;i_1,i_2}:A t{a_1;i_3} t{a_2;i_4}",
             reg);
  auto plan = mark_cse({lower(e, ext, &reg)});
  check(plan.shared == 1, "shared intermediates: " + std::to_string(plan.shared));
  if (plan.shared != 1) return;
  const std::uint64_t id = plan.uses.begin()->first;
  // the shared node is the g t product
  bool is_gt = false;
  std::function<void(const IRNode&)> walk = [&](const IRNode& n) {
    if (n.identity == id && n.kind == IRKind::product) {
      std::multiset<std::string> labels;
      for (const auto& f : split_term(n.expr).second) labels.insert(f->tensor().label);
      is_gt = labels == std::multiset<std::string>{"t", "ḡ"};
    }
    for (const auto& c : n.children) walk(*c);
  };
  walk(*plan.roots[0]);
  check(is_gt, "shared node is not the g t product");
  CacheManager cache(plan);
  EvalStats st;
  auto with = evaluate(*plan.roots[0], store.leaves(), ext, &cache, &st);
  check(st.product_evals.count(id) && st.product_evals.at(id) == 1, "shared product evaluated more than once");
  check(cache.hits() == 1, "cache hits: " + std::to_string(cache.hits()));
  auto without = evaluate(*plan.roots[0], store.leaves(), ext);
  check(with == without, "cached result differs");
}

// ---- 9

void interpreter(Check& check) {
  std::mt19937 rng(77);
  const auto reg = small_registry(2, 3);
  const auto ext = registry_extents(reg);
  LeafStore store(reg, 3);
  int checked = 0, attempts = 0, mixed = 0;
  double worst = 0;
  while (checked < 100 && attempts < 5000) {
    ++attempts;
    auto first = random_term(rng, 1 + rng() % 4, reg);
    const auto ext_first = external_indices(split_term(first).second);
    if (ext_first.size() > 4) continue;
    const int nterms = 1 + rng() % 4;
    std::vector<ExprHandle> terms{first};
    bool distinct = false;
    for (int k = 1; k < nterms; ++k) {
      // another network over the same externals if one turns up, else a rewrite of the first
      ExprHandle other;
      for (int tries = 0; tries < 200 && !other; ++tries) {
        auto t = random_term(rng, 1 + rng() % 4, reg);
        if (external_indices(split_term(t).second) == ext_first) other = t;
      }
      distinct |= bool(other);
      terms.push_back(product(Scalar::ratio(1 + rng() % 3, 2), {other ? other : scramble(first, rng, reg)}));
    }
    auto raw = sum(terms);
    SimplifyOptions so;
    so.registry = &reg;
    auto e = simplify(raw, so);
    if (is_zero(e)) continue;
    std::vector<Index> target(ext_first.begin(), ext_first.end());
    std::shuffle(target.begin(), target.end(), rng);
    auto plan = mark_cse({lower(e, ext, &reg, target)});
    CacheManager cache(plan);
    auto got = evaluate(*plan.roots[0], store.leaves(), ext, &cache);
    auto nocache = evaluate(*plan.roots[0], store.leaves(), ext);
    check(got == nocache, "cache on/off differ: " + serialize(raw, reg));
    const double d = rel_diff(got.values(), naive_evaluate(raw, target, store).values());
    worst = std::max(worst, d);
    check(d < 1e-10, "naive mismatch " + std::to_string(d) + ": " + serialize(raw, reg));
    mixed += distinct;
    ++checked;
  }
  check(checked == 100, "only " + std::to_string(checked) + " expressions generated");
  std::ostringstream info;
  info << checked << " expressions (" << mixed << " with distinct networks), max rel diff " << worst;
  check.info = info.str();
}

// ---- 10

ExprHandle random_expr(std::mt19937& rng, int depth) {
  const auto& reg = default_registry();
  auto coin = [&](int n) { return static_cast<int>(rng() % n); };
  if (depth == 0 || coin(3) == 0) {
    switch (coin(5)) {
      case 0:
        return variable(std::string(1, static_cast<char>('w' + coin(4))));
      case 1: {
        NormalOperator op;
        op.vacuum = coin(2) ? Vacuum::fermi : Vacuum::genuine;
        for (int k = 0, n = coin(3); k < n; ++k) op.annihilators.push_back(make_index(reg, "p_" + std::to_string(1 + coin(6))));
        for (int k = 0, n = 1 + coin(2); k < n; ++k) op.creators.push_back(make_index(reg, "p_" + std::to_string(1 + coin(6))));
        return make_operator(op);
      }
      default: {
        auto t = random_term(rng, 1 + coin(2), reg, coin(2) == 0);
        return split_term(t).second.empty() ? variable("z") : split_term(t).second.front();
      }
    }
  }
  const int n = 2 + coin(2);
  std::vector<ExprHandle> kids;
  for (int k = 0; k < n; ++k) kids.push_back(random_expr(rng, depth - 1));
  if (coin(2)) return sum(kids);
  static const std::vector<Scalar> coefs{Scalar(1), Scalar(-1), Scalar::ratio(1, 4), Scalar::ratio(-3, 8), Scalar(2),
                                         Scalar(Rational(1, 2), Rational(-1, 3))};
  return product(coefs[coin(static_cast<int>(coefs.size()))], kids);
}

void round_trip(Check& check) {
  std::mt19937 rng(10);
  for (int k = 0; k < 200; ++k) {
    auto e = random_expr(rng, 3);
    const auto text = serialize(e);
    auto back = parse_expr(text);
    check(back == e && serialize(back) == text, "round trip: " + text);
  }
  for (const auto* s :
       {"ã{p_1<i_1>;} h{;;p_3} ã{p_3;p_3} ã{;p_2<i_2>}", "- h{;;p_3} ã{p_1<i_1>,p_3;p_2<i_2>,p_3}",
        "h{;;p_3} δ{p_1<i_1>;a_1<i_1>} δ{a_2<i_2>;p_2<i_2>} ã{p_3;p_3} s{a_1<i_1>;a_2<i_2>}",
        "- h{;;a_1} δ{a_2<i_2>;p_2<i_2>} ã{p_1<i_1>;a_1} s{a_1;a_2<i_2>}",
        "- h{;;a_2} δ{p_1<i_1>;a_1<i_1>} s{a_1<i_1>;a_2} ã{a_2;p_2<i_2>}",
        "h{;;a_3} δ{p_1<i_1>;a_1<i_1>} δ{a_2<i_2>;p_2<i_2>} s{a_1<i_1>;a_3} s{a_3;a_2<i_2>}"}) {
    auto e = parse_expr(s);
    check(parse_expr(serialize(e)) == e, std::string("listing literal: ") + s);
  }
  check.info = "200 generated + 6 literals";
}

struct Criterion {
  int number;
  const char* name;
  double limit;
  void (*run)(Check&);
};

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "wick results", 1.0, wick_results},
      {2, "canonicalizer axioms", 30.0, canonicalizer_axioms},
      {3, "identity pairs", 1.0, identity_pairs},
      {4, "canonicalization scaling", 60.0, scaling},
      {5, "wick optimizations", 60.0, wick_optimizations},
      {6, "degeneracy factor", 1.0, degeneracy},
      {7, "contraction order", 10.0, tnco},
      {8, "common subexpressions", 1.0, cse},
      {9, "interpreter oracle", 30.0, interpreter},
      {10, "parser round trip", 1.0, round_trip},
  };
  int failed = 0;
  for (const auto& c : all) {
    Check check;
    const auto t0 = Clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const double secs = since(t0);
    check(secs < c.limit, "time limit " + std::to_string(c.limit) + " s exceeded");
    const bool ok = check.failures.empty();
    failed += !ok;
    std::printf("criterion %d: %s  %s (%.3f s)%s%s\n", c.number, ok ? "PASS" : "FAIL", c.name, secs,
                check.info.empty() ? "" : "  ", check.info.c_str());
    for (std::size_t k = 0; k < check.failures.size() && k < 5; ++k) std::printf("    %s\n", check.failures[k].c_str());
    if (check.failures.size() > 5) std::printf("    ... %zu more\n", check.failures.size() - 5);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
