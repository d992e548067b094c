#include "tenet/canonicalize.hpp"
#include "tenet/wick.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <thread>

namespace tenet {

namespace {

struct Elem {
  Index idx;
  bool creator = false;
  int op = 0;
  bool alive = true;
  bool frozen = false;
};

class Engine {
 public:
  Engine(const WickOptions& o, const IndexSpaceRegistry& reg) : o_(o), reg_(reg) {}

  std::vector<ExprHandle> run(const ExprHandle& term, WickStats& stats) {
    auto [coef, factors] = split_term(term);
    coef_ = coef;
    std::vector<const NormalOperator*> ops;
    for (const auto& f : factors) {
      if (f->is(ExprKind::normal_operator))
        ops.push_back(&f->op());
      else if (f->is(ExprKind::sum))
        throw std::logic_error("wick: term is not expanded");
      else
        scalars_.push_back(f);
    }
    if (ops.empty()) return {term};
    for (const auto* op : ops)
      if (op->vacuum != o_.vacuum) throw std::invalid_argument("wick: operator vacuum does not match the context");
    nops_ = static_cast<int>(ops.size());
    for (auto [a, b] : o_.connectivity) {
      if (a < 0 || b < 0 || a >= nops_ || b >= nops_ || a == b)
        throw std::invalid_argument("wick: connectivity pair does not reference two operators of the product");
      required_.emplace_back(std::min(a, b), std::max(a, b));
    }
    for (int k = 0; k < nops_; ++k) {
      for (const auto& c : ops[k]->creators) el_.push_back({c, true, k});
      for (auto it = ops[k]->annihilators.rbegin(); it != ops[k]->annihilators.rend(); ++it)
        el_.push_back({*it, false, k});
    }
    named_ = external_indices(factors);
    for (const auto& f : factors) {
      visit(f, [&](const ExprHandle& a) {
        if (a->is(ExprKind::tensor))
          for (const auto& i : a->tensor().slots()) dummies_.reserve(i);
      }, true);
    }
    for (const auto& e : el_) dummies_.reserve(e.idx);
    conn_.assign(nops_ * nops_, 0);
    if (!o_.full_contractions || el_.size() % 2 == 0) rec(Rational(1), 1);
    stats.nodes += nodes_;
    stats.terms += out_.size();
    return std::move(out_);
  }

 private:
  const WickOptions& o_;
  const IndexSpaceRegistry& reg_;
  Scalar coef_;
  std::vector<ExprHandle> scalars_;
  std::vector<Elem> el_;
  std::vector<ExprHandle> contr_;
  std::vector<std::pair<int, int>> required_;
  std::vector<int> conn_;
  std::set<Index> named_;
  DummySession dummies_;
  std::vector<ExprHandle> out_;
  int nops_ = 0;
  std::size_t nodes_ = 0;

  bool possible(const Elem& l, const Elem& r) const {
    if (l.op == r.op || l.creator == r.creator) return false;
    const std::uint32_t w = l.idx.space().type & r.idx.space().type;
    if (o_.vacuum == Vacuum::genuine) return !l.creator && w != 0;
    if (l.creator) return (w & (reg_.occupied_mask() | reg_.mixed_mask())) != 0;
    return (w & (reg_.unoccupied_mask() | reg_.mixed_mask())) != 0;
  }

  bool usable(int k) const { return el_[k].alive && !el_[k].frozen; }

  bool has_partner(int k) const {
    for (int j = 0; j < static_cast<int>(el_.size()); ++j) {
      if (j == k || !usable(j)) continue;
      if (j > k ? possible(el_[k], el_[j]) : possible(el_[j], el_[k])) return true;
    }
    return false;
  }

  bool connected(int a, int b) const { return conn_[a * nops_ + b] > 0; }

  bool connectable(int a, int b) const {
    for (int u = 0; u < static_cast<int>(el_.size()); ++u) {
      if (!usable(u) || (el_[u].op != a && el_[u].op != b)) continue;
      for (int v = u + 1; v < static_cast<int>(el_.size()); ++v) {
        if (!usable(v) || el_[v].op == el_[u].op || (el_[v].op != a && el_[v].op != b)) continue;
        if (possible(el_[u], el_[v])) return true;
      }
    }
    return false;
  }

  // remnant operators and the state network; slot_of maps an element to (factor, bundle, position)
  struct StateNet {
    std::vector<ExprHandle> factors;
    std::vector<int> op_factor;
    std::vector<std::tuple<int, BundleKind, int>> slot_of;
  };

  StateNet state_network() const {
    StateNet s;
    for (const auto& f : scalars_)
      if (!f->is(ExprKind::variable)) s.factors.push_back(f);
    for (const auto& f : contr_) s.factors.push_back(f);
    s.op_factor.assign(nops_, -1);
    s.slot_of.assign(el_.size(), {-1, BundleKind::bra, -1});
    for (int k = 0; k < nops_; ++k) {
      NormalOperator op;
      op.vacuum = o_.vacuum;
      std::vector<int> ann;
      for (int e = 0; e < static_cast<int>(el_.size()); ++e) {
        if (el_[e].op != k || !el_[e].alive) continue;
        if (el_[e].creator) {
          s.slot_of[e] = {static_cast<int>(s.factors.size()), BundleKind::ket, static_cast<int>(op.creators.size())};
          op.creators.push_back(el_[e].idx);
        } else {
          ann.push_back(e);
        }
      }
      for (auto it = ann.rbegin(); it != ann.rend(); ++it) {
        s.slot_of[*it] = {static_cast<int>(s.factors.size()), BundleKind::bra,
                          static_cast<int>(op.annihilators.size())};
        op.annihilators.push_back(el_[*it].idx);
      }
      if (op.rank() == 0) continue;
      s.op_factor[k] = static_cast<int>(s.factors.size());
      s.factors.push_back(Expr::make_atom(ExprKind::normal_operator, std::move(op)));
    }
    return s;
  }

  // partners of x grouped into orbits of the state automorphisms that fix x
  std::vector<std::pair<int, int>> orbit_groups(int x, const std::vector<int>& partners) {
    std::vector<std::pair<int, int>> groups;
    if (!o_.topology || partners.size() < 2) {
      for (int v : partners) groups.emplace_back(v, 1);
      return groups;
    }
    StateNet s = state_network();
    std::map<std::tuple<int, int, int>, Color> salt;
    const Color kX = color("wick:x"), kFrozen = color("wick:frozen"), kFree = color("wick:free");
    for (int e = 0; e < static_cast<int>(el_.size()); ++e) {
      if (!el_[e].alive) continue;
      auto [f, b, p] = s.slot_of[e];
      salt[{f, static_cast<int>(b), p}] = e == x ? kX : el_[e].frozen ? kFrozen : kFree;
    }
    GraphOptions go;
    go.registry = &reg_;
    go.slot_salt = [&salt, kFree](int f, BundleKind b, int p) {
      auto it = salt.find({f, static_cast<int>(b), p});
      return it == salt.end() ? kFree : it->second;
    };
    auto g = build_graph({s.factors, named_}, go);
    for (auto [a, b] : required_) {
      if (connected(a, b) || s.op_factor[a] < 0 || s.op_factor[b] < 0) continue;
      int v = g.add_vertex(VertexKind::extra, color("wick:connect"));
      g.add_edge(v, g.factors[s.op_factor[a]].core);
      g.add_edge(v, g.factors[s.op_factor[b]].core);
    }
    auto lab = canonical_labeling(g.colored());
    std::vector<Permutation> even;
    for (auto& gen : lab.generators)
      if (automorphism_phase(g, s.factors, gen) > 0) even.push_back(std::move(gen));
    const auto rep = orbits(g.vertices.size(), even);
    auto slot_vertex = [&](int e) {
      auto [f, b, p] = s.slot_of[e];
      const auto& fv = g.factors[f];
      return b == BundleKind::ket ? fv.ket_slots[p] : fv.bra_slots[p];
    };
    std::map<int, std::size_t> where;
    for (int v : partners) {
      auto [it, fresh] = where.emplace(rep[slot_vertex(v)], groups.size());
      if (fresh)
        groups.emplace_back(v, 1);
      else
        ++groups[it->second].second;
    }
    return groups;
  }

  void emit(const Rational& w, int sign) {
    for (auto [a, b] : required_)
      if (!connected(a, b)) return;
    NormalOperator op;
    op.vacuum = o_.vacuum;
    int inversions = 0, ann_seen = 0;
    std::vector<Index> ann;
    for (const auto& e : el_) {
      if (!e.alive) continue;
      if (e.creator) {
        inversions += ann_seen;
        op.creators.push_back(e.idx);
      } else {
        ++ann_seen;
        ann.push_back(e.idx);
      }
    }
    if (o_.full_contractions && (!op.creators.empty() || !ann.empty())) return;
    op.annihilators.assign(ann.rbegin(), ann.rend());
    if (inversions % 2) sign = -sign;
    std::vector<ExprHandle> f = scalars_;
    f.insert(f.end(), contr_.begin(), contr_.end());
    if (op.rank() > 0) f.push_back(make_operator(std::move(op)));
    out_.push_back(product(coef_ * Scalar(w) * Scalar(sign), std::move(f)));
  }

  bool dead() const {
    if (o_.use_connectivity) {
      for (auto [a, b] : required_)
        if (!connected(a, b) && !connectable(a, b)) return true;
    }
    if (o_.full_contractions && o_.dead_end) {
      for (int k = 0; k < static_cast<int>(el_.size()); ++k)
        if (el_[k].alive && !has_partner(k)) return true;
    }
    return false;
  }

  void rec(const Rational& w, int sign) {
    ++nodes_;
    if (dead()) return;
    const int n = static_cast<int>(el_.size());
    int x = -1;
    for (int k = 0; k < n; ++k) {
      if (!usable(k)) continue;
      if (o_.full_contractions) {
        x = k;
        break;
      }
      bool left = false;
      for (int j = k + 1; j < n && !left; ++j) left = usable(j) && possible(el_[k], el_[j]);
      if (left) {
        x = k;
        break;
      }
    }
    if (x < 0) {
      emit(w, sign);
      return;
    }
    std::vector<int> partners;
    for (int j = x + 1; j < n; ++j)
      if (usable(j) && possible(el_[x], el_[j])) partners.push_back(j);
    if (o_.full_contractions && partners.empty()) return;

    if (!o_.full_contractions) {
      el_[x].frozen = true;
      rec(w, sign);
      el_[x].frozen = false;
    }
    for (auto [v, mult] : orbit_groups(x, partners)) {
      int between = 0;
      for (int j = x + 1; j < v; ++j) between += el_[j].alive;
      auto c = contract_pair(el_[x].idx, el_[x].creator, el_[v].idx, el_[v].creator, o_.vacuum, reg_, dummies_);
      if (!c) continue;
      const std::size_t nc = contr_.size();
      contr_.insert(contr_.end(), c->factors.begin(), c->factors.end());
      el_[x].alive = el_[v].alive = false;
      const int a = el_[x].op, b = el_[v].op;
      ++conn_[a * nops_ + b];
      ++conn_[b * nops_ + a];
      // the remnant is reordered with explicit parity, which already covers the hole sign of contract_pair
      const int channel = el_[x].creator ? -c->sign : c->sign;
      rec(w * mult, sign * channel * (between % 2 ? -1 : 1));
      --conn_[a * nops_ + b];
      --conn_[b * nops_ + a];
      el_[x].alive = el_[v].alive = true;
      contr_.resize(nc);
    }
  }
};

}  // namespace

ExprHandle wick(const ExprHandle& e, const WickOptions& opts, WickStats* stats) {
  const IndexSpaceRegistry& reg = opts.registry ? *opts.registry : default_registry();
  const auto terms = terms_of(expand(e));
  std::vector<std::vector<ExprHandle>> results(terms.size());
  std::vector<WickStats> st(terms.size());
  auto work = [&](std::size_t k) {
    Engine eng(opts, reg);
    results[k] = eng.run(terms[k], st[k]);
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(terms.size())));
  if (nt <= 1) {
    for (std::size_t k = 0; k < terms.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    for (unsigned t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < terms.size(); k += nt) work(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }
  std::vector<ExprHandle> all;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    all.insert(all.end(), results[k].begin(), results[k].end());
    if (stats) {
      stats->nodes += st[k].nodes;
      stats->terms += st[k].terms;
    }
  }
  return sum(std::move(all));
}

ExprHandle wick_full_pipeline(const ExprHandle& e, const WickOptions& opts, WickStats* stats) {
  SimplifyOptions so;
  so.registry = opts.registry;
  return simplify(reduce(wick(e, opts, stats), opts.registry), so);
}

}  // namespace tenet
