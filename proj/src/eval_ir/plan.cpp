#include "tenet/canonicalize.hpp"
#include "tenet/ir.hpp"
#include "tenet/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tenet {

Extents registry_extents(const IndexSpaceRegistry& reg) {
  return [&reg](const IndexSpace& s) { return reg.extent(s); };
}

std::string hex_identity(std::uint64_t id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id));
  return buf;
}

double total_flops(const IRNode& n) {
  double f = n.flops;
  for (const auto& c : n.children) f += total_flops(*c);
  return f;
}

namespace {

void add_with_protos(const Index& i, std::set<Index>& out) {
  if (i.is_null()) return;
  out.insert(i);
  for (const auto& p : i.proto()) add_with_protos(p, out);
}

std::set<Index> atom_indices(const ExprHandle& f) {
  std::set<Index> out;
  if (f->is(ExprKind::tensor))
    for (const auto& i : f->tensor().slots()) add_with_protos(i, out);
  return out;
}

// one DP operand: an atom for graph identity plus the IR subtree that computes it
struct Operand {
  ExprHandle atom;
  ExprHandle source;
  IRPtr sub;  // set for nested sums
  std::set<Index> indices;
};

Color hash_mix(Color h, std::uint64_t x) { return ccolor(color(x), h); }

IRPtr make_scale(const Scalar& s, IRPtr child) {
  auto n = std::make_shared<IRNode>();
  n->kind = IRKind::scale;
  n->factor = s;
  n->layout = child->layout;
  n->expr = product(s, {child->expr});
  n->identity = hash_mix(hash_mix(ccolor("scale:" + s.str(), child->identity), child->phase + 1), 0);
  n->children.push_back(std::move(child));
  return n;
}

std::size_t count_elements(const std::vector<Index>& layout, const Extents& ext) {
  std::size_t n = 1;
  for (const auto& i : layout) n *= ext(i.space());
  return n;
}

IRPtr make_sum(IRPtr l, IRPtr r, const Extents& ext) {
  std::set<Index> a(l->layout.begin(), l->layout.end()), b(r->layout.begin(), r->layout.end());
  if (a != b) throw std::invalid_argument("summands have different external indices");
  auto n = std::make_shared<IRNode>();
  n->kind = IRKind::sum;
  n->layout = l->layout;
  n->expr = l->expr + r->expr;
  n->flops = static_cast<double>(count_elements(n->layout, ext));
  // identity from the flattened summands relative to this layout
  std::vector<std::tuple<std::uint64_t, int, std::vector<int>>> desc;
  std::function<void(const IRPtr&)> flat = [&](const IRPtr& c) {
    if (c->kind == IRKind::sum) {
      for (const auto& k : c->children) flat(k);
      return;
    }
    std::vector<int> pos;
    for (const auto& i : c->layout)
      pos.push_back(static_cast<int>(std::find(n->layout.begin(), n->layout.end(), i) - n->layout.begin()));
    desc.emplace_back(c->identity, c->phase, std::move(pos));
  };
  flat(l);
  flat(r);
  std::sort(desc.begin(), desc.end());
  Color h = color("sum");
  for (const auto& [id, ph, pos] : desc) {
    h = hash_mix(hash_mix(h, id), static_cast<std::uint64_t>(ph + 1));
    for (int p : pos) h = hash_mix(h, static_cast<std::uint64_t>(p));
  }
  n->identity = h;
  n->children = {std::move(l), std::move(r)};
  return n;
}

IRPtr make_permute(IRPtr child, const std::vector<Index>& target) {
  std::set<Index> a(child->layout.begin(), child->layout.end()), b(target.begin(), target.end());
  if (a != b || target.size() != child->layout.size())
    throw std::invalid_argument("target layout is not a permutation of the result indices");
  auto n = std::make_shared<IRNode>();
  n->kind = IRKind::permute;
  n->layout = target;
  n->expr = child->expr;
  Color h = ccolor("permute", child->identity);
  h = hash_mix(h, static_cast<std::uint64_t>(child->phase + 1));
  for (const auto& i : target)
    h = hash_mix(h, static_cast<std::uint64_t>(std::find(child->layout.begin(), child->layout.end(), i) -
                                               child->layout.begin()));
  n->identity = h;
  n->children.push_back(std::move(child));
  return n;
}

std::set<Index> external_set(const ExprHandle& term) {
  std::vector<ExprHandle> net;
  auto [c, fs] = split_term(term);
  for (const auto& f : fs) {
    if (f->is(ExprKind::tensor)) net.push_back(f);
    if (f->is(ExprKind::sum)) {
      // a nested sum acts as one tensor over its externals
      auto ext = external_set(terms_of(f).front());
      Tensor t;
      t.label = "{sum}";
      t.aux.assign(ext.begin(), ext.end());
      net.push_back(make_tensor(std::move(t)));
    }
  }
  return external_indices(net);
}

class Planner {
 public:
  Planner(std::vector<Operand> ops, std::set<Index> keep, const Extents& ext, const IndexSpaceRegistry* reg)
      : ops_(std::move(ops)), keep_(std::move(keep)), ext_(ext), reg_(reg) {
    n_ = static_cast<int>(ops_.size());
    const std::size_t full = (std::size_t{1} << n_);
    idx_.resize(full);
    for (std::size_t m = 1; m < full; ++m) {
      int low = __builtin_ctzll(m);
      idx_[m] = idx_[m & (m - 1)];
      idx_[m].insert(ops_[low].indices.begin(), ops_[low].indices.end());
    }
    kept_.resize(full);
    for (std::size_t m = 1; m < full; ++m) {
      std::set<Index> outside = keep_;
      const std::size_t rest = (full - 1) ^ m;
      if (rest) outside.insert(idx_[rest].begin(), idx_[rest].end());
      std::set<Index> k;
      for (const auto& i : idx_[m])
        if (outside.count(i)) add_with_protos(i, k);
      kept_[m] = std::move(k);
    }
    cost_.assign(full, -1);
    split_.assign(full, 0);
    ident_.resize(full);
  }

  IRPtr run() {
    if (n_ == 0) throw std::invalid_argument("binarize_tnco: no factors");
    const std::size_t full = (std::size_t{1} << n_) - 1;
    solve(full);
    return build(full);
  }

 private:
  double pair_cost(std::size_t a, std::size_t b) const {
    std::set<Index> u = kept_[a];
    u.insert(kept_[b].begin(), kept_[b].end());
    double c = 1;
    for (const auto& i : u) c *= static_cast<double>(ext_(i.space()));
    return c;
  }

  const NodeIdentity& ident(std::size_t m) {
    if (!ident_[m]) {
      std::vector<ExprHandle> atoms;
      for (int k = 0; k < n_; ++k)
        if (m >> k & 1) atoms.push_back(ops_[k].atom);
      ident_[m] = network_identity(atoms, kept_[m], reg_);
    }
    return *ident_[m];
  }

  // canonical ranks (within m) of the factors in sub
  std::vector<int> ranks(std::size_t m, std::size_t sub) {
    const auto& fr = ident(m).factor_rank;
    std::vector<int> out;
    int pos = 0;
    for (int k = 0; k < n_; ++k) {
      if (!(m >> k & 1)) continue;
      if (sub >> k & 1) out.push_back(fr.at(pos));
      ++pos;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // smaller identity goes left; equal identities by canonical rank so equivalent networks agree
  std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) {
    const auto ia = ident(a).id, ib = ident(b).id;
    if (ib < ia || (ib == ia && ranks(a | b, b) < ranks(a | b, a))) return {b, a};
    return {a, b};
  }

  // tie between two splits of m
  bool better(std::size_t m, std::size_t a, std::size_t best) {
    auto [l0, r0] = ordered(best, m ^ best);
    auto [l1, r1] = ordered(a, m ^ a);
    const auto k0 = std::make_pair(ident(l0).id, ident(r0).id), k1 = std::make_pair(ident(l1).id, ident(r1).id);
    if (k1 != k0) return k1 < k0;
    return ranks(m, l1) < ranks(m, l0);
  }

  double solve(std::size_t m) {
    if (cost_[m] >= 0) return cost_[m];
    if ((m & (m - 1)) == 0) return cost_[m] = 0;
    const std::size_t low = m & (~m + 1);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_split = 0;
    for (std::size_t a = (m - 1) & m; a; a = (a - 1) & m) {
      if (!(a & low)) continue;
      const std::size_t b = m ^ a;
      const double c = solve(a) + solve(b) + pair_cost(a, b);
      if (c < best) {
        best = c;
        best_split = a;
      } else if (c == best && better(m, a, best_split)) {
        best_split = a;
      }
    }
    split_[m] = best_split;
    return cost_[m] = best;
  }

  IRPtr build(std::size_t m) {
    const auto& id = ident(m);
    if ((m & (m - 1)) == 0) {
      const Operand& op = ops_[__builtin_ctzll(m)];
      if (op.sub) return op.sub;
      auto n = std::make_shared<IRNode>();
      n->kind = IRKind::leaf;
      n->expr = op.source;
      n->identity = id.id;
      n->phase = id.phase;
      n->layout = id.layout;
      return n;
    }
    auto [l, r] = ordered(split_[m], m ^ split_[m]);
    auto n = std::make_shared<IRNode>();
    n->kind = IRKind::product;
    n->children = {build(l), build(r)};
    std::vector<ExprHandle> src;
    for (int k = 0; k < n_; ++k)
      if (m >> k & 1) src.push_back(ops_[k].source);
    n->expr = product(std::move(src));
    n->identity = id.id;
    n->phase = id.phase;
    n->layout = id.layout;
    n->flops = pair_cost(l, r);
    return n;
  }

  std::vector<Operand> ops_;
  std::set<Index> keep_;
  const Extents& ext_;
  const IndexSpaceRegistry* reg_;
  int n_ = 0;
  std::vector<std::set<Index>> idx_, kept_;
  std::vector<double> cost_;
  std::vector<std::size_t> split_;
  std::vector<std::optional<NodeIdentity>> ident_;
};

IRPtr lower_sum(const ExprHandle& e, const Extents& ext, const IndexSpaceRegistry* reg);

IRPtr lower_term(const ExprHandle& term, const Extents& ext, const IndexSpaceRegistry* reg,
                 const std::optional<std::set<Index>>& keep) {
  auto [coef, factors] = split_term(term);
  std::vector<Operand> ops;
  for (const auto& f : factors) {
    Operand op;
    op.source = f;
    switch (f->kind()) {
      case ExprKind::tensor:
        op.atom = f;
        op.indices = atom_indices(f);
        break;
      case ExprKind::variable: {
        Tensor t;
        t.label = "$" + f->variable().name;
        op.atom = make_tensor(std::move(t));
        break;
      }
      case ExprKind::sum: {
        op.sub = lower_sum(f, ext, reg);
        Tensor t;
        t.label = "{sum:" + hex_identity(op.sub->identity) + "}";
        t.aux = op.sub->layout;
        op.atom = make_tensor(std::move(t));
        for (const auto& i : op.sub->layout) add_with_protos(i, op.indices);
        break;
      }
      case ExprKind::normal_operator:
        throw std::invalid_argument("operators have no numeric value; apply Wick's theorem first");
      default:
        throw std::invalid_argument("unexpected factor in product term");
    }
    ops.push_back(std::move(op));
  }
  IRPtr root;
  if (ops.empty()) {
    root = std::make_shared<IRNode>();
    root->kind = IRKind::leaf;
    root->expr = constant(1);
    root->identity = color("unit");
  } else {
    Planner p(std::move(ops), keep ? *keep : external_set(term), ext, reg);
    root = p.run();
  }
  return make_scale(coef, root);
}

IRPtr lower_sum(const ExprHandle& e, const Extents& ext, const IndexSpaceRegistry* reg) {
  IRPtr acc;
  for (const auto& t : terms_of(e)) {
    IRPtr n = lower_term(t, ext, reg, std::nullopt);
    acc = acc ? make_sum(acc, n, ext) : n;
  }
  return acc;
}

void to_json(nlohmann::json& arr, const IRPtr& n, std::map<const IRNode*, int>& ids) {
  if (ids.count(n.get())) return;
  std::vector<int> kids;
  for (const auto& c : n->children) {
    to_json(arr, c, ids);
    kids.push_back(ids.at(c.get()));
  }
  static const char* kinds[] = {"leaf", "sum", "product", "permute", "scale"};
  nlohmann::json j;
  j["id"] = static_cast<int>(arr.size());
  j["kind"] = kinds[static_cast<int>(n->kind)];
  j["identity"] = hex_identity(n->identity);
  std::vector<std::string> lay;
  for (const auto& i : n->layout) lay.push_back(serialize(i));
  j["layout"] = lay;
  j["flops"] = n->flops;
  j["phase"] = n->phase;
  j["reuse"] = n->reuse >= 0 ? nlohmann::json(n->reuse) : nlohmann::json(nullptr);
  j["children"] = kids;
  if (n->kind == IRKind::scale) j["factor"] = n->factor.str();
  if (n->kind == IRKind::leaf || n->kind == IRKind::product) j["expr"] = serialize(n->expr);
  ids[n.get()] = static_cast<int>(arr.size());
  arr.push_back(std::move(j));
}

}  // namespace

IRPtr binarize_tnco(const ExprHandle& term, const Extents& extents, const IndexSpaceRegistry* reg,
                    const std::optional<std::set<Index>>& keep) {
  auto n = lower_term(term, extents, reg, keep);
  // strip the coefficient wrapper when trivial
  if (n->factor.is_one()) return n->children.front();
  return n;
}

IRPtr lower(const ExprHandle& e, const Extents& extents, const IndexSpaceRegistry* reg,
            const std::optional<std::vector<Index>>& target) {
  IRPtr root = lower_sum(e, extents, reg);
  std::vector<Index> t;
  if (target) {
    t = *target;
  } else {
    auto ext = external_set(terms_of(e).front());
    t.assign(ext.begin(), ext.end());
  }
  if (t != root->layout || root->phase != 1) root = make_permute(root, t);
  return root;
}

std::string plan_json(const Plan& p, const IndexSpaceRegistry&) {
  nlohmann::json out;
  nlohmann::json nodes = nlohmann::json::array();
  std::map<const IRNode*, int> ids;
  std::vector<int> roots;
  double flops = 0;
  for (const auto& r : p.roots) {
    to_json(nodes, r, ids);
    roots.push_back(ids.at(r.get()));
    flops += total_flops(*r);
  }
  out["nodes"] = std::move(nodes);
  out["roots"] = roots;
  out["total_flops"] = flops;
  out["shared"] = p.shared;
  return out.dump(2);
}

}  // namespace tenet
