#include "tenet/interp.hpp"
#include "tenet/parser.hpp"

#include <bit>

namespace tenet {

std::optional<Result> CacheManager::lookup(std::uint64_t id) {
  if (!enabled_) return std::nullopt;
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  ++hits_;
  Result r = it->second.value;
  if (--it->second.remaining <= 0) entries_.erase(it);
  return r;
}

void CacheManager::store(std::uint64_t id, const Result& r) {
  if (!enabled_) return;
  auto u = uses_.find(id);
  const int remaining = (u == uses_.end() ? 1 : u->second) - 1;
  if (remaining <= 0) return;
  entries_[id] = Entry{r, remaining};
  peak_ = std::max(peak_, entries_.size());
}

namespace {

double real_value(const Scalar& s) {
  if (!s.is_real()) throw EvalError("complex coefficients are not supported by the dense backend");
  return s.to_double();
}

std::vector<Index> slot_labels(const Tensor& t) {
  std::vector<Index> out;
  for (const auto& i : t.slots())
    if (!i.is_null()) out.push_back(i);
  return out;
}

Result eval_leaf(const IRNode& n, const LeafEvaluator& leaves, const Extents& extents) {
  const auto& e = n.expr;
  if (e->is(ExprKind::constant)) return Result(real_value(e->scalar()));
  if (e->is(ExprKind::variable)) {
    Result r = leaves(e);
    if (!r.is_scalar()) throw EvalError("variable " + e->variable().name + " evaluated to a tensor");
    return r;
  }
  if (!e->is(ExprKind::tensor)) throw EvalError("leaf is not a tensor");
  const auto labels = slot_labels(e->tensor());
  for (const auto& i : labels)
    if (i.has_proto())
      throw EvalError("tensor " + serialize(e) +
                      " has protoindices; tensors of tensors are symbolic only and cannot be evaluated");
  Result data = leaves(e);
  const auto ext = data.extents();
  if (ext.size() != labels.size())
    throw EvalError("leaf " + serialize(e) + " has rank " + std::to_string(ext.size()) + ", expected " +
                    std::to_string(labels.size()));
  for (std::size_t k = 0; k < ext.size(); ++k)
    if (ext[k] != extents(labels[k].space()))
      throw EvalError("extent mismatch for " + serialize(labels[k]) + " in leaf " + serialize(e));
  Result r = einsum({&data}, {labels}, n.layout);
  return n.phase < 0 ? scale(r, -1) : r;
}

Result actual(const IRNode& c, Result r) { return c.phase < 0 ? scale(r, -1) : r; }

}  // namespace

Result evaluate(const IRNode& n, const LeafEvaluator& leaves, const Extents& extents, CacheManager* cache,
                EvalStats* stats) {
  const bool cached = cache && cache->enabled() && n.reuse >= 0;
  if (cached)
    if (auto r = cache->lookup(n.identity)) return *r;
  auto eval = [&](const IRPtr& c) { return actual(*c, evaluate(*c, leaves, extents, cache, stats)); };
  Result out;
  switch (n.kind) {
    case IRKind::leaf:
      if (stats) ++stats->leaves;
      out = eval_leaf(n, leaves, extents);
      break;
    case IRKind::product: {
      const auto& l = *n.children.at(0);
      const auto& r = *n.children.at(1);
      Result a = eval(n.children[0]);
      Result b = eval(n.children[1]);
      out = dense_product(a, l.layout, b, r.layout, n.layout);
      if (n.phase < 0) out = scale(out, -1);
      if (stats) {
        ++stats->products;
        ++stats->product_evals[n.identity];
      }
      break;
    }
    case IRKind::sum: {
      Result a = eval(n.children.at(0));
      Result b = eval(n.children.at(1));
      out = add(permute_to(a, n.children[0]->layout, n.layout), permute_to(b, n.children[1]->layout, n.layout));
      if (stats) ++stats->sums;
      break;
    }
    case IRKind::scale: {
      Result a = eval(n.children.at(0));
      const double s = real_value(n.factor);
      out = s == 1 ? a : scale(a, s);
      break;
    }
    case IRKind::permute: {
      Result a = eval(n.children.at(0));
      out = permute_to(a, n.children[0]->layout, n.layout);
      break;
    }
  }
  if (cached) cache->store(n.identity, out);
  return out;
}

std::map<std::uint32_t, std::vector<std::size_t>> space_positions(const IndexSpaceRegistry& reg) {
  std::map<int, std::pair<std::size_t, std::size_t>> range;  // bit -> (offset, extent)
  std::vector<std::pair<int, std::size_t>> bases;
  for (const auto& s : reg.spaces())
    if (reg.is_base(s)) bases.emplace_back(std::countr_zero(s.type), reg.extent(s));
  std::sort(bases.begin(), bases.end());
  std::size_t off = 0;
  for (auto [bit, n] : bases) {
    range[bit] = {off, n};
    off += n;
  }
  std::map<std::uint32_t, std::vector<std::size_t>> out;
  for (const auto& s : reg.spaces()) {
    std::vector<std::size_t> p;
    for (const auto& [bit, r] : range)
      if (s.type >> bit & 1)
        for (std::size_t k = 0; k < r.second; ++k) p.push_back(r.first + k);
    out[s.type] = std::move(p);
  }
  return out;
}

LeafEvaluator block_leaves(std::map<std::string, Result> tensors, const IndexSpaceRegistry& reg,
                           std::map<std::string, double> variables) {
  auto positions = space_positions(reg);
  return [tensors = std::move(tensors), variables = std::move(variables), positions = std::move(positions),
          &reg](const ExprHandle& atom) -> Result {
    if (atom->is(ExprKind::variable)) {
      auto it = variables.find(atom->variable().name);
      if (it == variables.end()) throw EvalError("no value for variable " + atom->variable().name);
      return Result(it->second);
    }
    const Tensor& t = atom->tensor();
    const auto labels = slot_labels(t);
    std::vector<std::size_t> ext;
    std::string key = t.label + "[";
    for (std::size_t k = 0; k < labels.size(); ++k) {
      ext.push_back(reg.extent(labels[k].space()));
      key += (k ? "," : "") + labels[k].space().label;
    }
    key += "]";
    if (t.label == kDeltaLabel && labels.size() == 2) {
      DenseTensor d(ext);
      const auto& pa = positions.at(labels[0].space().type);
      const auto& pb = positions.at(labels[1].space().type);
      for (std::size_t u = 0; u < pa.size(); ++u)
        for (std::size_t v = 0; v < pb.size(); ++v)
          if (pa[u] == pb[v]) d.at({u, v}) = 1;
      return Result(std::move(d));
    }
    auto it = tensors.find(key);
    if (it == tensors.end()) it = tensors.find(t.label);
    if (it == tensors.end()) throw EvalError("no data for leaf tensor " + serialize(atom));
    if (it->second.extents() != ext) throw EvalError("extent mismatch for leaf tensor " + serialize(atom));
    return it->second;
  };
}

}  // namespace tenet
