#include "tenet/canonicalize.hpp"
#include "tenet/expr.hpp"
#include "tenet/parser.hpp"

#include <algorithm>
#include <unordered_map>

namespace tenet {

namespace {

ExprHandle collect(const ExprHandle& e, const SimplifyOptions& opts, const IndexSpaceRegistry& reg) {
  Scalar constant_part;
  std::vector<std::pair<ExprHandle, Scalar>> terms;
  std::unordered_map<ExprHandle, std::size_t, ExprHandleHash> slot;
  for (const auto& t : terms_of(expand(e))) {
    if (t->is(ExprKind::constant)) {
      constant_part += t->scalar();
      continue;
    }
    auto ct = canonicalize_term(t, opts.lexicographic_sort, reg, opts.label_rank);
    if (ct.zero || ct.coefficient.is_zero()) continue;
    if (ct.factors.empty()) {
      constant_part += ct.coefficient;
      continue;
    }
    auto key = product(Scalar(1), ct.factors);
    auto [it, fresh] = slot.emplace(key, terms.size());
    if (fresh)
      terms.emplace_back(key, ct.coefficient);
    else
      terms[it->second].second += ct.coefficient;
  }
  std::vector<std::pair<std::string, ExprHandle>> keyed;
  for (auto& [key, c] : terms) {
    if (c.is_zero()) continue;
    keyed.emplace_back(serialize(key, reg), product(c, {key}));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ExprHandle> out;
  if (!constant_part.is_zero()) out.push_back(constant(constant_part));
  for (auto& k : keyed) out.push_back(k.second);
  return rapid_simplify(sum(std::move(out)));
}

}  // namespace

ExprHandle simplify(const ExprHandle& e, const SimplifyOptions& opts) {
  const IndexSpaceRegistry& reg = opts.registry ? *opts.registry : default_registry();
  ExprHandle cur = e;
  for (int iter = 0; iter < 16; ++iter) {
    ExprHandle next = collect(cur, opts, reg);
    if (next == cur) break;
    cur = next;
  }
  return cur;
}

}  // namespace tenet
