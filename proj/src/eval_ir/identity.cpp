#include "tenet/canonicalize.hpp"
#include "tenet/ir.hpp"

#include <algorithm>
#include <tuple>

namespace tenet {

NodeIdentity network_identity(const std::vector<ExprHandle>& factors, const std::set<Index>& keep,
                              const IndexSpaceRegistry* reg) {
  NodeIdentity out;
  if (factors.empty()) {
    out.id = color("network:empty");
    return out;
  }
  TensorNetwork tn{factors, keep};
  CanonicalizeOptions opts;
  opts.anonymous_named = true;
  opts.registry = reg;
  auto r = canonicalize_network(tn, opts);
  out.id = r.identity;
  out.phase = r.phase;
  out.layout = std::move(r.named_order);
  out.factor_rank = std::move(r.factor_rank);
  return out;
}

namespace {

Color scalar_color(const Scalar& s) { return color("scalar:" + s.str()); }

}  // namespace

NodeIdentity canonical_identity(const ExprHandle& e, const IndexSpaceRegistry* reg) {
  switch (e->kind()) {
    case ExprKind::constant: return {scalar_color(e->scalar()), 1, {}};
    case ExprKind::variable: return {color("variable:" + e->variable().name), 1, {}};
    case ExprKind::tensor:
    case ExprKind::normal_operator: {
      std::vector<ExprHandle> f{e};
      return network_identity(f, external_indices(f), reg);
    }
    case ExprKind::product: {
      std::vector<ExprHandle> net;
      std::vector<std::string> vars;
      for (const auto& f : e->children()) {
        if (f->is(ExprKind::variable))
          vars.push_back(f->variable().name);
        else if (f->is(ExprKind::tensor) || f->is(ExprKind::normal_operator))
          net.push_back(f);
        else
          throw std::invalid_argument("canonical_identity: product factors must be atoms");
      }
      std::sort(vars.begin(), vars.end());
      auto out = network_identity(net, external_indices(net), reg);
      Color h = ccolor(scalar_color(e->scalar()), out.id);
      for (const auto& v : vars) h = ccolor(color("variable:" + v), h);
      out.id = h;
      return out;
    }
    case ExprKind::sum: {
      std::set<Index> ext;
      std::vector<NodeIdentity> kids;
      for (const auto& t : e->children()) {
        kids.push_back(canonical_identity(t, reg));
        for (const auto& i : kids.back().layout) ext.insert(i);
      }
      NodeIdentity out;
      out.layout.assign(ext.begin(), ext.end());
      std::vector<std::tuple<std::uint64_t, int, std::vector<int>>> desc;
      for (const auto& k : kids) {
        std::vector<int> pos;
        for (const auto& i : k.layout)
          pos.push_back(static_cast<int>(std::find(out.layout.begin(), out.layout.end(), i) - out.layout.begin()));
        desc.emplace_back(k.id, k.phase, std::move(pos));
      }
      std::sort(desc.begin(), desc.end());
      Color h = color("sum");
      for (const auto& [id, ph, pos] : desc) {
        h = ccolor(color(id), ccolor(color(static_cast<std::uint64_t>(ph + 1)), h));
        for (int p : pos) h = ccolor(color(static_cast<std::uint64_t>(p)), h);
      }
      out.id = h;
      return out;
    }
  }
  return {};
}

}  // namespace tenet
