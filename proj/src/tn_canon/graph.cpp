#include "tenet/canonicalize.hpp"
#include "tenet/parser.hpp"

#include <cstdio>
#include <functional>
#include <sstream>

namespace tenet {

namespace {

std::string space_sig(const IndexSpace& s) {
  return s.label + "/" + std::to_string(s.type) + "/" + std::to_string(s.qn);
}

const char* kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::core: return "core";
    case VertexKind::braket: return "braket";
    case VertexKind::bra: return "bra";
    case VertexKind::ket: return "ket";
    case VertexKind::aux: return "aux";
    case VertexKind::column: return "column";
    case VertexKind::slot: return "slot";
    case VertexKind::index: return "index";
    case VertexKind::proto: return "proto";
    case VertexKind::extra: return "extra";
  }
  return "?";
}

struct FactorView {
  bool is_op = false;
  std::string label;
  const std::vector<Index>* bra = nullptr;
  const std::vector<Index>* ket = nullptr;
  const std::vector<Index>* aux = nullptr;
  Symmetry sym = Symmetry::antisymm;
  BraKetSymmetry braket = BraKetSymmetry::nonsymm;
  ColumnSymmetry column = ColumnSymmetry::nonsymm;
};

const std::vector<Index> kNoIndices;

FactorView view(const ExprHandle& f) {
  FactorView v;
  if (f->is(ExprKind::normal_operator)) {
    const auto& op = f->op();
    v.is_op = true;
    v.label = op.label();
    v.bra = &op.annihilators;
    v.ket = &op.creators;
    v.aux = &kNoIndices;
  } else if (f->is(ExprKind::tensor)) {
    const auto& t = f->tensor();
    v.label = t.label + (t.conjugated ? "*" : "");
    v.bra = &t.bra;
    v.ket = &t.ket;
    v.aux = &t.aux;
    v.sym = t.symmetry;
    v.braket = t.braket_symmetry;
    v.column = t.column_symmetry;
  } else {
    throw std::invalid_argument("tensor network factor must be a tensor or operator");
  }
  return v;
}

void collect_protos(const Index& idx, std::set<Index>& out) {
  for (const auto& p : idx.proto()) {
    out.insert(p);
    collect_protos(p, out);
  }
}

}  // namespace

std::set<Index> external_indices(const std::vector<ExprHandle>& factors) {
  std::map<Index, int> count;
  std::set<Index> protos;
  for (const auto& f : factors) {
    auto v = view(f);
    for (const auto* b : {v.bra, v.ket, v.aux})
      for (const auto& i : *b) {
        if (i.is_null()) continue;
        ++count[i];
        collect_protos(i, protos);
      }
  }
  std::set<Index> out;
  for (const auto& [i, n] : count)
    if (n == 1) out.insert(i);
  for (const auto& p : protos)
    if (!count.count(p)) out.insert(p);
  return out;
}

int TensorNetworkGraph::add_vertex(VertexKind kind, Color c) {
  GraphVertex v;
  v.kind = kind;
  v.color = c;
  vertices.push_back(std::move(v));
  return static_cast<int>(vertices.size()) - 1;
}

ColoredGraph TensorNetworkGraph::colored() const {
  ColoredGraph g;
  for (const auto& v : vertices) g.add_vertex(v.color);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

std::string TensorNetworkGraph::dot() const {
  std::ostringstream os;
  os << "graph tn {\n";
  char buf[32];
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(vertices[k].color));
    os << "  v" << k << " [label=\"" << kind_name(vertices[k].kind) << ":" << buf;
    if (vertices[k].kind == VertexKind::index) os << "\\n" << serialize(vertices[k].index);
    os << "\"];\n";
  }
  for (auto [a, b] : edges) os << "  v" << a << " -- v" << b << ";\n";
  os << "}\n";
  return os.str();
}

bool can_contract(const NormalOperator& left, const NormalOperator& right, const IndexSpaceRegistry& reg) {
  if (left.vacuum != right.vacuum) throw std::invalid_argument("operators with different vacua");
  if (left.vacuum == Vacuum::genuine) {
    for (const auto& q : left.annihilators)
      for (const auto& r : right.creators)
        if (q.space().overlaps(r.space())) return true;
    return false;
  }
  const std::uint32_t unocc = reg.unoccupied_mask() | reg.mixed_mask();
  const std::uint32_t occ = reg.occupied_mask() | reg.mixed_mask();
  for (const auto& q : left.annihilators)
    for (const auto& r : right.creators)
      if (q.space().type & r.space().type & unocc) return true;
  for (const auto& q : left.creators)
    for (const auto& r : right.annihilators)
      if (q.space().type & r.space().type & occ) return true;
  return false;
}

bool ops_commute(const NormalOperator& a, const NormalOperator& b, const IndexSpaceRegistry& reg) {
  return !can_contract(a, b, reg) && !can_contract(b, a, reg);
}

TensorNetworkGraph build_graph(const TensorNetwork& tn, const GraphOptions& opts) {
  const IndexSpaceRegistry& reg = opts.registry ? *opts.registry : default_registry();
  TensorNetworkGraph g;
  std::map<Index, int> nbra, nket;

  std::function<int(const Index&)> index_vertex = [&](const Index& idx) -> int {
    auto it = g.index_vertex.find(idx);
    if (it != g.index_vertex.end()) return it->second;
    Color c;
    const bool named = tn.named.count(idx) != 0;
    if (named && opts.anonymous_named)
      c = color("ext:" + space_sig(idx.space()));
    else if (named)
      c = color("named:" + space_sig(idx.space()) + ":" + idx.full_label());
    else
      c = color("index:" + space_sig(idx.space()));
    int v = g.add_vertex(VertexKind::index, c);
    g.vertices[v].index = idx;
    g.index_vertex.emplace(idx, v);
    return v;
  };

  for (std::size_t f = 0; f < tn.factors.size(); ++f) {
    const auto fv = view(tn.factors[f]);
    FactorVertices out;
    const Color core = color("core:" + fv.label);
    out.core = g.add_vertex(VertexKind::core, core);
    g.vertices[out.core].factor = static_cast<int>(f);
    out.braket = g.add_vertex(VertexKind::braket, ccolor("braket", core));
    g.add_edge(out.core, out.braket);
    const bool bk = fv.braket == BraKetSymmetry::symm;
    out.bra = g.add_vertex(VertexKind::bra, ccolor(bk ? "bra/ket" : "bra", core));
    out.ket = g.add_vertex(VertexKind::ket, ccolor(bk ? "bra/ket" : "ket", core));
    g.add_edge(out.braket, out.bra);
    g.add_edge(out.braket, out.ket);
    if (!fv.aux->empty()) {
      out.aux = g.add_vertex(VertexKind::aux, ccolor("aux", core));
      g.add_edge(out.core, out.aux);
    }
    const bool columns = !fv.is_op && fv.sym == Symmetry::nonsymm;
    const bool positional = fv.sym == Symmetry::nonsymm && fv.column == ColumnSymmetry::nonsymm;
    if (columns) {
      const std::size_t ncol = std::max(fv.bra->size(), fv.ket->size());
      for (std::size_t k = 0; k < ncol; ++k) {
        Color c = fv.column == ColumnSymmetry::symm ? ccolor("column", core)
                                                    : ccolor(ccolor("column", color(k)), core);
        int v = g.add_vertex(VertexKind::column, c);
        g.vertices[v].factor = static_cast<int>(f);
        g.vertices[v].position = static_cast<int>(k);
        g.add_edge(out.core, v);
        out.columns.push_back(v);
      }
    }

    auto add_slots = [&](const std::vector<Index>& idx, BundleKind kind, int bundle_vertex, std::vector<int>& slots) {
      std::string name = kind == BundleKind::aux ? "slot:aux" : bk ? "slot:bra/ket" : kind == BundleKind::bra ? "slot:bra" : "slot:ket";
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k].is_null()) {
          slots.push_back(-1);
          continue;
        }
        const bool pos = kind == BundleKind::aux || positional;
        Color c = ccolor(ccolor(name, color(pos ? k + 1 : 0)), core);
        if (opts.slot_salt) c = ccolor(opts.slot_salt(static_cast<int>(f), kind, static_cast<int>(k)), c);
        int v = g.add_vertex(VertexKind::slot, c);
        auto& gv = g.vertices[v];
        gv.factor = static_cast<int>(f);
        gv.bundle = kind;
        gv.position = static_cast<int>(k);
        gv.index = idx[k];
        g.add_edge(bundle_vertex, v);
        if (columns && kind != BundleKind::aux) g.add_edge(out.columns[k], v);
        g.add_edge(v, index_vertex(idx[k]));
        slots.push_back(v);
        if (bk) continue;  // bra/ket-symmetric tensors carry no variance
        if (kind == BundleKind::bra && ++nbra[idx[k]] > 1)
          throw CovarianceError("index " + idx[k].full_label() + " occupies more than one bra slot");
        if (kind == BundleKind::ket && ++nket[idx[k]] > 1)
          throw CovarianceError("index " + idx[k].full_label() + " occupies more than one ket slot");
      }
    };
    add_slots(*fv.bra, BundleKind::bra, out.bra, out.bra_slots);
    add_slots(*fv.ket, BundleKind::ket, out.ket, out.ket_slots);
    if (out.aux >= 0) add_slots(*fv.aux, BundleKind::aux, out.aux, out.aux_slots);
    g.factors.push_back(std::move(out));
  }

  // protoindex bundles; the loop may add constituent index vertices, so iterate by position
  std::map<std::vector<Index>, int> bundles;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (g.vertices[v].kind != VertexKind::index) continue;
    const Index idx = g.vertices[v].index;
    if (!idx.has_proto()) continue;
    auto it = bundles.find(idx.proto());
    int pv;
    if (it == bundles.end()) {
      std::string sig = "proto";
      for (const auto& p : idx.proto()) sig += ":" + space_sig(p.space());
      pv = g.add_vertex(VertexKind::proto, color(sig));
      bundles.emplace(idx.proto(), pv);
      for (const auto& p : idx.proto()) g.add_edge(pv, index_vertex(p));
    } else {
      pv = it->second;
    }
    g.add_edge(pv, static_cast<int>(v));
  }

  if (opts.order_gadgets) {
    for (std::size_t i = 0; i < tn.factors.size(); ++i) {
      if (!tn.factors[i]->is(ExprKind::normal_operator)) continue;
      for (std::size_t j = i + 1; j < tn.factors.size(); ++j) {
        if (!tn.factors[j]->is(ExprKind::normal_operator)) continue;
        if (ops_commute(tn.factors[i]->op(), tn.factors[j]->op(), reg)) continue;
        int l = g.add_vertex(VertexKind::extra, color("order:L"));
        int r = g.add_vertex(VertexKind::extra, color("order:R"));
        g.add_edge(g.factors[i].core, l);
        g.add_edge(l, r);
        g.add_edge(r, g.factors[j].core);
      }
    }
  }
  return g;
}

}  // namespace tenet
