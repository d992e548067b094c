#include "tenet/parser.hpp"

namespace tenet {

std::string serialize(const Index& i) { return i.is_null() ? "_" : i.full_label(); }

namespace {

std::string index_list(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t k = 0; k != v.size(); ++k) {
    if (k) s += ",";
    s += serialize(v[k]);
  }
  return s;
}

bool negative_real(const Scalar& s) { return s.is_real() && s.real() < 0; }

struct Writer {
  const IndexSpaceRegistry& reg;

  std::string atom(const ExprHandle& e) const {
    switch (e->kind()) {
      case ExprKind::constant: return e->scalar().str();
      case ExprKind::variable: return e->variable().name;
      case ExprKind::normal_operator: {
        const auto& o = e->op();
        return std::string(o.label()) + "{" + index_list(o.annihilators) + ";" + index_list(o.creators) + "}";
      }
      case ExprKind::tensor: {
        const auto& t = e->tensor();
        std::string s = t.label;
        if (t.conjugated) s += "*";
        s += "{" + index_list(t.bra) + ";" + index_list(t.ket);
        if (!t.aux.empty()) s += ";" + index_list(t.aux);
        s += "}";
        SymmetrySpec dflt = default_symmetry(t.label);
        if (auto d = reg.symmetry_default(t.label)) dflt = parse_symtag(*d);
        SymmetrySpec have{t.symmetry, t.braket_symmetry, t.column_symmetry};
        if (!(have == dflt)) s += ":" + symtag(have);
        return s;
      }
      default: return expr(e);
    }
  }

  std::string factor(const ExprHandle& e) const {
    if (e->is(ExprKind::sum)) return "(" + expr(e) + ")";
    return atom(e);
  }

  // product body without its sign when `drop_sign`
  std::string product_body(const ExprHandle& e, bool drop_sign) const {
    Scalar pf = e->scalar();
    if (drop_sign) pf = -pf;
    std::string s;
    if (pf == Scalar(-1)) {
      s = "-";
    } else if (!pf.is_one()) {
      s = pf.str();
    }
    for (const auto& f : e->children()) {
      if (!s.empty() && s != "-") s += " ";
      else if (s == "-") s += " ";
      s += factor(f);
    }
    return s;
  }

  std::string term(const ExprHandle& t, bool first) const {
    bool neg = false;
    if (t->is(ExprKind::product)) neg = negative_real(t->scalar());
    else if (t->is(ExprKind::constant)) neg = negative_real(t->scalar());
    if (first) {
      if (t->is(ExprKind::product)) return product_body(t, false);
      return atom(t);
    }
    if (!neg) return " + " + (t->is(ExprKind::product) ? product_body(t, false) : atom(t));
    if (t->is(ExprKind::constant)) return " - " + (-t->scalar()).str();
    return " - " + product_body(t, true);
  }

  std::string expr(const ExprHandle& e) const {
    if (e->is(ExprKind::sum)) {
      std::string s;
      for (std::size_t k = 0; k != e->size(); ++k) s += term(e->children()[k], k == 0);
      return s;
    }
    if (e->is(ExprKind::product)) return product_body(e, false);
    return atom(e);
  }
};

}  // namespace

std::string serialize(const ExprHandle& e, const IndexSpaceRegistry& reg) { return Writer{reg}.expr(e); }

}  // namespace tenet
