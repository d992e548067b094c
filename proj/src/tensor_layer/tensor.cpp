#include "tenet/expr.hpp"
#include "tenet/tensor.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tenet {

std::vector<Index> Tensor::slots() const {
  std::vector<Index> s;
  s.reserve(rank());
  s.insert(s.end(), bra.begin(), bra.end());
  s.insert(s.end(), ket.begin(), ket.end());
  s.insert(s.end(), aux.begin(), aux.end());
  return s;
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.label == b.label && a.symmetry == b.symmetry && a.braket_symmetry == b.braket_symmetry &&
         a.column_symmetry == b.column_symmetry && a.conjugated == b.conjugated && a.bra == b.bra &&
         a.ket == b.ket && a.aux == b.aux;
}

SymmetrySpec default_symmetry(const std::string& label) {
  SymmetrySpec s;
  if (label == kDeltaLabel || label == kOverlapLabel) s.braket = BraKetSymmetry::symm;
  return s;
}

SymmetrySpec parse_symtag(const std::string& tag) {
  SymmetrySpec s;
  auto bad = [&] { return std::invalid_argument("malformed symmetry tag '" + tag + "'"); };
  if (tag.empty()) throw bad();
  std::vector<char> parts;
  for (std::size_t k = 0; k < tag.size(); ++k) {
    if (k % 2 == 1) {
      if (tag[k] != '-') throw bad();
      continue;
    }
    parts.push_back(tag[k]);
  }
  if (tag.size() % 2 == 0 || parts.size() > 3) throw bad();
  switch (parts[0]) {
    case 'A': s.symmetry = Symmetry::antisymm; break;
    case 'S': s.symmetry = Symmetry::symm; break;
    case 'N': s.symmetry = Symmetry::nonsymm; break;
    default: throw bad();
  }
  if (parts.size() > 1) switch (parts[1]) {
      case 'C': s.braket = BraKetSymmetry::conjugate; break;
      case 'S': s.braket = BraKetSymmetry::symm; break;
      case 'N': s.braket = BraKetSymmetry::nonsymm; break;
      default: throw bad();
    }
  if (parts.size() > 2) switch (parts[2]) {
      case 'S': s.column = ColumnSymmetry::symm; break;
      case 'N': s.column = ColumnSymmetry::nonsymm; break;
      default: throw bad();
    }
  return s;
}

std::string symtag(const SymmetrySpec& s) {
  std::string t;
  t += s.symmetry == Symmetry::antisymm ? 'A' : s.symmetry == Symmetry::symm ? 'S' : 'N';
  t += '-';
  t += s.braket == BraKetSymmetry::conjugate ? 'C' : s.braket == BraKetSymmetry::symm ? 'S' : 'N';
  if (s.column == ColumnSymmetry::symm) t += "-S";
  else if (t.back() == 'N') t.resize(1);
  return t;
}

int permutation_parity(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int parity = 1;
  for (std::size_t k = 0; k != perm.size(); ++k) {
    if (seen[k]) continue;
    std::size_t len = 0;
    for (std::size_t j = k; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      if (perm[j] < 0 || static_cast<std::size_t>(perm[j]) >= perm.size())
        throw std::invalid_argument("not a permutation");
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) parity = -parity;
  }
  return parity;
}

std::optional<int> slot_permutation_phase(const Tensor& t, BundleKind bundle, const std::vector<int>& perm) {
  std::size_t n = bundle == BundleKind::bra ? t.bra.size() : bundle == BundleKind::ket ? t.ket.size() : t.aux.size();
  if (perm.size() != n) throw std::invalid_argument("permutation does not act within a single bundle");
  std::vector<bool> hit(n, false);
  bool identity = true;
  for (std::size_t k = 0; k != n; ++k) {
    if (perm[k] < 0 || static_cast<std::size_t>(perm[k]) >= n || hit[perm[k]])
      throw std::invalid_argument("not a permutation of the bundle");
    hit[perm[k]] = true;
    if (perm[k] != static_cast<int>(k)) identity = false;
  }
  if (identity) return 1;
  if (bundle == BundleKind::aux) return std::nullopt;
  switch (t.symmetry) {
    case Symmetry::antisymm: return permutation_parity(perm);
    case Symmetry::symm: return 1;
    case Symmetry::nonsymm: return std::nullopt;
  }
  return std::nullopt;
}

NormalOperator adjoint(const NormalOperator& op) {
  NormalOperator r;
  r.vacuum = op.vacuum;
  // (a^{c1} a^{c2} a_{b2} a_{b1})^† = a^{b1} a^{b2} a_{c2} a_{c1}
  r.creators = op.annihilators;
  r.annihilators = op.creators;
  return r;
}

namespace {

bool has_repeat(const std::vector<Index>& v) {
  std::set<Index> seen;
  for (const auto& i : v)
    if (!i.is_null() && !seen.insert(i).second) return true;
  return false;
}

}  // namespace

ExprHandle make_tensor(Tensor t) {
  if (t.label.empty()) throw std::invalid_argument("tensor label is empty");
  for (const auto& i : t.aux)
    if (i.is_null()) throw std::invalid_argument("aux slots of '" + t.label + "' may not be empty");
  std::size_t ncol = std::max(t.bra.size(), t.ket.size());
  for (std::size_t k = 0; k != ncol; ++k) {
    bool b_empty = k >= t.bra.size() || t.bra[k].is_null();
    bool k_empty = k >= t.ket.size() || t.ket[k].is_null();
    if (b_empty && k_empty) throw std::invalid_argument("column " + std::to_string(k + 1) + " of '" + t.label + "' is empty");
  }
  if (t.braket_symmetry == BraKetSymmetry::symm && t.bra.size() != t.ket.size())
    throw std::invalid_argument("braket-symmetric tensor '" + t.label + "' needs equal bra and ket lengths");
  if (t.column_symmetry == ColumnSymmetry::symm && t.bra.size() != t.ket.size())
    throw std::invalid_argument("column-symmetric tensor '" + t.label + "' needs equal bra and ket lengths");
  if (t.symmetry == Symmetry::antisymm && (has_repeat(t.bra) || has_repeat(t.ket))) return constant(0);
  return Expr::make_atom(ExprKind::tensor, std::move(t));
}

ExprHandle make_tensor(std::string label, SlotBundleSpec slots, SymmetrySpec sym) {
  Tensor t;
  t.label = std::move(label);
  t.bra = std::move(slots.bra);
  t.ket = std::move(slots.ket);
  t.aux = std::move(slots.aux);
  t.symmetry = sym.symmetry;
  t.braket_symmetry = sym.braket;
  t.column_symmetry = sym.column;
  return make_tensor(std::move(t));
}

ExprHandle make_operator(NormalOperator op) {
  for (const auto& i : op.creators)
    if (i.is_null()) throw std::invalid_argument("normal operator slots may not be empty");
  for (const auto& i : op.annihilators)
    if (i.is_null()) throw std::invalid_argument("normal operator slots may not be empty");
  if (has_repeat(op.creators) || has_repeat(op.annihilators)) return constant(0);
  return Expr::make_atom(ExprKind::normal_operator, std::move(op));
}

}  // namespace tenet
