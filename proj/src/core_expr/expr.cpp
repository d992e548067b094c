#include "tenet/expr.hpp"

#include <stdexcept>

#include <boost/container_hash/hash.hpp>

namespace tenet {

std::size_t ExprHandle::hash() const { return p_ ? p_->hash() : 0; }

namespace {

bool node_equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case ExprKind::constant: return a.scalar() == b.scalar();
    case ExprKind::variable: return a.variable().name == b.variable().name;
    case ExprKind::tensor: return a.tensor() == b.tensor();
    case ExprKind::normal_operator: return a.op() == b.op();
    case ExprKind::product:
      if (a.scalar() != b.scalar()) return false;
      [[fallthrough]];
    case ExprKind::sum:
      for (std::size_t k = 0; k != a.size(); ++k)
        if (!(a.children()[k] == b.children()[k])) return false;
      return true;
  }
  return false;
}

std::size_t hash_indices(std::size_t seed, const std::vector<Index>& v) {
  boost::hash_combine(seed, v.size());
  for (const auto& i : v) boost::hash_combine(seed, i.hash());
  return seed;
}

}  // namespace

bool operator==(const ExprHandle& a, const ExprHandle& b) {
  if (!a || !b) return !a && !b;
  return node_equal(*a, *b);
}

void Expr::compute_hash() {
  std::size_t seed = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL;
  switch (kind_) {
    case ExprKind::constant: boost::hash_combine(seed, scalar_.hash()); break;
    case ExprKind::variable: boost::hash_combine(seed, variable().name); break;
    case ExprKind::tensor: {
      const auto& t = tensor();
      boost::hash_combine(seed, t.label);
      seed = hash_indices(seed, t.bra);
      seed = hash_indices(seed, t.ket);
      seed = hash_indices(seed, t.aux);
      boost::hash_combine(seed, static_cast<int>(t.symmetry));
      boost::hash_combine(seed, static_cast<int>(t.braket_symmetry));
      boost::hash_combine(seed, static_cast<int>(t.column_symmetry));
      boost::hash_combine(seed, t.conjugated);
      break;
    }
    case ExprKind::normal_operator: {
      const auto& o = op();
      boost::hash_combine(seed, static_cast<int>(o.vacuum));
      seed = hash_indices(seed, o.creators);
      seed = hash_indices(seed, o.annihilators);
      break;
    }
    case ExprKind::product: boost::hash_combine(seed, scalar_.hash()); [[fallthrough]];
    case ExprKind::sum:
      for (const auto& c : children_) boost::hash_combine(seed, c.hash());
      break;
  }
  hash_ = seed;
}

ExprHandle Expr::make_atom(ExprKind kind, Payload payload) {
  auto e = std::make_shared<Expr>();
  e->kind_ = kind;
  e->payload_ = std::move(payload);
  e->compute_hash();
  return ExprHandle(std::move(e));
}

ExprHandle Expr::make_constant(Scalar v) {
  auto e = std::make_shared<Expr>();
  e->kind_ = ExprKind::constant;
  e->scalar_ = std::move(v);
  e->compute_hash();
  return ExprHandle(std::move(e));
}

ExprHandle Expr::make_sum_raw(std::vector<ExprHandle> terms) {
  if (terms.empty()) throw std::invalid_argument("Sum needs at least one child");
  auto e = std::make_shared<Expr>();
  e->kind_ = ExprKind::sum;
  e->children_ = std::move(terms);
  e->compute_hash();
  return ExprHandle(std::move(e));
}

ExprHandle Expr::make_product_raw(Scalar prefactor, std::vector<ExprHandle> factors) {
  if (factors.empty()) throw std::invalid_argument("Product needs at least one child");
  if (prefactor.is_zero()) throw std::invalid_argument("Product prefactor must be nonzero");
  auto e = std::make_shared<Expr>();
  e->kind_ = ExprKind::product;
  e->scalar_ = std::move(prefactor);
  e->children_ = std::move(factors);
  e->compute_hash();
  return ExprHandle(std::move(e));
}

ExprHandle constant(Scalar v) { return Expr::make_constant(std::move(v)); }

ExprHandle variable(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  return Expr::make_atom(ExprKind::variable, Variable{std::move(name)});
}

bool is_zero(const ExprHandle& e) { return e->is(ExprKind::constant) && e->scalar().is_zero(); }

ExprHandle sum(std::vector<ExprHandle> terms) {
  std::vector<ExprHandle> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (t->is(ExprKind::sum)) {
      for (const auto& c : t->children()) flat.push_back(c);
    } else if (!is_zero(t)) {
      flat.push_back(std::move(t));
    }
  }
  if (flat.empty()) return constant(0);
  if (flat.size() == 1) return flat.front();
  return Expr::make_sum_raw(std::move(flat));
}

ExprHandle product(Scalar prefactor, std::vector<ExprHandle> factors) {
  std::vector<ExprHandle> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (f->is(ExprKind::constant)) {
      prefactor *= f->scalar();
    } else if (f->is(ExprKind::product)) {
      prefactor *= f->scalar();
      for (const auto& c : f->children()) flat.push_back(c);
    } else {
      flat.push_back(std::move(f));
    }
    if (prefactor.is_zero()) return constant(0);
  }
  if (flat.empty()) return constant(std::move(prefactor));
  if (flat.size() == 1 && prefactor.is_one()) return flat.front();
  return Expr::make_product_raw(std::move(prefactor), std::move(flat));
}

ExprHandle operator+(const ExprHandle& a, const ExprHandle& b) { return sum({a, b}); }
ExprHandle operator-(const ExprHandle& a, const ExprHandle& b) { return sum({a, -b}); }
ExprHandle operator*(const ExprHandle& a, const ExprHandle& b) { return product({a, b}); }
ExprHandle operator*(const Scalar& s, const ExprHandle& e) { return product(s, {e}); }
ExprHandle operator-(const ExprHandle& e) { return product(Scalar(-1), {e}); }

void visit(const ExprHandle& root, const std::function<void(const ExprHandle&)>& f, bool atoms_only) {
  if (!atoms_only || root->is_atom()) f(root);
  for (const auto& c : root->children()) visit(c, f, atoms_only);
}

std::pair<Scalar, std::vector<ExprHandle>> split_term(const ExprHandle& term) {
  if (term->is(ExprKind::product)) return {term->scalar(), term->children()};
  if (term->is(ExprKind::constant)) return {term->scalar(), {}};
  return {Scalar(1), {term}};
}

std::vector<ExprHandle> terms_of(const ExprHandle& e) {
  if (e->is(ExprKind::sum)) return e->children();
  return {e};
}

ExprHandle expand(const ExprHandle& e) {
  switch (e->kind()) {
    case ExprKind::sum: {
      std::vector<ExprHandle> out;
      out.reserve(e->size());
      for (const auto& c : e->children()) out.push_back(expand(c));
      return sum(std::move(out));
    }
    case ExprKind::product: {
      struct Partial {
        Scalar coef;
        std::vector<ExprHandle> factors;
      };
      std::vector<Partial> acc{{e->scalar(), {}}};
      for (const auto& c : e->children()) {
        ExprHandle x = expand(c);
        if (x->is(ExprKind::sum)) {
          std::vector<Partial> next;
          next.reserve(acc.size() * x->size());
          for (const auto& p : acc)
            for (const auto& t : x->children()) {
              auto [coef, fs] = split_term(t);
              Partial q{p.coef * coef, p.factors};
              q.factors.insert(q.factors.end(), fs.begin(), fs.end());
              next.push_back(std::move(q));
            }
          acc = std::move(next);
        } else {
          auto [coef, fs] = split_term(x);
          for (auto& p : acc) {
            p.coef *= coef;
            p.factors.insert(p.factors.end(), fs.begin(), fs.end());
          }
        }
      }
      std::vector<ExprHandle> terms;
      terms.reserve(acc.size());
      for (auto& p : acc) terms.push_back(product(std::move(p.coef), std::move(p.factors)));
      return sum(std::move(terms));
    }
    default: return e;
  }
}

ExprHandle rapid_simplify(const ExprHandle& e) {
  switch (e->kind()) {
    case ExprKind::sum: {
      std::vector<ExprHandle> out;
      Scalar folded(0);
      bool have_constant = false;
      for (const auto& c : e->children()) {
        ExprHandle x = rapid_simplify(c);
        for (const auto& t : terms_of(x)) {
          if (t->is(ExprKind::constant)) {
            folded += t->scalar();
            have_constant = true;
          } else {
            out.push_back(t);
          }
        }
      }
      if (have_constant && !folded.is_zero()) out.push_back(constant(folded));
      return sum(std::move(out));
    }
    case ExprKind::product: {
      std::vector<ExprHandle> out;
      out.reserve(e->size());
      for (const auto& c : e->children()) out.push_back(rapid_simplify(c));
      return product(e->scalar(), std::move(out));
    }
    default: return e;
  }
}

}  // namespace tenet
