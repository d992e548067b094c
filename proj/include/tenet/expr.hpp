#pragma once

#include "tenet/index.hpp"
#include "tenet/scalar.hpp"
#include "tenet/tensor.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace tenet {

enum class ExprKind { constant, variable, tensor, normal_operator, sum, product };

class Expr;

/// Shared handle to an immutable expression node; == is structural.
class ExprHandle {
 public:
  ExprHandle() = default;
  explicit ExprHandle(std::shared_ptr<const Expr> p) : p_(std::move(p)) {}

  const Expr& operator*() const { return *p_; }
  const Expr* operator->() const { return p_.get(); }
  explicit operator bool() const { return static_cast<bool>(p_); }
  const Expr* get() const { return p_.get(); }

  std::size_t hash() const;
  friend bool operator==(const ExprHandle& a, const ExprHandle& b);
  friend bool operator!=(const ExprHandle& a, const ExprHandle& b) { return !(a == b); }

 private:
  std::shared_ptr<const Expr> p_;
};

struct ExprHandleHash {
  std::size_t operator()(const ExprHandle& e) const { return e.hash(); }
};

struct Variable {
  std::string name;
};

class Expr {
 public:
  using Payload = std::variant<std::monostate, Scalar, Variable, Tensor, NormalOperator>;

  ExprKind kind() const { return kind_; }
  bool is(ExprKind k) const { return kind_ == k; }
  bool is_atom() const { return kind_ != ExprKind::sum && kind_ != ExprKind::product; }

  const std::vector<ExprHandle>& children() const { return children_; }
  std::size_t size() const { return children_.size(); }
  auto begin() const { return children_.begin(); }
  auto end() const { return children_.end(); }

  /// Constant value, or the Product prefactor.
  const Scalar& scalar() const { return scalar_; }
  const Variable& variable() const { return std::get<Variable>(payload_); }
  const Tensor& tensor() const { return std::get<Tensor>(payload_); }
  const NormalOperator& op() const { return std::get<NormalOperator>(payload_); }

  std::size_t hash() const { return hash_; }

  // node factories; prefer the normalizing constructors below
  static ExprHandle make_atom(ExprKind kind, Payload payload);
  static ExprHandle make_constant(Scalar v);
  static ExprHandle make_sum_raw(std::vector<ExprHandle> terms);
  static ExprHandle make_product_raw(Scalar prefactor, std::vector<ExprHandle> factors);

 private:
  ExprKind kind_ = ExprKind::constant;
  Scalar scalar_;
  Payload payload_;
  std::vector<ExprHandle> children_;
  std::size_t hash_ = 0;
  void compute_hash();
};

// ---- constructors -------------------------------------------------------------

ExprHandle constant(Scalar v);
ExprHandle variable(std::string name);
/// Validated tensor atom; an antisymmetric bundle with a repeated index yields Constant 0.
ExprHandle make_tensor(Tensor t);
ExprHandle make_tensor(std::string label, SlotBundleSpec slots, SymmetrySpec sym = {});
ExprHandle make_operator(NormalOperator op);
/// Flattens nested sums; drops zero summands; empty -> 0, singleton -> the term.
ExprHandle sum(std::vector<ExprHandle> terms);
/// Absorbs constants and nested products; zero -> 0; unit prefactor with one factor -> the factor.
ExprHandle product(Scalar prefactor, std::vector<ExprHandle> factors);
inline ExprHandle product(std::vector<ExprHandle> factors) { return product(Scalar(1), std::move(factors)); }

ExprHandle operator+(const ExprHandle& a, const ExprHandle& b);
ExprHandle operator-(const ExprHandle& a, const ExprHandle& b);
ExprHandle operator*(const ExprHandle& a, const ExprHandle& b);
ExprHandle operator*(const Scalar& s, const ExprHandle& e);
ExprHandle operator-(const ExprHandle& e);

bool is_zero(const ExprHandle& e);

// ---- traversal and rewrites ---------------------------------------------------

/// Depth-first pre-order traversal.
void visit(const ExprHandle& root, const std::function<void(const ExprHandle&)>& f, bool atoms_only = false);

ExprHandle expand(const ExprHandle& e);
ExprHandle rapid_simplify(const ExprHandle& e);

struct SimplifyOptions {
  bool lexicographic_sort = true;
  const IndexSpaceRegistry* registry = nullptr;
  /// preferred tensor-label order for the post-sort
  std::vector<std::string> label_rank;
};
/// expand -> per-term canonicalization -> like-term collection -> rapid_simplify, to a fixed point.
ExprHandle simplify(const ExprHandle& e, const SimplifyOptions& opts = {});

/// Split a term into (scalar prefactor, factor list).
std::pair<Scalar, std::vector<ExprHandle>> split_term(const ExprHandle& term);
/// Summands of e (e itself if not a Sum).
std::vector<ExprHandle> terms_of(const ExprHandle& e);

}  // namespace tenet
