#pragma once

#include "tenet/ir.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tenet {

/// Dense row-major tensor of doubles.
struct DenseTensor {
  std::vector<std::size_t> extents;
  std::vector<double> data;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::size_t> ext, double fill = 0.0);
  std::size_t rank() const { return extents.size(); }
  std::size_t size() const { return data.size(); }
  double& at(const std::vector<std::size_t>& idx);
  double at(const std::vector<std::size_t>& idx) const;
  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;
};

/// Value of an IR node: a scalar or a dense tensor whose modes follow the node layout.
class Result {
 public:
  Result() = default;
  Result(double s) : v_(s) {}
  Result(DenseTensor t) : v_(std::move(t)) {}

  bool is_scalar() const { return std::holds_alternative<double>(v_); }
  double scalar() const { return std::get<double>(v_); }
  const DenseTensor& tensor() const { return std::get<DenseTensor>(v_); }
  DenseTensor& tensor() { return std::get<DenseTensor>(v_); }
  std::size_t rank() const { return is_scalar() ? 0 : tensor().rank(); }
  std::vector<std::size_t> extents() const { return is_scalar() ? std::vector<std::size_t>{} : tensor().extents; }
  /// element buffer (one element for a scalar)
  std::vector<double> values() const { return is_scalar() ? std::vector<double>{scalar()} : tensor().data; }

  friend bool operator==(const Result& a, const Result& b) { return a.v_ == b.v_; }

 private:
  std::variant<double, DenseTensor> v_{0.0};
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Einstein-summation kernel: repeated labels within an input select diagonals, labels absent from
/// `target` are summed. Loop order: target labels, then the rest by first appearance.
Result einsum(const std::vector<const Result*>& inputs, const std::vector<std::vector<Index>>& labels,
              const std::vector<Index>& target);

/// Binary product with batching / contracted / free roles from classify_indices.
Result dense_product(const Result& a, const std::vector<Index>& la, const Result& b, const std::vector<Index>& lb,
                     const std::vector<Index>& target);
Result permute_to(const Result& r, const std::vector<Index>& from, const std::vector<Index>& to);
Result add(const Result& a, const Result& b);
Result scale(const Result& a, double s);

/// Returns leaf data with modes in slot order (bra, ket, aux; empty slots skipped); scalars for variables.
using LeafEvaluator = std::function<Result(const ExprHandle& atom)>;

/// Identity-keyed store of intermediates with remaining-use counters.
class CacheManager {
 public:
  CacheManager() = default;
  /// Use counts come from mark_cse.
  explicit CacheManager(const Plan& plan, bool enabled = true) : uses_(plan.uses), enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  std::optional<Result> lookup(std::uint64_t id);
  void store(std::uint64_t id, const Result& r);

  std::size_t hits() const { return hits_; }
  std::size_t live() const { return entries_.size(); }
  std::size_t peak() const { return peak_; }

 private:
  struct Entry {
    Result value;
    int remaining = 0;
  };
  std::map<std::uint64_t, int> uses_;
  std::map<std::uint64_t, Entry> entries_;
  bool enabled_ = false;
  std::size_t hits_ = 0, peak_ = 0;
};

struct EvalStats {
  std::size_t leaves = 0;
  std::size_t products = 0;
  std::size_t sums = 0;
  /// products evaluated per identity
  std::map<std::uint64_t, int> product_evals;
};

/// Post-order tree walk; results in node layout. A null cache disables reuse.
Result evaluate(const IRNode& node, const LeafEvaluator& leaves, const Extents& extents, CacheManager* cache = nullptr,
                EvalStats* stats = nullptr);

/// Positions of every registered space inside the concatenation of all base spaces (bit order).
std::map<std::uint32_t, std::vector<std::size_t>> space_positions(const IndexSpaceRegistry& reg);

/// Leaf evaluator over named blocks; δ is built in. Extents are checked against the registry.
LeafEvaluator block_leaves(std::map<std::string, Result> tensors, const IndexSpaceRegistry& reg,
                           std::map<std::string, double> variables = {});

// ---- IO --------------------------------------------------------------------

/// "TNT1" magic, u64 mode count, u64 extents, f64 payload; all little-endian.
DenseTensor read_tnt1(const std::string& path);
void write_tnt1(const std::string& path, const DenseTensor& t);
/// {"extents": [..], "data": [..]}
DenseTensor tensor_from_json(const std::string& text);
std::string tensor_to_json(const DenseTensor& t);
Result result_from_json(const std::string& text);
std::string result_to_json(const Result& r);

}  // namespace tenet
