#include "tenet/interp.hpp"
#include "tenet/parser.hpp"

#include <algorithm>

namespace tenet {

DenseTensor::DenseTensor(std::vector<std::size_t> ext, double fill) : extents(std::move(ext)) {
  std::size_t n = 1;
  for (auto e : extents) n *= e;
  data.assign(n, fill);
}

namespace {

std::size_t offset(const std::vector<std::size_t>& ext, const std::vector<std::size_t>& idx) {
  if (idx.size() != ext.size()) throw EvalError("wrong number of subscripts");
  std::size_t o = 0;
  for (std::size_t k = 0; k < ext.size(); ++k) {
    if (idx[k] >= ext[k]) throw EvalError("subscript out of range");
    o = o * ext[k] + idx[k];
  }
  return o;
}

}  // namespace

double& DenseTensor::at(const std::vector<std::size_t>& idx) { return data[offset(extents, idx)]; }
double DenseTensor::at(const std::vector<std::size_t>& idx) const { return data[offset(extents, idx)]; }

Result einsum(const std::vector<const Result*>& inputs, const std::vector<std::vector<Index>>& labels,
              const std::vector<Index>& target) {
  if (inputs.size() != labels.size()) throw EvalError("einsum: one label list per input");
  std::vector<Index> order;
  std::map<Index, std::size_t> pos;
  std::vector<std::size_t> ext;
  for (const auto& t : target) {
    if (pos.count(t)) throw EvalError("einsum: repeated target index " + serialize(t));
    pos[t] = order.size();
    order.push_back(t);
    ext.push_back(0);
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto e = inputs[k]->extents();
    if (e.size() != labels[k].size())
      throw EvalError("einsum: operand of rank " + std::to_string(e.size()) + " given " +
                      std::to_string(labels[k].size()) + " indices");
    for (std::size_t m = 0; m < e.size(); ++m) {
      const Index& l = labels[k][m];
      auto it = pos.find(l);
      if (it == pos.end()) {
        it = pos.emplace(l, order.size()).first;
        order.push_back(l);
        ext.push_back(0);
      }
      auto& x = ext[it->second];
      if (x == 0)
        x = e[m];
      else if (x != e[m])
        throw EvalError("extent mismatch on index " + serialize(l) + ": " + std::to_string(x) + " vs " +
                        std::to_string(e[m]));
    }
  }
  for (std::size_t t = 0; t < target.size(); ++t)
    if (ext[t] == 0) throw EvalError("target index " + serialize(target[t]) + " absent from all operands");

  const std::size_t n = order.size();
  std::vector<std::vector<std::size_t>> stride(inputs.size(), std::vector<std::size_t>(n, 0));
  std::vector<const double*> base(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto e = inputs[k]->extents();
    std::size_t s = 1;
    for (std::size_t m = e.size(); m-- > 0;) {
      stride[k][pos[labels[k][m]]] += s;
      s *= e[m];
    }
    base[k] = inputs[k]->is_scalar() ? nullptr : inputs[k]->tensor().data.data();
  }
  std::vector<double> scalars(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k)
    if (inputs[k]->is_scalar()) {
      scalars[k] = inputs[k]->scalar();
      base[k] = &scalars[k];
    }
  std::vector<std::size_t> ostride(n, 0);
  {
    std::size_t s = 1;
    for (std::size_t t = target.size(); t-- > 0;) {
      ostride[t] = s;
      s *= ext[t];
    }
  }
  std::vector<std::size_t> text(ext.begin(), ext.begin() + static_cast<long>(target.size()));
  DenseTensor out(text);
  if (n == 0 || std::any_of(ext.begin(), ext.end(), [](std::size_t x) { return x == 0; })) {
    if (n == 0) {
      double v = 1;
      for (auto* b : base) v *= *b;
      return Result(v);
    }
    return target.empty() ? Result(0.0) : Result(std::move(out));
  }

  std::vector<std::size_t> idx(n, 0), off(inputs.size(), 0);
  std::size_t ooff = 0;
  const std::size_t nin = inputs.size();
  while (true) {
    double v = 1;
    for (std::size_t k = 0; k < nin; ++k) v *= base[k][off[k]];
    out.data[ooff] += v;
    // odometer, last label fastest
    std::size_t d = n;
    while (d-- > 0) {
      if (++idx[d] < ext[d]) {
        for (std::size_t k = 0; k < nin; ++k) off[k] += stride[k][d];
        ooff += ostride[d];
        break;
      }
      for (std::size_t k = 0; k < nin; ++k) off[k] -= stride[k][d] * (ext[d] - 1);
      ooff -= ostride[d] * (ext[d] - 1);
      idx[d] = 0;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  if (target.empty()) return Result(out.data.front());
  return Result(std::move(out));
}

Result dense_product(const Result& a, const std::vector<Index>& la, const Result& b, const std::vector<Index>& lb,
                     const std::vector<Index>& target) {
  try {
    classify_indices(la, lb, target);
  } catch (const std::invalid_argument& e) {
    throw EvalError(e.what());
  }
  return einsum({&a, &b}, {la, lb}, target);
}

Result permute_to(const Result& r, const std::vector<Index>& from, const std::vector<Index>& to) {
  std::vector<Index> x = from, y = to;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  if (x != y || std::adjacent_find(x.begin(), x.end()) != x.end())
    throw EvalError("permute_to: layouts are not permutations of each other");
  if (from == to) return r;
  return einsum({&r}, {from}, to);
}

Result add(const Result& a, const Result& b) {
  if (a.is_scalar() && b.is_scalar()) return Result(a.scalar() + b.scalar());
  if (a.is_scalar() || b.is_scalar() || a.tensor().extents != b.tensor().extents)
    throw EvalError("add: operands have different shapes");
  DenseTensor t = a.tensor();
  const auto& d = b.tensor().data;
  for (std::size_t k = 0; k < t.data.size(); ++k) t.data[k] += d[k];
  return Result(std::move(t));
}

Result scale(const Result& a, double s) {
  if (a.is_scalar()) return Result(a.scalar() * s);
  DenseTensor t = a.tensor();
  for (auto& x : t.data) x *= s;
  return Result(std::move(t));
}

}  // namespace tenet
