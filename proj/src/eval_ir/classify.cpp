#include "tenet/ir.hpp"
#include "tenet/parser.hpp"

#include <algorithm>
#include <stdexcept>

namespace tenet {

std::map<Index, IndexRole> classify_indices(const std::vector<Index>& left, const std::vector<Index>& right,
                                            const std::vector<Index>& target) {
  auto has = [](const std::vector<Index>& v, const Index& i) { return std::find(v.begin(), v.end(), i) != v.end(); };
  std::map<Index, IndexRole> out;
  for (const auto& t : target)
    if (!has(left, t) && !has(right, t))
      throw std::invalid_argument("target index " + serialize(t) + " is absent from both operands");
  for (const auto* side : {&left, &right})
    for (const auto& i : *side) {
      if (out.count(i)) continue;
      const bool l = has(left, i), r = has(right, i), t = has(target, i);
      if (l && r)
        out[i] = t ? IndexRole::batching : IndexRole::contracted;
      else if (t)
        out[i] = IndexRole::free;
      else
        throw std::invalid_argument("index " + serialize(i) + " is summed within a single operand");
    }
  return out;
}

}  // namespace tenet
