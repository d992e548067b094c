#include "tenet/index.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/container_hash/hash.hpp>

namespace tenet {

const IndexSpace& null_space() {
  static const IndexSpace null{};
  return null;
}

Index::Index(IndexSpace space, std::uint32_t ordinal, std::vector<Index> proto)
    : space_(std::move(space)), ordinal_(ordinal), proto_(std::move(proto)) {
  if (ordinal_ == 0) throw std::invalid_argument("index ordinal must be positive");
  std::sort(proto_.begin(), proto_.end());
  if (std::adjacent_find(proto_.begin(), proto_.end()) != proto_.end())
    throw std::invalid_argument("repeated protoindex in " + full_label());
  std::size_t seed = 0x1dec5;
  boost::hash_combine(seed, space_.label);
  boost::hash_combine(seed, space_.type);
  boost::hash_combine(seed, space_.qn);
  boost::hash_combine(seed, ordinal_);
  for (const auto& p : proto_) boost::hash_combine(seed, p.hash());
  hash_ = seed;
}

std::string Index::label() const {
  if (is_null()) return "";
  return space_.label + "_" + std::to_string(ordinal_);
}

std::string Index::full_label() const {
  std::string s = label();
  if (!proto_.empty()) {
    s += "<";
    for (std::size_t k = 0; k != proto_.size(); ++k) {
      if (k) s += ",";
      s += proto_[k].full_label();
    }
    s += ">";
  }
  return s;
}

bool operator==(const Index& a, const Index& b) {
  return a.hash_ == b.hash_ && a.ordinal_ == b.ordinal_ && a.space_ == b.space_ && a.proto_ == b.proto_;
}

bool operator<(const Index& a, const Index& b) {
  if (a.space_.type != b.space_.type) return a.space_.type < b.space_.type;
  if (a.space_.label != b.space_.label) return a.space_.label < b.space_.label;
  if (a.space_.qn != b.space_.qn) return a.space_.qn < b.space_.qn;
  if (a.ordinal_ != b.ordinal_) return a.ordinal_ < b.ordinal_;
  return std::lexicographical_compare(a.proto_.begin(), a.proto_.end(), b.proto_.begin(), b.proto_.end());
}

void DummySession::reserve(const Index& idx) {
  if (idx.is_null()) return;
  used_[idx.space().label].insert(idx.ordinal());
  for (const auto& p : idx.proto()) reserve(p);
}

Index DummySession::next_dummy(const IndexSpace& space, std::vector<Index> proto) {
  if (space.is_null()) throw std::invalid_argument("cannot issue a dummy in the null space");
  auto& taken = used_[space.label];
  std::uint32_t ord = 1;
  for (auto it = taken.begin(); it != taken.end() && *it == ord; ++it) ++ord;
  taken.insert(ord);
  return Index(space, ord, std::move(proto));
}

Index make_index(const IndexSpaceRegistry& reg, const std::string& label, std::vector<Index> proto) {
  auto us = label.rfind('_');
  if (us == std::string::npos || us == 0 || us + 1 == label.size())
    throw std::invalid_argument("malformed index label '" + label + "'");
  const auto& space = reg.find(label.substr(0, us));
  unsigned long ord = std::stoul(label.substr(us + 1));
  return Index(space, static_cast<std::uint32_t>(ord), std::move(proto));
}

}  // namespace tenet
