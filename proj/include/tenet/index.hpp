#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tenet {

/// A set of base spaces (bit word) plus a quantum-number word and a label.
struct IndexSpace {
  std::uint32_t type = 0;
  std::uint32_t qn = 0;
  std::string label;

  bool is_null() const { return type == 0; }
  /// True if `other` is a subspace of this space.
  bool includes(const IndexSpace& other) const { return (other.type & type) == other.type; }
  bool overlaps(const IndexSpace& other) const { return (other.type & type) != 0; }

  friend bool operator==(const IndexSpace& a, const IndexSpace& b) {
    return a.type == b.type && a.qn == b.qn && a.label == b.label;
  }
  friend bool operator!=(const IndexSpace& a, const IndexSpace& b) { return !(a == b); }
};

const IndexSpace& null_space();

class Index {
 public:
  Index() = default;
  /// Protoindices are kept sorted; their order carries no meaning.
  Index(IndexSpace space, std::uint32_t ordinal, std::vector<Index> proto = {});

  const IndexSpace& space() const { return space_; }
  std::uint32_t ordinal() const { return ordinal_; }
  const std::vector<Index>& proto() const { return proto_; }
  bool has_proto() const { return !proto_.empty(); }
  bool is_null() const { return ordinal_ == 0; }

  /// "a_1"
  std::string label() const;
  /// "a_1<i_1,i_2>"
  std::string full_label() const;

  std::size_t hash() const { return hash_; }

  Index with_proto(std::vector<Index> proto) const { return Index(space_, ordinal_, std::move(proto)); }

  friend bool operator==(const Index& a, const Index& b);
  friend bool operator!=(const Index& a, const Index& b) { return !(a == b); }
  friend bool operator<(const Index& a, const Index& b);

 private:
  IndexSpace space_;
  std::uint32_t ordinal_ = 0;
  std::vector<Index> proto_;
  std::size_t hash_ = 0;
};

struct IndexHash {
  std::size_t operator()(const Index& i) const { return i.hash(); }
};

enum class VacuumTrait { occupied, unoccupied, mixed };

class IndexSpaceRegistry {
 public:
  IndexSpaceRegistry() = default;

  /// Default vocabulary: i (occupied, 10), a (unoccupied, 100), p = i ∪ a (110).
  static IndexSpaceRegistry make_default();
  /// JSON with "bases": [{label, vacuum, extent[, qn]}], "unions": [{label, members[, extent]}],
  /// optional "symmetry_defaults": {label: symtag}.
  static IndexSpaceRegistry from_json(const std::string& text);
  static IndexSpaceRegistry load(const std::string& path);

  const IndexSpace& register_base(const std::string& label, VacuumTrait vacuum, std::size_t extent = 1,
                                  std::uint32_t qn = 0);
  const IndexSpace& register_union(const std::string& label, const std::vector<std::string>& members,
                                   std::optional<std::size_t> extent = std::nullopt);

  bool contains(const std::string& label) const { return by_label_.count(label) != 0; }
  const IndexSpace& find(const std::string& label) const;
  const IndexSpace* find_type(std::uint32_t type) const;

  /// Registered space whose word is the AND of the inputs, or the null space if disjoint.
  IndexSpace intersect(const IndexSpace& a, const IndexSpace& b) const;
  IndexSpace unite(const IndexSpace& a, const IndexSpace& b) const;
  /// Restrict a space to the bits in `mask`.
  IndexSpace restrict_to(const IndexSpace& s, std::uint32_t mask) const;

  bool is_base(const IndexSpace& s) const;
  VacuumTrait vacuum(const IndexSpace& base) const;
  std::uint32_t occupied_mask() const { return occ_mask_; }
  std::uint32_t unoccupied_mask() const { return unocc_mask_; }
  std::uint32_t mixed_mask() const { return mixed_mask_; }

  std::size_t extent(const IndexSpace& s) const;
  void set_extent(const std::string& label, std::size_t extent);

  void set_symmetry_default(const std::string& tensor_label, const std::string& symtag);
  std::optional<std::string> symmetry_default(const std::string& tensor_label) const;

  const std::vector<IndexSpace>& spaces() const { return spaces_; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

 private:
  std::vector<IndexSpace> spaces_;
  std::map<std::string, std::size_t> by_label_;
  std::map<std::uint32_t, std::size_t> by_type_;
  std::map<std::string, VacuumTrait> base_vacuum_;
  std::map<std::string, std::size_t> extents_;
  std::map<std::string, std::string> symmetry_defaults_;
  std::uint32_t occ_mask_ = 0, unocc_mask_ = 0, mixed_mask_ = 0;
  int nbases_ = 0;
  bool frozen_ = false;
};

/// Process-wide registry used when none is passed explicitly.
const IndexSpaceRegistry& default_registry();
void set_default_registry(IndexSpaceRegistry reg);

/// Issues fresh dummy indices; one session per renaming pass.
class DummySession {
 public:
  /// Mark the ordinal of `idx` (and of its protoindices) as taken.
  void reserve(const Index& idx);
  Index next_dummy(const IndexSpace& space, std::vector<Index> proto = {});

 private:
  std::map<std::string, std::set<std::uint32_t>> used_;
};

/// Parse "i_1" (no protoindices) against a registry.
Index make_index(const IndexSpaceRegistry& reg, const std::string& label, std::vector<Index> proto = {});

}  // namespace tenet
