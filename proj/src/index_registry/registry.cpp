#include "tenet/index.hpp"

#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tenet {

namespace {

void check_mutable(const IndexSpaceRegistry& r) {
  if (r.frozen()) throw std::logic_error("index space registry is frozen");
}

}  // namespace

IndexSpaceRegistry IndexSpaceRegistry::make_default() {
  IndexSpaceRegistry r;
  r.register_base("i", VacuumTrait::occupied, 10);
  r.register_base("a", VacuumTrait::unoccupied, 100);
  r.register_union("p", {"i", "a"});
  r.freeze();
  return r;
}

const IndexSpace& IndexSpaceRegistry::register_base(const std::string& label, VacuumTrait vacuum,
                                                    std::size_t extent, std::uint32_t qn) {
  check_mutable(*this);
  if (label.empty()) throw std::invalid_argument("empty index space label");
  if (contains(label)) throw std::invalid_argument("duplicate index space label '" + label + "'");
  if (nbases_ == 32) throw std::length_error("at most 32 base index spaces are supported");
  IndexSpace s{std::uint32_t(1) << nbases_, qn, label};
  ++nbases_;
  switch (vacuum) {
    case VacuumTrait::occupied: occ_mask_ |= s.type; break;
    case VacuumTrait::unoccupied: unocc_mask_ |= s.type; break;
    case VacuumTrait::mixed: mixed_mask_ |= s.type; break;
  }
  base_vacuum_[label] = vacuum;
  extents_[label] = extent;
  by_label_[label] = spaces_.size();
  by_type_.emplace(s.type, spaces_.size());
  spaces_.push_back(s);
  return spaces_.back();
}

const IndexSpace& IndexSpaceRegistry::register_union(const std::string& label,
                                                     const std::vector<std::string>& members,
                                                     std::optional<std::size_t> extent) {
  check_mutable(*this);
  if (contains(label)) throw std::invalid_argument("duplicate index space label '" + label + "'");
  if (members.empty()) throw std::invalid_argument("union '" + label + "' has no members");
  std::uint32_t word = 0, qn = 0;
  for (const auto& m : members) {
    auto it = by_label_.find(m);
    if (it == by_label_.end()) throw std::invalid_argument("unknown member space '" + m + "' of union '" + label + "'");
    word |= spaces_[it->second].type;
    qn |= spaces_[it->second].qn;
  }
  std::size_t ext = 0;
  if (extent) {
    ext = *extent;
  } else {
    for (int b = 0; b != nbases_; ++b)
      if (word & (std::uint32_t(1) << b)) ext += extents_.at(spaces_[by_type_.at(std::uint32_t(1) << b)].label);
  }
  IndexSpace s{word, qn, label};
  extents_[label] = ext;
  by_label_[label] = spaces_.size();
  by_type_.emplace(word, spaces_.size());  // first declaration wins for aliases
  spaces_.push_back(s);
  return spaces_.back();
}

const IndexSpace& IndexSpaceRegistry::find(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) throw std::invalid_argument("unknown index space '" + label + "'");
  return spaces_[it->second];
}

const IndexSpace* IndexSpaceRegistry::find_type(std::uint32_t type) const {
  auto it = by_type_.find(type);
  return it == by_type_.end() ? nullptr : &spaces_[it->second];
}

IndexSpace IndexSpaceRegistry::intersect(const IndexSpace& a, const IndexSpace& b) const {
  if (a == b) return a;
  std::uint32_t w = a.type & b.type;
  if (w == 0) return null_space();
  if (w == a.type) return a;
  if (w == b.type) return b;
  const auto* s = find_type(w);
  if (!s) throw std::invalid_argument("intersection of '" + a.label + "' and '" + b.label + "' was never declared");
  return *s;
}

IndexSpace IndexSpaceRegistry::unite(const IndexSpace& a, const IndexSpace& b) const {
  std::uint32_t w = a.type | b.type;
  if (w == a.type) return a;
  if (w == b.type) return b;
  const auto* s = find_type(w);
  if (!s) throw std::invalid_argument("union of '" + a.label + "' and '" + b.label + "' was never declared");
  return *s;
}

IndexSpace IndexSpaceRegistry::restrict_to(const IndexSpace& s, std::uint32_t mask) const {
  std::uint32_t w = s.type & mask;
  if (w == 0) return null_space();
  if (w == s.type) return s;
  const auto* r = find_type(w);
  if (!r) throw std::invalid_argument("restriction of '" + s.label + "' is not a declared space");
  return *r;
}

bool IndexSpaceRegistry::is_base(const IndexSpace& s) const { return base_vacuum_.count(s.label) != 0; }

VacuumTrait IndexSpaceRegistry::vacuum(const IndexSpace& base) const {
  auto it = base_vacuum_.find(base.label);
  if (it == base_vacuum_.end()) throw std::invalid_argument("'" + base.label + "' is not a base space");
  return it->second;
}

std::size_t IndexSpaceRegistry::extent(const IndexSpace& s) const {
  auto it = extents_.find(s.label);
  if (it == extents_.end()) throw std::invalid_argument("no extent for index space '" + s.label + "'");
  return it->second;
}

void IndexSpaceRegistry::set_extent(const std::string& label, std::size_t extent) {
  find(label);
  extents_[label] = extent;
}

void IndexSpaceRegistry::set_symmetry_default(const std::string& tensor_label, const std::string& symtag) {
  check_mutable(*this);
  symmetry_defaults_[tensor_label] = symtag;
}

std::optional<std::string> IndexSpaceRegistry::symmetry_default(const std::string& tensor_label) const {
  auto it = symmetry_defaults_.find(tensor_label);
  if (it == symmetry_defaults_.end()) return std::nullopt;
  return it->second;
}

IndexSpaceRegistry IndexSpaceRegistry::from_json(const std::string& text) {
  using nlohmann::json;
  json j = json::parse(text);
  IndexSpaceRegistry r;
  for (const auto& b : j.at("bases")) {
    std::string vac = b.value("vacuum", "mixed");
    VacuumTrait v;
    if (vac == "occupied") v = VacuumTrait::occupied;
    else if (vac == "unoccupied") v = VacuumTrait::unoccupied;
    else if (vac == "mixed") v = VacuumTrait::mixed;
    else throw std::invalid_argument("unknown vacuum trait '" + vac + "'");
    r.register_base(b.at("label").get<std::string>(), v, b.value("extent", std::size_t{1}),
                    b.value("qn", std::uint32_t{0}));
  }
  if (j.contains("unions")) {
    for (const auto& u : j.at("unions")) {
      std::optional<std::size_t> ext;
      if (u.contains("extent")) ext = u.at("extent").get<std::size_t>();
      r.register_union(u.at("label").get<std::string>(), u.at("members").get<std::vector<std::string>>(), ext);
    }
  }
  if (j.contains("symmetry_defaults"))
    for (auto it = j["symmetry_defaults"].begin(); it != j["symmetry_defaults"].end(); ++it)
      r.set_symmetry_default(it.key(), it.value().get<std::string>());
  r.freeze();
  return r;
}

IndexSpaceRegistry IndexSpaceRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open registry file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {
std::mutex g_registry_mutex;
std::vector<std::unique_ptr<IndexSpaceRegistry>>& registry_store() {
  static std::vector<std::unique_ptr<IndexSpaceRegistry>> store;
  return store;
}
const IndexSpaceRegistry* g_current = nullptr;
}  // namespace

const IndexSpaceRegistry& default_registry() {
  std::lock_guard<std::mutex> lock(g_registry_mutex);
  if (!g_current) {
    registry_store().push_back(std::make_unique<IndexSpaceRegistry>(IndexSpaceRegistry::make_default()));
    g_current = registry_store().back().get();
  }
  return *g_current;
}

void set_default_registry(IndexSpaceRegistry reg) {
  std::lock_guard<std::mutex> lock(g_registry_mutex);
  reg.freeze();
  registry_store().push_back(std::make_unique<IndexSpaceRegistry>(std::move(reg)));
  g_current = registry_store().back().get();
}

}  // namespace tenet
