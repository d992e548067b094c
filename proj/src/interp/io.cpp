#include "tenet/interp.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace tenet {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw EvalError("TNT1: truncated file");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

}  // namespace

DenseTensor read_tnt1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw EvalError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "TNT1", 4) != 0) throw EvalError(path + ": not a TNT1 file");
  const std::uint64_t rank = get_u64(is);
  if (rank > 64) throw EvalError(path + ": implausible mode count");
  std::vector<std::size_t> ext;
  for (std::uint64_t k = 0; k < rank; ++k) ext.push_back(static_cast<std::size_t>(get_u64(is)));
  DenseTensor t(ext);
  for (auto& x : t.data) x = std::bit_cast<double>(get_u64(is));
  return t;
}

void write_tnt1(const std::string& path, const DenseTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw EvalError("cannot write " + path);
  os.write("TNT1", 4);
  put_u64(os, t.extents.size());
  for (auto e : t.extents) put_u64(os, e);
  for (double x : t.data) put_u64(os, std::bit_cast<std::uint64_t>(x));
}

DenseTensor tensor_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  DenseTensor t(j.at("extents").get<std::vector<std::size_t>>());
  auto d = j.at("data").get<std::vector<double>>();
  if (d.size() != t.size()) throw EvalError("tensor JSON: data has " + std::to_string(d.size()) + " elements, expected " +
                                            std::to_string(t.size()));
  t.data = std::move(d);
  return t;
}

std::string tensor_to_json(const DenseTensor& t) {
  nlohmann::json j;
  j["extents"] = t.extents;
  j["data"] = t.data;
  return j.dump();
}

Result result_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.is_number()) return Result(j.get<double>());
  return Result(tensor_from_json(text));
}

std::string result_to_json(const Result& r) {
  if (r.is_scalar()) return nlohmann::json(r.scalar()).dump();
  return tensor_to_json(r.tensor());
}

}  // namespace tenet
