#include "tenet/color.hpp"

namespace tenet {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Color color(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(h);
}

Color color(std::uint64_t v) { return mix(v ^ 0x5bd1e9955bd1e995ULL); }

Color ccolor(Color object, Color shade) { return mix(object * 0xff51afd7ed558ccdULL + mix(shade)); }

}  // namespace tenet
