#include "depsel/random.hpp"

namespace depsel {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = mix64(parent ^ mix64(label_hash(label)));
  for (std::uint64_t i : indices) h = mix64(h ^ mix64(i + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace depsel
