#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace depsel {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hash of a component label, stable across runs and platforms (FNV-1a).
std::uint64_t label_hash(std::string_view label);

/// Derives a child seed from a parent seed, a component label and indices.
/// Every random stream in the library is obtained this way so that no
/// module owns an unseeded generator.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                          std::initializer_list<std::uint64_t> indices = {});

inline Engine make_engine(std::uint64_t seed) { return Engine(mix64(seed)); }

}  // namespace depsel
