// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/rng.hpp>

#include <synclift/error.hpp>

#include <numeric>
#include <sstream>

namespace synclift {

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[index(i)]);
  return p;
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::set_state(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (!is) throw FormatError("invalid RNG state");
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view role) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : role) {
    h ^= c;
    h *= 1099511628211ull;
  }
  // splitmix64 finalizer over the combination
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace synclift
