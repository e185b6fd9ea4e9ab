#include "coexist/rng.hpp"

namespace coexist {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  // FNV-1a, then mixed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

std::uint64_t stream_seed(std::uint64_t root, std::string_view label, std::uint64_t key_a,
                          std::uint64_t key_b) {
  std::uint64_t s = splitmix64(root ^ hash_label(label));
  s = splitmix64(s ^ splitmix64(key_a + 0x632BE59BD9B4E019ULL));
  s = splitmix64(s ^ splitmix64(key_b + 0x8CB92BA72F3D8DD7ULL));
  return s;
}

Rng make_stream(std::uint64_t root, std::string_view label, std::uint64_t key_a,
                std::uint64_t key_b) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream_seed(root, label, key_a, key_b)),
                    static_cast<std::uint32_t>(stream_seed(root, label, key_a, key_b) >> 32)};
  return Rng(seq);
}

}  // namespace coexist
