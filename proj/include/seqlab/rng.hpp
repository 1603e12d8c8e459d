#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace seqlab {

// Portable seeded generator. std::mt19937_64's output sequence is fixed by the
// standard; the standard distributions are not, so bounded draws and shuffles
// are implemented here to keep every report bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Child seed for chunk `index`; splitmix64 finalizer over (seed, index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seqlab
