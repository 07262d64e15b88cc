#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dimc {

// Seeded random stream. A (seed, stream_id) pair fixes the whole draw
// sequence: the engine is std::mt19937_64 seeded through std::seed_seq, and
// every transform below is platform-independent code (no std:: distributions).
class RandomStream {
public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Independent stream derived from this stream's (seed, id) and `id`.
  // Does not consume draws from *this.
  RandomStream child(std::uint64_t id) const;

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); safe to take the log of.
  double uniform_positive();
  double normal(double mean, double sd);
  // Uniform index in [0, n).
  std::size_t index(std::size_t n);
  // Index i with probability weights[i] / sum(weights).
  std::size_t discrete(std::span<const double> weights);
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace dimc
