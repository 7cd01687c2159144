#pragma once

#include <array>
#include <cstdint>

namespace slsfem {

/// Philox4x32-10 counter-based block cipher (Salmon et al. constants).
/// Pure function of (counter, key); no state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Maps 64 random bits to a uniform double in the open interval (0,1).
double uniform_from_bits(std::uint64_t bits);

/// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16),
/// accurate to about 1 ulp over (0,1).
double inverse_normal_cdf(double p);

/// Reproducible Gaussian draws addressed by (sample, step, mode,
/// component): each address yields exactly one N(0,1) value, independent
/// of evaluation order. The generation method is frozen: Philox4x32-10
/// keyed by the seed, counter = (sample lo, sample hi, step,
/// 2*mode+component), top 64 output bits -> uniform -> AS 241.
class GaussianCounterStream {
 public:
  explicit GaussianCounterStream(std::uint64_t seed) : seed_(seed) {}

  double normal(std::uint64_t sample, std::uint32_t step, std::uint32_t mode,
                std::uint32_t component) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace slsfem
