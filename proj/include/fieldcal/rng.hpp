#ifndef FIELDCAL_RNG_HPP
#define FIELDCAL_RNG_HPP

#include <cstdint>
#include <random>

namespace fieldcal {

// splitmix64 step; used to derive independent stream seeds from (seed, index)
// so per-row noise is reproducible regardless of evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Thin wrapper around mt19937_64 so every stochastic operation draws from a
// single explicitly seeded source. Distribution objects are constructed per
// call; the sequence of engine states is then a pure function of the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  // shape/scale parameterization
  double gamma(double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(gen_);
  }

  // X ~ InvGamma(shape, rate): 1/X ~ Gamma(shape, 1/rate)
  double inv_gamma(double shape, double rate) {
    return 1.0 / std::gamma_distribution<double>(shape, 1.0 / rate)(gen_);
  }

  double chi_square(double df) { return gamma(0.5 * df, 2.0); }

  // uniform over {0, 1, ..., n-1}
  int uniform_int(int n) {
    return static_cast<int>(std::uniform_int_distribution<long>(0, n - 1)(gen_));
  }

  int sign() { return uniform() < 0.5 ? -1 : 1; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fieldcal

#endif  // FIELDCAL_RNG_HPP
