#ifndef MOROZOV_RANDOM_H_
#define MOROZOV_RANDOM_H_

#include <cstdint>
#include <random>

#include "morozov/types.h"

namespace morozov {

// splitmix64 finalizer applied to base ^ golden-ratio-scaled index. Used to
// derive independent child streams for multi-run studies.
std::uint64_t MixSeed(std::uint64_t base, std::uint64_t index);

// All randomness in the library flows through this type: a 64-bit Mersenne
// Twister (std::mt19937_64, whose output sequence is fixed by the standard)
// driving Boost.Random distributions, which are portable across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform(double lo = 0.0, double hi = 1.0);
  double Normal(double mean = 0.0, double stddev = 1.0);
  // Uniform integer in [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  Vector NormalVector(Eigen::Index n);
  Matrix NormalMatrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace morozov

#endif  // MOROZOV_RANDOM_H_
