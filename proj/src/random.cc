#include "morozov/random.h"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace morozov {

std::uint64_t MixSeed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base ^ (index * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::Uniform(double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::Normal(double mean, double stddev) {
  return boost::random::normal_distribution<double>(mean, stddev)(engine_);
}

std::int64_t Rng::UniformInt(std::int64_t lo, std::int64_t hi) {
  return boost::random::uniform_int_distribution<std::int64_t>(lo, hi)(
      engine_);
}

Vector Rng::NormalVector(Eigen::Index n) {
  boost::random::normal_distribution<double> dist;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(engine_);
  return v;
}

Matrix Rng::NormalMatrix(Eigen::Index rows, Eigen::Index cols) {
  boost::random::normal_distribution<double> dist;
  Matrix m(rows, cols);
  // Row-major fill so the stream order matches reading the matrix row by row.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(engine_);
  }
  return m;
}

}  // namespace morozov
