#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"

namespace emosens::detail {

inline void check_training_set(const Matrix& x, std::span<const Emotion> y) {
  if (x.rows() == 0 || y.empty()) throw Error(ErrorKind::EmptyTrain, "training set is empty");
  if (x.rows() != y.size()) {
    throw Error(ErrorKind::ShapeError, std::to_string(x.rows()) + " rows but " +
                                           std::to_string(y.size()) + " labels");
  }
}

// Threshold between two adjacent sorted values; never rounds up onto `hi`.
inline double midpoint_threshold(double lo, double hi) {
  double t = lo / 2.0 + hi / 2.0;
  if (t >= hi || t < lo) t = lo;
  return t;
}

// splitmix64 of (seed, stream) for independent per-tree generators.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Lowest index wins ties.
inline std::size_t argmax(const ClassScores& s) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return best;
}

}  // namespace emosens::detail
