#pragma once

// Brute-force split searches used as oracles for the tree learners.

#include <array>
#include <cstddef>
#include <set>
#include <vector>

#include "emosens/emotion.hpp"
#include "emosens/matrix.hpp"

namespace oracle {

struct RootSplit {
  int feature = -1;  // -1: no valid split
  double threshold = 0.0;
};

// Best Gini root split over every (feature, midpoint) pair. Compares
// sum_L/n_L + sum_R/n_R exactly with integer cross-multiplication; ties go to
// the lowest feature, then the lowest threshold.
inline RootSplit best_root_split(const emosens::Matrix& x, const std::vector<emosens::Emotion>& y) {
  RootSplit best;
  long long best_num = -1, best_den = 1;
  const std::size_t n = x.rows();
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> values;
    for (std::size_t r = 0; r < n; ++r) values.insert(x(r, f));
    for (auto it = values.begin(); it != values.end() && std::next(it) != values.end(); ++it) {
      const double t = (*it + *std::next(it)) / 2.0;
      std::array<long long, emosens::kNumEmotions> cl{}, cr{};
      long long nl = 0, nr = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (x(r, f) <= t) {
          ++cl[emosens::index_of(y[r])];
          ++nl;
        } else {
          ++cr[emosens::index_of(y[r])];
          ++nr;
        }
      }
      long long sl = 0, sr = 0;
      for (std::size_t k = 0; k < emosens::kNumEmotions; ++k) {
        sl += cl[k] * cl[k];
        sr += cr[k] * cr[k];
      }
      const long long num = sl * nr + sr * nl, den = nl * nr;
      if (best.feature < 0 || num * best_den > best_num * den) {
        best_num = num;
        best_den = den;
        best = {static_cast<int>(f), t};
      }
    }
  }
  return best;
}

// Largest second-order gain GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l) over every
// cut between distinct values, without binning. 0 when nothing improves.
inline double exact_best_gain(const emosens::Matrix& x, const std::vector<double>& g, const std::vector<double>& h,
                              double lambda) {
  double G = 0, H = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    G += g[r];
    H += h[r];
  }
  double best = 0.0;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> values;
    for (std::size_t r = 0; r < x.rows(); ++r) values.insert(x(r, f));
    for (auto it = values.begin(); it != values.end() && std::next(it) != values.end(); ++it) {
      double gl = 0, hl = 0;
      for (std::size_t r = 0; r < x.rows(); ++r) {
        if (x(r, f) <= *it) {
          gl += g[r];
          hl += h[r];
        }
      }
      const double gain =
          gl * gl / (hl + lambda) + (G - gl) * (G - gl) / (H - hl + lambda) - G * G / (H + lambda);
      if (gain > best) best = gain;
    }
  }
  return best;
}

}  // namespace oracle
