#pragma once

// Shared helpers for the unit tests. Kept independent of the library code paths
// they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "holointerp/geometry.hpp"

namespace oracle {

using holointerp::Complex;
using holointerp::CPoint;

/// Portable uniform [0,1) from a 64-bit engine.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Rejection-sampled uniform points in the ball of radius r in C^n.
inline std::vector<CPoint> random_ball_points(std::uint64_t seed, std::size_t count, std::size_t n, double r) {
  std::mt19937_64 rng(seed);
  std::vector<CPoint> out;
  while (out.size() < count) {
    CPoint z(static_cast<Eigen::Index>(n));
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = (2.0 * unit(rng) - 1.0) * r;
      const double y = (2.0 * unit(rng) - 1.0) * r;
      z[static_cast<Eigen::Index>(k)] = Complex(x, y);
      norm2 += x * x + y * y;
    }
    if (norm2 <= r * r) out.push_back(z);
  }
  return out;
}

inline double brute_min_distance(const std::vector<CPoint>& pts) {
  double best = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (Eigen::Index k = 0; k < pts[i].size(); ++k) s += std::norm(pts[i][k] - pts[j][k]);
      best = std::min(best, std::sqrt(s));
    }
  }
  return best;
}

}  // namespace oracle
