#include "minimize.hpp"

#include <cmath>
#include <limits>

namespace holointerp::detail {

namespace {

CPoint project(const CPoint& x, const CPoint& center, double radius, bool boundary_only) {
  const CPoint v = x - center;
  const double n = v.norm();
  if (n == 0.0) return boundary_only ? CPoint(center + CPoint::Unit(center.size(), 0) * radius) : x;
  if (n > radius || boundary_only) return center + v * (radius / n);
  return x;
}

}  // namespace

double minimize_on_ball(const Objective& f, const CPoint& center, double radius, CPoint* argmin,
                        bool boundary_only) {
  const auto m = center.size();
  if (radius <= 0.0) {
    if (argmin) *argmin = center;
    return f(center);
  }
  // Coarser scans in higher parameter dimension keep the cost bounded.
  const double cells = m == 1 ? 24.0 : (m == 2 ? 6.0 : 3.0);
  const double spacing = radius / cells;
  auto candidates = sphere_lattice(center, radius, spacing, 0.0);
  if (!boundary_only) {
    auto inner = ball_lattice(center, radius, spacing, 0.0);
    candidates.insert(candidates.end(), inner.begin(), inner.end());
  }
  CPoint best = center;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double v = f(c);
    if (v < best_val) {
      best_val = v;
      best = c;
    }
  }
  double step = spacing;
  const double floor = 1e-15 * (1.0 + radius + best.norm());
  for (int iter = 0; step > floor && iter < 20000; ++iter) {
    bool improved = false;
    for (Eigen::Index k = 0; k < m; ++k) {
      for (const Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
        CPoint trial = best;
        trial[k] += step * dir;
        trial = project(trial, center, radius, boundary_only);
        const double v = f(trial);
        if (v < best_val) {
          best_val = v;
          best = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  if (argmin) *argmin = best;
  return best_val;
}

}  // namespace holointerp::detail
