#pragma once

#include <functional>

#include "holointerp/geometry.hpp"

namespace holointerp::detail {

using Objective = std::function<double(const CPoint&)>;

/// Minimum of f over the closed ball (or its boundary sphere): lattice scan
/// followed by a shrinking compass search. Returns the value; writes the
/// minimiser to argmin when given.
double minimize_on_ball(const Objective& f, const CPoint& center, double radius, CPoint* argmin,
                        bool boundary_only = false);

inline CPoint argmin_on_ball(const Objective& f, const CPoint& center, double radius) {
  CPoint best;
  minimize_on_ball(f, center, radius, &best);
  return best;
}

}  // namespace holointerp::detail
