#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "holointerp/engine.hpp"
#include "holointerp/errors.hpp"
#include "minimize.hpp"

namespace holointerp {

namespace {

constexpr double kRimSamples = 2048.0;

std::vector<CPoint> ray_directions(std::size_t m) {
  std::vector<CPoint> dirs;
  if (m == 1) {
    constexpr int kRays = 64;
    for (int i = 0; i < kRays; ++i) {
      CPoint v(1);
      v[0] = std::polar(1.0, 2.0 * std::numbers::pi * i / kRays);
      dirs.push_back(v);
    }
    return dirs;
  }
  return sphere_lattice(CPoint::Zero(static_cast<Eigen::Index>(m)), 1.0, 0.35, 0.0);
}

}  // namespace

LevelDisc centered_level_disc(const AutWord& word, const VarietyModel& variety, const Ball& ball, const CPoint& center,
                              double resolution, double margin, double floor) {
  auto inside = [&](const CPoint& t) {
    try {
      return ball.contains(eval(word, variety.point(t)), 0.0);
    } catch (const Overflow&) {
      return false;
    }
  };
  LevelDisc out;
  if (!inside(center)) return out;

  const double cap = 64.0 * (1.0 + ball.radius + distance(variety.point(center), ball.center));
  const double tiny = 1e-7 * (1.0 + ball.radius);
  double inner = cap;
  double outer = 0.0;
  for (const auto& v : ray_directions(variety.param_dimension())) {
    // March outwards geometrically, scan the last step finely, then bisect.
    double lo = 0.0;
    double hi = tiny;
    while (hi < cap && inside(center + hi * v)) {
      lo = hi;
      hi *= 1.5;
    }
    if (hi >= cap) {
      hi = cap;
      if (inside(center + cap * v)) {
        outer = std::max(outer, cap);
        continue;
      }
    }
    const double step = (hi - lo) / 12.0;
    for (int i = 1; i < 12; ++i) {
      const double s = lo + step * i;
      if (!inside(center + s * v)) {
        hi = s;
        break;
      }
      lo = s;
    }
    for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(center + mid * v) ? lo : hi) = mid;
    }
    inner = std::min(inner, lo);
    outer = std::max(outer, lo);
  }
  // Compositions of damped shears grow so fast that the level set can carry
  // thin fingers between rays. A disc is accepted only when a dense rim maps
  // at least `margin` inside the ball with consecutive images close together;
  // by the maximum principle the rim controls the whole disc.
  const auto m = variety.param_dimension();
  const double step_limit = std::max(margin, 0.02 * ball.radius);
  auto rim_ok = [&](double rho) {
    const double spacing = m == 1 ? 2.0 * std::numbers::pi * rho / kRimSamples : rho / 24.0;
    CPoint first, prev;
    bool have = false;
    for (const auto& t : sphere_lattice(center, rho, spacing, 0.0)) {
      CPoint w;
      try {
        w = eval(word, variety.point(t));
      } catch (const Overflow&) {
        return false;
      }
      if (distance(w, ball.center) > ball.radius - margin) return false;
      if (m == 1) {
        if (have && distance(w, prev) > step_limit) return false;
        if (!have) first = w;
        prev = w;
        have = true;
      }
    }
    if (m == 1 && have && distance(first, prev) > step_limit) return false;
    // Sampling alone misses sharp fingers; climb from the coarse rim as well.
    auto neg = [&](const CPoint& t) {
      try {
        return -(eval(word, variety.point(t)) - ball.center).squaredNorm();
      } catch (const Overflow&) {
        return -std::numeric_limits<double>::infinity();
      }
    };
    const double top = -detail::minimize_on_ball(neg, center, rho, nullptr, true);
    return std::sqrt(top) <= ball.radius - margin;
  };
  double lo = inner;
  if (!rim_ok(lo)) {
    double hi = lo;
    for (int shrink = 0; shrink < 400; ++shrink) {
      hi = lo;
      lo *= 0.97;
      if (rim_ok(lo)) break;
    }
    for (int it = 0; it < 60 && hi - lo > 0.25 * resolution; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rim_ok(mid) ? lo : hi) = mid;
    }
  }
  // A disc known from the previous stage should grow strictly.
  if (floor > 0.0 && lo <= floor) {
    for (int i = 4; i <= 24; ++i) {
      const double rho = floor * (1.0 + std::ldexp(1.0, -i));
      if (rim_ok(rho)) {
        lo = rho;
        break;
      }
    }
  }
  out.radius = lo;
  out.outer = outer;
  return out;
}

bool is_empty_piece(const GraphPiece& piece) { return piece.param_radius < 0.0; }

GraphPiece level_set_L(const AutWord& word, const VarietyModel& variety, const Ball& ball, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("resolution", "must be positive");
  GraphPiece piece{variety, variety.nearest_param(ball.center), -1.0, nullptr, 0.0};
  const LevelDisc d = centered_level_disc(word, variety, ball, piece.param_center, resolution, resolution, 0.0);
  if (d.empty()) return piece;
  const double band = d.outer - d.radius;
  if (band > 0.10 * d.radius || resolution > 0.10 * d.radius) {
    throw ResolutionTooCoarse("level set band " + std::to_string(band) + " exceeds 10% of radius " +
                              std::to_string(d.radius));
  }
  piece.param_radius = d.radius;
  return piece;
}

std::vector<ParamDisc> level_discs(const AutWord& word, const InterpolationProblem& problem,
                                   const std::vector<bool>& matched, const Ball& ball,
                                   const std::vector<ParamDisc>& previous) {
  const auto& X = problem.variety;
  constexpr double kResolution = 1e-3;
  const double margin = 0.02 * ball.radius;
  auto floor_at = [&](const CPoint& t) {
    for (const auto& d : previous) {
      if ((d.center - t).norm() == 0.0) return d.radius;
    }
    return 0.0;
  };
  std::vector<ParamDisc> discs;
  const CPoint c0 = X.nearest_param(ball.center);
  if (const auto d = centered_level_disc(word, X, ball, c0, kResolution, margin, floor_at(c0)); !d.empty()) {
    discs.push_back({c0, d.radius, std::nullopt});
  }
  for (std::size_t j = 0; j < problem.sources.size(); ++j) {
    if (!matched[j] || !ball.contains(problem.targets.points[j], 0.0)) continue;
    const CPoint t = X.nearest_param(problem.sources.points[j]);
    const bool covered = std::any_of(discs.begin(), discs.end(), [&](const ParamDisc& d) {
      return (t - d.center).norm() < d.radius;
    });
    if (covered) continue;
    if (const auto d = centered_level_disc(word, X, ball, t, kResolution, margin, floor_at(t)); !d.empty()) {
      discs.push_back({t, d.radius, j});
    }
  }
  return discs;
}

CertifiedCompact disc_pieces(const VarietyModel& variety, const std::vector<ParamDisc>& discs,
                             std::shared_ptr<const PointMap> map, double thickness) {
  std::vector<Atom> atoms;
  for (const auto& d : discs) atoms.emplace_back(GraphPiece{variety, d.center, d.radius, map, thickness});
  const Certificate tag = atoms.size() == 1 ? Certificate::GraphDisc : Certificate::DisjointGraphDiscs;
  return CertifiedCompact(std::move(atoms), map ? Certificate::Image : tag);
}

}  // namespace holointerp
