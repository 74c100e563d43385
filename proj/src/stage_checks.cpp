#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "holointerp/engine.hpp"
#include "holointerp/errors.hpp"

namespace holointerp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double image_norm(const AutWord& word, const CPoint& z) {
  try {
    return eval(word, z).norm();
  } catch (const Overflow&) {
    return kInf;
  }
}

double moved_by(const AutWord& word, const CPoint& w) {
  try {
    return distance(eval(word, w), w);
  } catch (const Overflow&) {
    return kInf;
  }
}

bool in_discs(const std::vector<ParamDisc>& discs, const CPoint& t) {
  return std::any_of(discs.begin(), discs.end(), [&](const ParamDisc& d) { return (t - d.center).norm() <= d.radius; });
}

// Interior and rim parameters of a disc, at least ~10^3 per disc.
std::vector<CPoint> disc_samples(const ParamDisc& d, double density, double offset) {
  const double spacing = std::min(1.0 / density, d.radius / 18.0);
  auto pts = ball_lattice(d.center, d.radius, spacing, offset);
  const auto rim = sphere_lattice(d.center, d.radius, spacing, offset);
  pts.insert(pts.end(), rim.begin(), rim.end());
  return pts;
}

void tally(ConditionResult& c, bool ok) {
  ++c.samples;
  if (!ok) ++c.violations;
}

// Condition (i) away from L: every point of X mapping into the ball must be
// connected to L inside the level set. Grid flood fill over the parameter
// plane for curves; a plain exclusion test otherwise.
void check_outside(ConditionResult& c, const AutWord& phi, const VarietyModel& X, const std::vector<ParamDisc>& L,
                   const CPoint& c0, double half_width, double radius, double density, double offset) {
  const double h = std::max(1.0 / density, 2.0 * half_width / 160.0);
  auto in_ball = [&](const CPoint& t) { return image_norm(phi, X.point(t)) <= radius; };
  if (X.param_dimension() != 1) {
    for (const auto& t : ball_lattice(c0, half_width, h, offset)) {
      bool near = std::any_of(L.begin(), L.end(),
                              [&](const ParamDisc& d) { return (t - d.center).norm() <= d.radius + 2.0 * h; });
      if (near) continue;
      tally(c, !in_ball(t));
    }
    return;
  }
  const long cells = static_cast<long>(std::ceil(half_width / h));
  const long side = 2 * cells + 1;
  auto param = [&](long i, long j) {
    CPoint t = c0;
    t[0] += Complex((static_cast<double>(i - cells) + offset) * h, (static_cast<double>(j - cells) + offset) * h);
    return t;
  };
  std::vector<char> inside(static_cast<std::size_t>(side * side), 0);
  std::vector<char> reached(inside.size(), 0);
  std::deque<long> queue;
  for (long i = 0; i < side; ++i) {
    for (long j = 0; j < side; ++j) {
      const CPoint t = param(i, j);
      const auto idx = static_cast<std::size_t>(i * side + j);
      inside[idx] = in_ball(t);
      if (!inside[idx]) continue;
      const bool seed = std::any_of(L.begin(), L.end(), [&](const ParamDisc& d) {
        return (t - d.center).norm() <= d.radius + 1.5 * h;
      });
      if (seed) {
        reached[idx] = 1;
        queue.push_back(i * side + j);
      }
    }
  }
  while (!queue.empty()) {
    const long cur = queue.front();
    queue.pop_front();
    const long i = cur / side;
    const long j = cur % side;
    for (long di = -1; di <= 1; ++di) {
      for (long dj = -1; dj <= 1; ++dj) {
        const long a = i + di;
        const long b = j + dj;
        if (a < 0 || b < 0 || a >= side || b >= side) continue;
        const auto idx = static_cast<std::size_t>(a * side + b);
        if (inside[idx] && !reached[idx]) {
          reached[idx] = 1;
          queue.push_back(a * side + b);
        }
      }
    }
  }
  for (long i = 0; i < side; ++i) {
    for (long j = 0; j < side; ++j) {
      if (in_discs(L, param(i, j))) continue;
      const auto idx = static_cast<std::size_t>(i * side + j);
      tally(c, !inside[idx] || reached[idx]);
    }
  }
}

void finish(ConditionResult& c) { c.pass = c.violations == 0; }

}  // namespace

bool StageRecord::pass() const {
  return cond_i.pass && cond_ii.pass && cond_iii.pass && cond_iv.pass && cond_v.pass && remark.pass;
}

std::vector<StageRecord> evaluate_stages(const InterpolationProblem& problem, const AutWord& word, double density,
                                         double offset) {
  const auto& P = problem;
  const auto& X = P.variety;
  const std::size_t J = P.sources.size();
  const std::size_t K = word.stages.size();
  const auto& r = word.schedule;
  if (r.size() < K + 1) throw ValidationError("schedule", "needs one more radius than stages");
  const CPoint origin = CPoint::Zero(static_cast<Eigen::Index>(P.dimension));
  const auto words = stage_words(word);
  const CPoint c0 = X.nearest_param(origin);
  const double base = X.point(c0).norm() < r[0] ? r[0] / double(K + 1) : 0.0;
  std::vector<CPoint> params(J);
  double far_param = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    params[j] = X.nearest_param(P.sources.points[j]);
    far_param = std::max(far_param, (params[j] - c0).norm());
  }

  std::vector<StageRecord> records;
  std::vector<ParamDisc> prev_L;
  AutWord prev_phi = identity_word(P.dimension);
  for (std::size_t k = 1; k <= K; ++k) {
    const AutWord phi = word.slice(0, word.stages[k - 1].end);
    StageRecord rec;
    rec.stage = k;
    rec.radius = r[k - 1];
    rec.next_radius = r[k];
    rec.word_length = phi.size();

    std::vector<CPoint> pos(J);
    std::vector<bool> matched(J, false);
    for (std::size_t j = 0; j < J; ++j) {
      try {
        pos[j] = eval(phi, P.sources.points[j]);
        matched[j] = distance(pos[j], P.targets.points[j]) <= P.tolerances.match;
      } catch (const Overflow&) {
        pos[j] = CPoint::Constant(static_cast<Eigen::Index>(P.dimension), kInf);
      }
      rec.matched_count += matched[j];
    }
    const Ball next_ball(origin, r[k]);
    rec.L = level_discs(phi, P, matched, next_ball, prev_L);
    const auto& L = rec.L;

    // (i)
    for (const auto& d : L) {
      for (const auto& t : disc_samples(d, density, offset)) {
        tally(rec.cond_i, image_norm(phi, X.point(t)) <= r[k] + P.tolerances.membership);
      }
    }
    check_outside(rec.cond_i, phi, X, L, c0, std::max(far_param, r[k]) + 2.0, r[k], density, offset);
    rec.cond_i.value = static_cast<double>(rec.cond_i.violations);
    finish(rec.cond_i);

    // (ii) and (iii)
    for (std::size_t j = 0; j < J; ++j) {
      const bool a_in_L = in_discs(L, params[j]);
      if (a_in_L) {
        const double res = distance(pos[j], P.targets.points[j]);
        rec.cond_ii.value = std::max(rec.cond_ii.value, res);
        tally(rec.cond_ii, res <= P.tolerances.match);
      }
      const CPoint& bj = P.targets.points[j];
      bool b_in = bj.norm() <= r[k - 1] + P.tolerances.membership;
      for (const auto& d : L) {
        if (b_in) break;
        GraphPiece piece{X, d.center, d.radius, std::make_shared<WordMap>(phi), 0.0};
        b_in = piece.contains(bj, P.tolerances.membership);
      }
      if (b_in) tally(rec.cond_iii, matched[j] && a_in_L);
    }
    rec.cond_ii.bound = P.tolerances.match;
    rec.cond_iii.value = static_cast<double>(rec.cond_iii.violations);
    finish(rec.cond_ii);
    finish(rec.cond_iii);

    if (k >= 2) {
      // (iv): L_{k-1} and K_{k-1} inside the interior of L_k.
      std::vector<ParamDisc> inner = prev_L;
      if (base > 0.0) inner.push_back({c0, base * double(k - 1), std::nullopt});
      rec.cond_iv.value = kInf;
      for (const auto& d : inner) {
        for (const auto& t : sphere_lattice(d.center, d.radius, d.radius / 160.0, offset)) {
          double margin = -kInf;
          for (const auto& e : L) margin = std::max(margin, e.radius - (t - e.center).norm());
          rec.cond_iv.value = std::min(rec.cond_iv.value, margin);
          tally(rec.cond_iv, margin > 0.0);
        }
      }
      if (!std::isfinite(rec.cond_iv.value)) rec.cond_iv.value = 0.0;

      // (v): |Phi_k - Phi_{k-1}| on B_{k-1} (its sphere suffices) and on L_{k-1}.
      const AutWord& theta = words[k - 1];
      double dev = 0.0;
      std::size_t count = 0;
      for_each_sphere_point(origin, r[k - 2], 1.0 / density, offset, [&](const CPoint& w) {
        dev = std::max(dev, moved_by(theta, w));
        ++count;
      });
      for (const auto& d : prev_L) {
        for (const auto& t : disc_samples(d, density, offset)) {
          try {
            dev = std::max(dev, moved_by(theta, eval(prev_phi, X.point(t))));
          } catch (const Overflow&) {
            dev = kInf;
          }
          ++count;
        }
      }
      rec.cond_v.value = dev;
      rec.cond_v.bound = P.epsilon * std::ldexp(1.0, -static_cast<int>(k));
      rec.cond_v.samples = count;
      rec.cond_v.violations = dev < rec.cond_v.bound ? 0 : 1;
    }
    finish(rec.cond_iv);
    finish(rec.cond_v);

    // Sources unmatched after the next stage lie outside B_{k+2}.
    if (k < K) {
      const AutWord next = word.slice(0, word.stages[k].end);
      for (std::size_t j = 0; j < J; ++j) {
        double res = kInf;
        double norm = kInf;
        try {
          const CPoint w = eval(next, P.sources.points[j]);
          res = distance(w, P.targets.points[j]);
          norm = w.norm();
        } catch (const Overflow&) {
        }
        if (res <= P.tolerances.match) continue;
        tally(rec.remark, norm > r[k + 1]);
      }
    }
    rec.remark.value = static_cast<double>(rec.remark.violations);
    finish(rec.remark);

    records.push_back(std::move(rec));
    prev_L = records.back().L;
    prev_phi = phi;
  }
  return records;
}

}  // namespace holointerp
