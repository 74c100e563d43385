#include "holointerp/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "holointerp/errors.hpp"

namespace holointerp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Unmatched targets keep this distance from every chosen sphere; unmatched
// sources keep it just outside.
constexpr double kTargetGap = 0.75;
constexpr double kSourceGap = 0.3;
// Expelled sources are parked at this multiple of the new radius.
constexpr double kExpelFactor = 1.25;
// Fraction of epsilon 2^-k spent by construction; the rest is margin.
constexpr double kBudgetFraction = 0.45;

double nearest_gap(const CPoint& q, const std::vector<CPoint>& others) {
  double gap = kInf;
  for (const auto& o : others) gap = std::min(gap, distance(q, o));
  return gap;
}

// Park p on the sphere of the given radius along its own complex line,
// rotating the phase until it clears every point in avoid.
CPoint expel_target(const CPoint& p, double radius, const std::vector<CPoint>& avoid) {
  const CPoint dir = p / p.norm();
  for (int i = 0; i < 96; ++i) {
    const double alpha = (i % 2 ? 1.0 : -1.0) * 0.13 * ((i + 1) / 2);
    const CPoint q = radius * std::polar(1.0, alpha) * dir;
    if (nearest_gap(q, avoid) >= 0.5) return q;
  }
  throw StepInfeasible("no free spot to expel a source to");
}

// Smallest radius >= start whose sphere keeps the unmatched targets kTargetGap
// away and has no remaining source in the shell just outside it.
double clear_radius(double start, const std::vector<CPoint>& targets, const std::vector<CPoint>& sources) {
  double r = start;
  for (int guard = 0; guard < 100000; ++guard) {
    bool ok = true;
    for (const auto& b : targets) {
      if (std::abs(b.norm() - r) < kTargetGap) ok = false;
    }
    for (const auto& p : sources) {
      const double s = p.norm();
      if (s >= r && s <= r + kSourceGap) ok = false;
    }
    if (ok) return r;
    r += 0.05;
  }
  throw StepInfeasible("no admissible radius");
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

// ---------------------------------------------------------------------------
// Problem

void InterpolationProblem::validate() const {
  if (dimension < 2) throw ValidationError("dimension", "must exceed 1");
  if (variety.dimension() != dimension) throw ValidationError("variety", "dimension differs from the problem");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon", "must lie in (0,1)");
  if (stages < 1) throw ValidationError("stages", "must be positive");
  if (!(r1 > 0.0)) throw ValidationError("r1", "must be positive");
  if (!(r2 - r1 > 1.0)) throw ValidationError("r2", "must exceed r1 + 1");
  if (!(grid_density > 0.0)) throw ValidationError("grid_density", "must be positive");
  if (sources.size() != targets.size()) throw ValidationError("targets", "length differs from sources");
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (static_cast<std::size_t>(sources.points[j].size()) != dimension) {
      throw ValidationError("sources", "point " + std::to_string(j) + " has the wrong dimension");
    }
    if (static_cast<std::size_t>(targets.points[j].size()) != dimension) {
      throw ValidationError("targets", "point " + std::to_string(j) + " has the wrong dimension");
    }
    if (!is_finite(sources.points[j]) || !is_finite(targets.points[j])) {
      throw ValidationError("sources", "point " + std::to_string(j) + " is not finite");
    }
    const double off = variety.distance(sources.points[j]);
    if (off > tolerances.membership) {
      throw ValidationError("sources", "point " + std::to_string(j) + " lies off the variety by " + std::to_string(off));
    }
  }
  for (const auto* seq : {&sources, &targets}) {
    if (seq->points.empty()) continue;
    try {
      check_discrete(*seq, tolerances.duplicate);
    } catch (const DuplicatePoint& e) {
      throw ValidationError(seq == &sources ? "sources" : "targets", e.what());
    }
  }
}

InterpolationProblem seeded_instance(std::uint64_t seed, std::size_t count) {
  InterpolationProblem p;
  p.dimension = 2;
  p.variety = VarietyModel::first_axis(2);
  p.seed = seed;
  std::mt19937_64 rng(seed);
  constexpr double kReach = 20.0;
  while (p.targets.size() < count) {
    CPoint b(2);
    b[0] = {kReach * (2 * uniform01(rng) - 1), kReach * (2 * uniform01(rng) - 1)};
    b[1] = {kReach * (2 * uniform01(rng) - 1), kReach * (2 * uniform01(rng) - 1)};
    if (b.norm() > kReach || nearest_gap(b, p.targets.points) < 0.5) continue;
    p.targets.points.push_back(b);
  }
  std::stable_sort(p.targets.points.begin(), p.targets.points.end(),
                   [](const CPoint& a, const CPoint& b) { return a.norm() < b.norm(); });
  for (std::size_t j = 1; j <= count; ++j) p.sources.points.push_back(make_point({double(j), 0.0}));
  p.sources.min_separation = 1.0;
  p.targets.min_separation = 0.5;
  return p;
}

// ---------------------------------------------------------------------------
// Membership

std::vector<AutWord> stage_words(const AutWord& word) {
  std::vector<AutWord> out;
  for (const auto& s : word.stages) out.push_back(word.slice(s.begin, s.end));
  return out;
}

Membership fb_membership(const std::vector<AutWord>& words, const std::vector<double>& schedule, const CPoint& z) {
  if (schedule.size() < words.size()) throw ValidationError("schedule", "fewer radii than stages");
  CPoint w = z;
  std::size_t last_inside = 0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    try {
      w = eval(words[k], w);
    } catch (const Overflow&) {
      break;
    }
    if (w.norm() <= schedule[k]) last_inside = k + 1;
  }
  if (!words.empty() && last_inside == words.size()) return {true, last_inside};
  return {false, last_inside + 1};
}

// ---------------------------------------------------------------------------
// Inductive step

StepOutput inductive_step(const StepInput& in) {
  if (!in.problem) throw ValidationError("problem", "missing");
  const auto& P = *in.problem;
  const auto& X = P.variety;
  const std::size_t n = P.dimension;
  const std::size_t J = P.sources.size();
  const auto& b = P.targets.points;
  if (in.positions.size() != J || in.matched.size() != J) throw ValidationError("state", "sizes differ from the problem");
  if (!(in.epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");

  StepOutput out;
  double eps = in.epsilon;
  std::vector<std::size_t> matched_idx;
  for (std::size_t j = 0; j < J; ++j) {
    if (in.matched[j]) matched_idx.push_back(j);
  }

  // Nudge: unmatched targets sitting on Phi_k(X).
  AutWord base = in.phi;
  std::vector<CPoint> pos = in.positions;
  const auto on_image = [&](const CPoint& z) {
    try {
      return X.distance(eval_inverse(in.phi, z));
    } catch (const Overflow&) {
      return kInf;
    }
  };
  auto BL = [&](const AutWord& map) {
    auto set = CertifiedCompact::ball(in.B);
    if (!in.L.empty()) {
      set = set.united(disc_pieces(X, in.L, std::make_shared<WordMap>(map)), Certificate::BallUnionGraph);
    }
    return set;
  };
  AutWord nu = identity_word(n);
  for (std::size_t j = 0; j < J; ++j) {
    if (!in.matched[j] && on_image(b[j]) < 1e-6) {
      nu = collision_nudge(on_image, n, P.targets, matched_idx, BL(in.phi), 0.1 * eps, 1e-6, in.options);
      eps *= 0.9;
      break;
    }
  }
  if (!nu.empty()) {
    base = base.then(nu);
    for (auto& p : pos) p = eval(nu, p);
  }
  const auto base_map = std::make_shared<WordMap>(base);
  const CertifiedCompact bl = BL(base);

  // D_0 c D around B u L, both clear of every unmatched point.
  double room = kInf;
  for (std::size_t j = 0; j < J; ++j) {
    if (in.matched[j]) continue;
    room = std::min({room, bl.distance(pos[j]), bl.distance(b[j])});
  }
  const double delta0 = std::isfinite(room) ? std::min(room / 3.0, 0.5) : 0.5;
  if (!(delta0 > 0.0)) throw StepInfeasible("an unmatched point touches B u L");
  eps = std::min(eps, 0.5 * delta0);
  out.delta0 = delta0;
  out.epsilon_used = eps;
  const CertifiedCompact D = bl.inflated(2.0 * delta0);
  const CertifiedCompact D0 = bl.inflated(delta0);

  // M: L, K and small islands around the sources matched now.
  auto covered = [](const std::vector<ParamDisc>& discs, const CPoint& t) {
    return std::any_of(discs.begin(), discs.end(), [&](const ParamDisc& d) { return (t - d.center).norm() < d.radius; });
  };
  std::vector<CPoint> params(J);
  for (std::size_t j = 0; j < J; ++j) params[j] = X.nearest_param(P.sources.points[j]);

  double r2 = std::max(in.planned_radius, in.B1.radius + 1.5);
  AutWord phi;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 6) throw StepInfeasible("B'' cannot contain phi(M)");
    std::vector<CPoint> open_targets, open_sources;
    for (std::size_t j = 0; j < J; ++j) {
      if (in.matched[j]) continue;
      open_targets.push_back(b[j]);
    }
    // Sources stay unmatched when their target is beyond the radius; the
    // radius and that set depend on each other, so settle them together.
    for (int settle = 0; settle < 50; ++settle) {
      open_sources.clear();
      for (std::size_t j = 0; j < J; ++j) {
        if (!in.matched[j] && b[j].norm() >= r2) open_sources.push_back(pos[j]);
      }
      const double next = clear_radius(r2, open_targets, open_sources);
      if (next == r2) break;
      r2 = next;
    }

    out.newly_matched.clear();
    RelocationTask task;
    task.region = D;
    task.epsilon = 0.5 * eps;
    task.clearance = kInf;
    for (std::size_t j = 0; j < J; ++j) {
      if (in.matched[j]) {
        task.pinned.push_back(b[j]);
      } else if (b[j].norm() < r2) {
        out.newly_matched.push_back(j);
        task.moves.push_back({pos[j], b[j]});
        task.clearance = std::min({task.clearance, D.distance(pos[j]), D.distance(b[j])});
      } else {
        task.pinned.push_back(pos[j]);
      }
    }
    if (task.moves.empty()) {
      phi = identity_word(n);
    } else {
      if (!(task.clearance > 0.0)) throw StepInfeasible("a moving point lies in D");
      task.clearance *= 0.999;
      phi = relocate_points(task, 0.0, in.options);
    }

    out.M = in.L;
    const bool k_inside = in.K.radius <= 0.0 || std::any_of(out.M.begin(), out.M.end(), [&](const ParamDisc& d) {
      return (in.K.center - d.center).norm() + in.K.radius < d.radius;
    });
    if (!k_inside) out.M.push_back(in.K);
    const AutWord through = base.then(phi);
    for (auto j : out.newly_matched) {
      if (covered(out.M, params[j])) continue;
      double limit = std::min(0.25 * (r2 - b[j].norm()), 0.2);
      for (std::size_t i = 0; i < J; ++i) {
        if (i != j) limit = std::min(limit, 0.25 * distance(b[i], b[j]));
      }
      double eta = 0.05;
      for (std::size_t i = 0; i < J; ++i) {
        if (i != j) eta = std::min(eta, 0.25 * (params[i] - params[j]).norm());
      }
      // Largest certified disc whose image stays near b_j.
      const LevelDisc island = centered_level_disc(through, X, Ball(b[j], limit), params[j], 1e-3 * limit, 0.25 * limit);
      if (island.empty()) throw StepInfeasible("no island around a matched source");
      eta = std::min(eta, island.radius);
      out.M.push_back({params[j], eta, j});
    }
    const auto phiM = disc_pieces(X, out.M, std::make_shared<WordMap>(through));
    const double need = std::max(out.M.empty() ? 0.0 : reach(phiM, CPoint::Zero(static_cast<Eigen::Index>(n))),
                                 in.B1.radius);
    if (need < r2 - 0.1) break;
    r2 = need + 1.0;
  }
  out.B2 = Ball(CPoint::Zero(static_cast<Eigen::Index>(n)), r2);

  // Phase two: push the remaining sources inside B'' out of it.
  const AutWord through = base.then(phi);
  RelocationTask task;
  task.region = D0;
  if (!out.M.empty()) task.region = disc_pieces(X, out.M, std::make_shared<WordMap>(through)).united(D0, Certificate::Neighborhood);
  task.epsilon = 0.5 * eps;
  task.clearance = kInf;
  std::vector<CPoint> avoid = b;
  for (std::size_t j = 0; j < J; ++j) avoid.push_back(pos[j]);
  std::vector<bool> now_matched = in.matched;
  for (auto j : out.newly_matched) now_matched[j] = true;
  for (std::size_t j = 0; j < J; ++j) {
    if (now_matched[j]) {
      task.pinned.push_back(b[j]);
    } else if (pos[j].norm() < r2) {
      const CPoint q = expel_target(pos[j], kExpelFactor * r2, avoid);
      avoid.push_back(q);
      out.expelled.push_back(j);
      task.moves.push_back({pos[j], q});
      task.clearance = std::min({task.clearance, task.region.distance(pos[j]), task.region.distance(q)});
    } else {
      task.pinned.push_back(pos[j]);
    }
  }
  AutWord psi = identity_word(n);
  if (!task.moves.empty()) {
    if (!(task.clearance > 0.0)) throw StepInfeasible("a source to expel lies in phi(M) u D_0");
    task.clearance *= 0.999;
    psi = relocate_points(task, 0.0, in.options);
  }
  out.theta = nu.then(phi).then(psi);
  return out;
}

// ---------------------------------------------------------------------------
// Driver

InterpolationResult run_interpolation(const InterpolationProblem& problem, const EngineOptions& options) {
  problem.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& P = problem;
  const auto& X = P.variety;
  const std::size_t n = P.dimension;
  const std::size_t J = P.sources.size();
  const std::size_t K = P.stages;
  const auto& a = P.sources.points;
  const auto& b = P.targets.points;
  const CPoint origin = CPoint::Zero(static_cast<Eigen::Index>(n));
  RelocationOptions ropt = options.relocation;
  ropt.frame_seed ^= P.seed;
  ropt.flat = true;

  std::vector<bool> matched(J, false);
  for (std::size_t j = 0; j < J; ++j) matched[j] = distance(a[j], b[j]) <= P.tolerances.match;

  // Planned radii: r_2 grows to clear every target by stage K_max.
  double far = P.r2;
  for (const auto& q : b) far = std::max(far, q.norm() + kTargetGap + 1.0);
  auto planned = [&](std::size_t k) {
    if (K <= 2 || k <= 2) return P.r2;
    const double s = std::min(1.0, double(k - 2) / double(K - 2));
    return P.r2 + (far - P.r2) * s * s;
  };

  // Stage 1: match the targets in B_2, expel the other sources inside it,
  // stay close to the identity on B_1 (shrunk away from the moving points).
  std::vector<double> radii{P.r1};
  std::vector<CPoint> open_targets, open_sources;
  for (std::size_t j = 0; j < J; ++j) {
    if (!matched[j]) open_targets.push_back(b[j]);
  }
  double r2 = P.r2;
  for (int settle = 0; settle < 50; ++settle) {
    open_sources.clear();
    for (std::size_t j = 0; j < J; ++j) {
      if (!matched[j] && b[j].norm() >= r2) open_sources.push_back(a[j]);
    }
    const double next = clear_radius(r2, open_targets, open_sources);
    if (next == r2) break;
    r2 = next;
  }
  radii.push_back(r2);

  RelocationTask task;
  task.epsilon = kBudgetFraction * P.epsilon * 0.5;
  std::vector<CPoint> avoid = b;
  avoid.insert(avoid.end(), a.begin(), a.end());
  double rho = P.r1;
  for (std::size_t j = 0; j < J; ++j) {
    if (matched[j]) {
      task.pinned.push_back(b[j]);
    } else if (b[j].norm() < r2) {
      task.moves.push_back({a[j], b[j]});
      rho = std::min({rho, 0.5 * a[j].norm(), 0.5 * b[j].norm()});
    } else if (a[j].norm() < r2) {
      const CPoint q = expel_target(a[j], kExpelFactor * r2, avoid);
      avoid.push_back(q);
      task.moves.push_back({a[j], q});
      rho = std::min(rho, 0.5 * a[j].norm());
    } else {
      task.pinned.push_back(a[j]);
    }
  }
  AutWord word = identity_word(n);
  if (!task.moves.empty()) {
    if (!(rho > 0.0)) throw StepInfeasible("a moving point sits at the origin");
    task.region = CertifiedCompact::ball(Ball(origin, rho));
    task.clearance = 0.999 * rho;
    word = relocate_points(task, 0.0, ropt);
  }
  word.stages.push_back({0, word.size()});

  std::vector<CPoint> pos(J);
  auto refresh = [&]() {
    for (std::size_t j = 0; j < J; ++j) {
      pos[j] = eval(word, a[j]);
      if (!matched[j] && distance(pos[j], b[j]) <= P.tolerances.match) matched[j] = true;
    }
  };
  refresh();
  const CPoint c0 = X.nearest_param(origin);
  const double base_radius = X.point(c0).norm() < P.r1 ? P.r1 / double(K + 1) : 0.0;
  auto L = level_discs(word, P, matched, Ball(origin, radii[1]));

  for (std::size_t k = 1; k < K; ++k) {
    StepInput in;
    in.problem = &P;
    in.phi = word;
    in.positions = pos;
    in.matched = matched;
    in.B = Ball(origin, radii[k - 1]);
    in.B1 = Ball(origin, radii[k]);
    in.L = L;
    in.K = ParamDisc{c0, base_radius * double(k), std::nullopt};
    in.epsilon = kBudgetFraction * P.epsilon * std::ldexp(1.0, -int(k + 1));
    in.planned_radius = std::max(planned(k + 2), radii[k] + 1.5);
    in.options = ropt;
    const StepOutput step = inductive_step(in);
    const std::size_t begin = word.size();
    word = word.then(step.theta);
    word.stages.push_back({begin, word.size()});
    radii.push_back(step.B2.radius);
    refresh();
    L = level_discs(word, P, matched, Ball(origin, radii[k + 1]), L);
  }
  word.schedule = radii;

  InterpolationResult result;
  for (std::size_t j = 0; j < J; ++j) {
    if (!matched[j]) {
      if (b[j].norm() <= radii[K - 1]) throw ScheduleExhausted("target " + std::to_string(j) + " left unmatched");
      continue;
    }
    result.matched.push_back(j);
    result.residual = std::max(result.residual, distance(pos[j], b[j]));
  }
  result.word = std::move(word);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.run_checks) result.stages = evaluate_stages(P, result.word, options.check_density, 0.0);
  return result;
}

}  // namespace holointerp
