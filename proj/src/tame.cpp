#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "holointerp/errors.hpp"
#include "holointerp/relocation.hpp"

namespace holointerp {

namespace {

double min_gap(const std::vector<Complex>& values) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) gap = std::min(gap, std::abs(values[i] - values[j]));
  }
  return gap;
}

// Unitary matrix whose first columns are the given orthonormal vectors.
CMatrix complete_frame(const std::vector<CPoint>& leading, Eigen::Index n) {
  CMatrix F(n, n);
  Eigen::Index filled = 0;
  for (const auto& v : leading) F.col(filled++) = v;
  for (Eigen::Index k = 0; k < n && filled < n; ++k) {
    CPoint e = CPoint::Unit(n, k);
    for (Eigen::Index i = 0; i < filled; ++i) e -= F.col(i) * F.col(i).dot(e);
    if (e.norm() < 0.5) continue;
    F.col(filled++) = e.normalized();
  }
  return F;
}

}  // namespace

AutWord tame_normalize(const SequenceSpec& seq) {
  if (seq.points.empty()) throw EmptySequence();
  const Eigen::Index n = seq.points.front().size();
  if (n < 2) throw ValidationError("dimension", "tame normalisation needs N >= 2");
  const std::size_t J = seq.points.size();
  for (const auto& p : seq.points) {
    if (p.size() != n) throw ValidationError("points", "dimension mismatch");
  }
  check_discrete(SequenceSpec{seq.points, 0.0});

  bool normal = true;
  for (std::size_t j = 0; j < J && normal; ++j) {
    CPoint e = CPoint::Zero(n);
    e[0] = static_cast<double>(j + 1);
    normal = distance(seq.points[j], e) <= 1e-12;
  }
  AutWord word = identity_word(static_cast<std::size_t>(n));
  if (normal) return word;

  // Affine hull: the least singular direction must be (numerically) unused.
  CPoint mean = CPoint::Zero(n);
  for (const auto& p : seq.points) mean += p;
  mean /= static_cast<double>(J);
  CMatrix spread(n, static_cast<Eigen::Index>(J));
  double scale = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    spread.col(static_cast<Eigen::Index>(j)) = seq.points[j] - mean;
    scale = std::max(scale, spread.col(static_cast<Eigen::Index>(j)).norm());
  }
  Eigen::JacobiSVD<CMatrix> svd(spread, Eigen::ComputeFullU);
  CMatrix Q = svd.matrixU();
  const CPoint normal_dir = Q.col(n - 1);
  double residual = 0.0;
  for (std::size_t j = 0; j < J; ++j) residual = std::max(residual, std::abs(normal_dir.dot(spread.col(static_cast<Eigen::Index>(j)))));
  if (residual > 1e-10 * (1.0 + scale)) {
    throw NotInSubspace("points leave every proper affine subspace (residual " + std::to_string(residual) + ")");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < k; ++i) Q.col(k) -= Q.col(i) * Q.col(i).dot(Q.col(k));
    Q.col(k).normalize();
  }
  // Rotate the hull into {z_N = 0}.
  const CMatrix U = Q.adjoint();
  word.push(ElementaryAut::affine_unitary(U, -(U * mean)));
  std::vector<CPoint> cur;
  for (const auto& p : seq.points) cur.push_back(word.letters.back().apply(p));

  auto push = [&](ElementaryAut letter) {
    for (auto& z : cur) z = letter.apply(z);
    word.push(std::move(letter));
  };

  // Functional on the hyperplane separating the points.
  std::mt19937_64 rng(0x7a3e);
  std::normal_distribution<double> gauss;
  CPoint best_v;
  double best_gap = -1.0;
  for (int trial = 0; trial < 64; ++trial) {
    CPoint v = CPoint::Zero(n);
    if (trial < n - 1) {
      v[trial] = 1.0;
    } else {
      for (Eigen::Index k = 0; k + 1 < n; ++k) v[k] = Complex(gauss(rng), gauss(rng));
      v.normalize();
    }
    std::vector<Complex> proj;
    for (const auto& z : cur) proj.push_back(v.dot(z));
    const double gap = J > 1 ? min_gap(proj) : 1.0;
    if (gap > best_gap) {
      best_gap = gap;
      best_v = v;
    }
  }
  if (!(best_gap > 0.0)) throw NotInSubspace("points cannot be separated by a linear functional");
  const CMatrix F = complete_frame({best_v, CPoint::Unit(n, n - 1)}, n);
  {
    std::vector<Complex> nodes, values;
    for (std::size_t j = 0; j < J; ++j) {
      nodes.push_back(F.col(0).dot(cur[j]));
      values.push_back(static_cast<double>(j + 1) - cur[j][n - 1]);
    }
    push(ElementaryAut::shear(F, 1, 0, Polynomial::lagrange(nodes, values)));
  }
  // Now z_N = j: set the first coordinates from it.
  const CMatrix I = CMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    std::vector<Complex> nodes, values;
    for (std::size_t j = 0; j < J; ++j) {
      nodes.push_back(I.col(n - 1).dot(cur[j]));
      values.push_back((i == 0 ? static_cast<double>(j + 1) : 0.0) - cur[j][i]);
    }
    push(ElementaryAut::shear(I, static_cast<std::size_t>(i), static_cast<std::size_t>(n - 1),
                              Polynomial::lagrange(nodes, values)));
  }
  // Clear z_N using z_1 = j.
  {
    std::vector<Complex> nodes, values;
    for (std::size_t j = 0; j < J; ++j) {
      nodes.push_back(I.col(0).dot(cur[j]));
      values.push_back(-cur[j][n - 1]);
    }
    push(ElementaryAut::shear(I, static_cast<std::size_t>(n - 1), 0, Polynomial::lagrange(nodes, values)));
  }
  return word;
}

std::pair<SequenceSpec, AutWord> lift_sequence(const SequenceSpec& seq) {
  if (seq.points.empty()) throw EmptySequence();
  SequenceSpec lifted;
  lifted.min_separation = seq.min_separation;
  for (const auto& p : seq.points) {
    CPoint z = CPoint::Zero(p.size() + 1);
    z.head(p.size()) = p;
    lifted.points.push_back(std::move(z));
  }
  AutWord word = tame_normalize(lifted);
  return {std::move(lifted), std::move(word)};
}

AutWord collision_nudge(const VarietyModel& variety, const SequenceSpec& targets, const std::vector<std::size_t>& matched,
                        const CertifiedCompact& region, double epsilon, double gap, const RelocationOptions& options) {
  return collision_nudge([&](const CPoint& z) { return variety.distance(z); }, variety.dimension(), targets, matched,
                         region, epsilon, gap, options);
}

AutWord collision_nudge(const std::function<double(const CPoint&)>& variety_distance, std::size_t n,
                        const SequenceSpec& targets, const std::vector<std::size_t>& matched,
                        const CertifiedCompact& region, double epsilon, double gap, const RelocationOptions& options) {
  std::vector<bool> is_matched(targets.size(), false);
  for (auto j : matched) {
    if (j >= targets.size()) throw ValidationError("matched", "index out of range");
    is_matched[j] = true;
  }
  RelocationTask task;
  task.epsilon = 0.5 * epsilon;
  // The inverse of the relocation is returned; growing the region by the
  // relocation's own budget keeps the inverse inside epsilon on the region.
  task.region = region.empty() ? region : region.inflated(epsilon);
  task.clearance = std::numeric_limits<double>::infinity();
  std::vector<CPoint> movers;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const CPoint& b = targets.points[j];
    if (is_matched[j] || variety_distance(b) >= gap) {
      task.pinned.push_back(b);
      continue;
    }
    movers.push_back(b);
  }
  if (movers.empty()) return identity_word(n);

  const auto frames = frame_pool(n, 8, options.frame_seed);
  for (const auto& b : movers) {
    const double room = task.region.empty() ? 1.0 : task.region.distance(b);
    if (!(room > 0.0)) throw ClearanceViolation("colliding target lies in the region");
    double step = std::min(0.1, 0.25 * room);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& q : targets.points) {
      if (distance(q, b) > 0.0) nearest = std::min(nearest, distance(q, b));
    }
    step = std::min(step, 0.25 * nearest);
    // Direction that leaves the variety fastest among the pool's frame vectors.
    CPoint best = b;
    double best_off = -1.0;
    for (const auto& F : frames) {
      for (Eigen::Index k = 0; k < F.cols(); ++k) {
        const CPoint w = b + step * F.col(k);
        const double off = variety_distance(w);
        if (off > best_off) {
          best_off = off;
          best = w;
        }
      }
    }
    if (!(best_off >= gap)) throw SeparationFailure("cannot move a target off the variety");
    task.moves.push_back({b, best});
    if (!task.region.empty()) task.clearance = std::min({task.clearance, room, task.region.distance(best)});
  }
  if (!std::isfinite(task.clearance)) task.clearance = 1.0;
  return relocate_points(task, 0.0, options).inverse();
}

}  // namespace holointerp
