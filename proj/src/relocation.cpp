#include "holointerp/relocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include "holointerp/errors.hpp"
#include "region_shadow.hpp"

namespace holointerp {

Disc atom_projection(const Atom& atom, const CPoint& functional) {
  return detail::RegionShadow(CertifiedCompact({atom}, Certificate::Neighborhood)).discs(functional, 0.0).front();
}

namespace detail {

namespace {

constexpr std::size_t kRimSamples = 512;
constexpr double kRimMargin = 1.02;

}  // namespace

RegionShadow::RegionShadow(const CertifiedCompact& region) {
  for (const auto& atom : region.atoms()) {
    Entry e;
    if (const auto* b = std::get_if<Ball>(&atom)) {
      e.kind = Entry::Kind::Ball;
      e.center = b->center;
      e.radius = b->radius;
    } else {
      const auto& p = std::get<GraphPiece>(atom);
      e.center = p.center_point();
      e.thickness = p.thickness;
      if (!p.image) {
        e.kind = Entry::Kind::Piece;
        e.piece = p;
      } else {
        // Holomorphic in the parameter, so projections peak on the rim.
        e.kind = Entry::Kind::Rim;
        const double spacing = p.param_center.size() == 1
                                   ? 2.0 * std::numbers::pi * p.param_radius / static_cast<double>(kRimSamples)
                                   : p.param_radius / 12.0;
        for (const auto& t : sphere_lattice(p.param_center, p.param_radius, spacing, 0.0)) e.rim.push_back(p.point(t));
      }
    }
    entries_.push_back(std::move(e));
  }
}

std::vector<Disc> RegionShadow::discs(const CPoint& u, double inflate) const {
  std::vector<Disc> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    Disc d;
    switch (e.kind) {
      case Entry::Kind::Ball:
        d = {u.dot(e.center), e.radius};
        break;
      case Entry::Kind::Piece:
        d = e.piece.variety.projection_disc(u, e.piece.param_center, e.piece.param_radius);
        d.radius += e.thickness;
        break;
      case Entry::Kind::Rim: {
        d.center = u.dot(e.center);
        double r = 0.0;
        for (const auto& w : e.rim) r = std::max(r, std::abs(u.dot(w) - d.center));
        d.radius = r * kRimMargin + e.thickness + 1e-12;
        break;
      }
    }
    d.radius += inflate;
    out.push_back(d);
  }
  // Discs inside another disc add nothing to the damping constraints.
  std::vector<Disc> kept;
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < out.size() && !covered; ++j) {
      if (i == j) continue;
      if (out[j].contains(out[i]) && (!out[i].contains(out[j]) || j < i)) covered = true;
    }
    if (!covered) kept.push_back(out[i]);
  }
  return kept;
}

std::optional<Damping> solve_damping(Complex zeta0, Complex delta, const std::vector<Complex>& pins,
                                     const std::vector<Disc>& discs, double share, unsigned max_degree, bool flat) {
  Damping out;
  const unsigned pin_mult = flat ? 2u : 1u;
  for (const auto& q : pins) {
    if (q == zeta0) return std::nullopt;
    if (std::find(out.roots.begin(), out.roots.end(), q) == out.roots.end()) {
      out.roots.push_back(q);
      out.multiplicities.push_back(pin_mult);
    }
  }
  const std::size_t pin_count = out.roots.size();
  // A double root keeps the Jacobian at a pin exact but says nothing about its
  // neighbourhood, where the damping product may be enormous. Flat letters
  // also keep |h| <= share on a small disc around every pin.
  std::vector<Disc> guarded = discs;
  if (flat) {
    constexpr double kPinGuard = 1e-3;
    for (std::size_t i = 0; i < pin_count; ++i) {
      guarded.push_back({out.roots[i], std::min(kPinGuard, 0.5 * std::abs(zeta0 - out.roots[i]))});
    }
  }
  const std::vector<Disc>& all = guarded;
  const std::size_t n = all.size();
  // log of the sup of |h| over disc b, and log rho(a, b) = growth of factor a on disc b.
  std::vector<double> bound(n, std::log(std::abs(delta)));
  std::vector<std::vector<double>> growth(n, std::vector<double>(n));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < pin_count; ++i) {
      const Complex q = out.roots[i];
      bound[b] += pin_mult * std::log((std::abs(all[b].center - q) + all[b].radius) / std::abs(zeta0 - q));
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    const double gap = std::abs(zeta0 - all[a].center);
    if (!(gap > all[a].radius)) return std::nullopt;
    for (std::size_t b = 0; b < n; ++b) {
      growth[a][b] = std::log((std::abs(all[b].center - all[a].center) + all[b].radius) / gap);
    }
  }
  const double target = std::log(share);
  std::vector<unsigned> degree(n, 0);
  std::size_t total = 0;
  // Flat letters carry the extra linear factor 1 - s (z - zeta0), s = g'(zeta0)
  // for the normalised product g, so that h'(zeta0) = 0.
  Complex slope = 0.0;
  std::vector<double> linear(n, 0.0);
  auto refresh_linear = [&]() {
    if (!flat) return;
    slope = 0.0;
    for (std::size_t i = 0; i < pin_count; ++i) slope += double(pin_mult) / (zeta0 - out.roots[i]);
    for (std::size_t a = 0; a < n; ++a) slope += double(degree[a]) / (zeta0 - all[a].center);
    for (std::size_t b = 0; b < n; ++b) {
      linear[b] = std::abs(slope) == 0.0
                      ? 0.0
                      : std::log(std::abs(slope) * (std::abs(all[b].center - zeta0 - 1.0 / slope) + all[b].radius));
    }
  };
  refresh_linear();
  for (;;) {
    std::size_t worst = n;
    double excess = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (bound[b] + linear[b] - target > excess) {
        excess = bound[b] + linear[b] - target;
        worst = b;
      }
    }
    if (worst == n) break;
    if (++total > max_degree) return std::nullopt;
    ++degree[worst];
    for (std::size_t b = 0; b < n; ++b) bound[b] += growth[worst][b];
    refresh_linear();
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (degree[a] == 0) continue;
    out.roots.push_back(all[a].center);
    out.multiplicities.push_back(degree[a]);
  }
  out.degree = pin_mult * pin_count + total;
  if (flat && std::abs(slope) > 0.0) {
    out.roots.push_back(zeta0 + 1.0 / slope);
    out.multiplicities.push_back(1);
    ++out.degree;
  }
  return out;
}

}  // namespace detail

namespace {

using detail::RegionShadow;

struct Step {
  std::size_t direction;
  std::size_t functional;
  Complex value;  // new value of the direction coordinate
};

struct Candidate {
  CarryPlan plan;
  AutWord word;
};

class Carrier {
 public:
  Carrier(const CPoint& source, const CPoint& target, const std::vector<CPoint>& pinned, const CertifiedCompact& region,
          const RegionShadow& shadow, double share, double inflation, const RelocationOptions& options)
      : source_(source),
        target_(target),
        pinned_(pinned),
        shadow_(shadow),
        share_(share),
        inflation_(inflation),
        options_(options),
        frames_(frame_pool(static_cast<std::size_t>(source.size()), options.frame_count, options.frame_seed)) {
    for (const auto& atom : region.atoms()) {
      const double reach = std::visit(
          [](const auto& a) {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Ball>) {
              return a.center.norm() + a.radius;
            } else {
              return a.center_point().norm() + a.param_radius + a.thickness;
            }
          },
          atom);
      region_reach_ = std::max(region_reach_, reach);
    }
  }

  std::optional<Candidate> best() {
    const auto n = static_cast<std::size_t>(source_.size());
    std::optional<Candidate> best;
    auto consider = [&](std::size_t f, std::vector<Step> steps, CarryPlan plan) {
      auto c = realise(f, steps, plan);
      if (!c) return;
      if (!best || c->plan.letters < best->plan.letters ||
          (c->plan.letters == best->plan.letters && c->plan.total_degree < best->plan.total_degree)) {
        best = std::move(c);
      }
    };
    for (std::size_t f = 0; f < frames_.size(); ++f) {
      const CMatrix& F = frames_[f];
      for (std::size_t c = 0; c < n; ++c) {
        std::vector<Step> body;
        for (std::size_t d = 0; d < n; ++d) {
          if (d != c) body.push_back({d, c, coord(F, d, target_)});
        }
        const bool pivot_moves = coord(F, c, target_) != coord(F, c, source_);
        if (!pivot_moves) consider(f, body, {f, c, c, c, false, 0, 0});
        for (std::size_t c2 = 0; c2 < n; ++c2) {
          if (c2 == c) continue;
          if (pivot_moves) {
            auto steps = body;
            steps.push_back({c, c2, coord(F, c, target_)});
            consider(f, steps, {f, c, c2, c, false, 0, 0});
          }
          // Helper route: raise c2 far out, move the pivot through it, then finish from the pivot.
          std::vector<Step> steps{{c2, c, far_value(F, c2)}, {c, c2, coord(F, c, target_)}};
          steps.insert(steps.end(), body.begin(), body.end());
          consider(f, steps, {f, c, c, c2, true, 0, 0});
        }
      }
    }
    return best;
  }

 private:
  static Complex coord(const CMatrix& F, std::size_t k, const CPoint& z) {
    return F.col(static_cast<Eigen::Index>(k)).dot(z);
  }

  Complex far_value(const CMatrix& F, std::size_t k) const {
    const double radius = 2.0 * region_reach_ + 2.0 * std::abs(coord(F, k, source_)) + 1.0;
    Complex best = radius;
    double best_gap = -1.0;
    for (int i = 0; i < 8; ++i) {
      const Complex w = std::polar(radius, 0.3 + 2.0 * std::numbers::pi * i / 8.0);
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& q : pinned_) gap = std::min(gap, std::abs(w - coord(F, k, q)));
      if (gap > best_gap) {
        best_gap = gap;
        best = w;
      }
    }
    return best;
  }

  const std::vector<Disc>& base_discs(std::size_t f, std::size_t k) {
    const auto key = std::make_pair(f, k);
    auto it = disc_cache_.find(key);
    if (it == disc_cache_.end()) {
      it = disc_cache_.emplace(key, shadow_.discs(frames_[f].col(static_cast<Eigen::Index>(k)), 0.0)).first;
    }
    return it->second;
  }

  std::optional<Candidate> realise(std::size_t f, const std::vector<Step>& steps, CarryPlan plan) {
    const CMatrix& F = frames_[f];
    // Displacements of distinct steps touch distinct coordinates except on the
    // helper route, so count them on a dry run.
    std::size_t letters = 0;
    {
      CPoint x = F.adjoint() * source_;
      for (const auto& s : steps) {
        if (s.value != x[static_cast<Eigen::Index>(s.direction)]) ++letters;
        x[static_cast<Eigen::Index>(s.direction)] = s.value;
      }
    }
    Candidate out;
    out.word = identity_word(static_cast<std::size_t>(source_.size()));
    if (letters == 0) {
      out.plan = plan;
      return out;
    }
    const double share = share_ / static_cast<double>(letters);
    double inflation = inflation_;
    CPoint cur = source_;
    std::size_t degree = 0;
    for (const auto& s : steps) {
      const Complex delta = s.value - coord(F, s.direction, cur);
      if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(s.value))) continue;
      const Complex zeta0 = coord(F, s.functional, cur);
      std::vector<Complex> pins;
      pins.reserve(pinned_.size());
      for (const auto& q : pinned_) pins.push_back(coord(F, s.functional, q));
      auto discs = base_discs(f, s.functional);
      for (auto& d : discs) d.radius += inflation;
      const auto damping = detail::solve_damping(zeta0, delta, pins, discs, share, options_.max_degree, options_.flat);
      if (!damping) return std::nullopt;
      auto letter = ElementaryAut::shear(F, s.direction, s.functional,
                                         Polynomial::factored(delta, zeta0, damping->roots, damping->multiplicities));
      cur = letter.apply(cur);
      out.word.push(std::move(letter));
      inflation += share;
      degree += damping->degree;
    }
    if (distance(cur, target_) > 1e-10 * (1.0 + target_.norm())) return std::nullopt;
    plan.letters = out.word.size();
    plan.total_degree = degree;
    out.plan = plan;
    return out;
  }

  const CPoint& source_;
  const CPoint& target_;
  const std::vector<CPoint>& pinned_;
  const RegionShadow& shadow_;
  double share_;
  double inflation_;
  RelocationOptions options_;
  std::vector<CMatrix> frames_;
  double region_reach_ = 0.0;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Disc>> disc_cache_;
};

std::string describe(const CPoint& z) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(z[i].real()) + (z[i].imag() < 0 ? "-" : "+") + std::to_string(std::abs(z[i].imag())) + "i";
  }
  return s + ")";
}

AutWord carry_with_inflation(const CPoint& source, const CPoint& target, const std::vector<CPoint>& pinned,
                             const CertifiedCompact& region, const RegionShadow& shadow, double share,
                             double inflation, const RelocationOptions& options, CarryPlan* plan) {
  if (source.size() != target.size() || source.size() < 2) throw ValidationError("move", "dimension mismatch");
  if (!(share > 0.0)) throw ValidationError("share", "must be positive");
  if (distance(source, target) == 0.0) {
    if (plan) *plan = CarryPlan{};
    return identity_word(static_cast<std::size_t>(source.size()));
  }
  for (const auto& q : pinned) {
    if (distance(q, source) == 0.0 || distance(q, target) == 0.0) {
      throw ClearanceViolation("pinned point coincides with the moving point at " + describe(q));
    }
  }
  Carrier carrier(source, target, pinned, region, shadow, share, inflation, options);
  auto best = carrier.best();
  if (!best) throw SeparationFailure("no frame separates the move " + describe(source) + " -> " + describe(target));
  if (plan) *plan = best->plan;
  return std::move(best->word);
}

}  // namespace

AutWord build_carry(const CPoint& source, const CPoint& target, const std::vector<CPoint>& pinned,
                    const CertifiedCompact& region, double share, const RelocationOptions& options, CarryPlan* plan) {
  return carry_with_inflation(source, target, pinned, region, RegionShadow(region), share, 0.0, options, plan);
}

AutWord relocate_points(const RelocationTask& task, double budget, const RelocationOptions& options) {
  if (!(task.epsilon > 0.0)) throw ClearanceViolation("epsilon must be positive");
  const std::size_t m = task.moves.size();
  std::size_t dim = 0;
  if (m) dim = static_cast<std::size_t>(task.moves.front().source.size());
  else if (!task.pinned.empty()) dim = static_cast<std::size_t>(task.pinned.front().size());
  else dim = task.region.dimension();
  if (m == 0) return identity_word(dim);

  const double tol = 1e-12;
  for (std::size_t i = 0; i < m; ++i) {
    for (const CPoint* p : {&task.moves[i].source, &task.moves[i].target}) {
      if (!task.region.empty() && task.region.distance(*p) < task.clearance) {
        throw ClearanceViolation("point " + describe(*p) + " lies within the clearance of the region");
      }
      for (const auto& q : task.pinned) {
        if (distance(*p, q) <= tol) throw ClearanceViolation("pinned point " + describe(q) + " is also moved");
      }
    }
    for (std::size_t j = i + 1; j < m; ++j) {
      if (distance(task.moves[i].source, task.moves[j].source) <= tol) throw ClearanceViolation("repeated source");
      if (distance(task.moves[i].target, task.moves[j].target) <= tol) throw ClearanceViolation("repeated target");
    }
  }

  // Dry run: a target still occupied by a pending source forces that source to park first.
  std::vector<CPoint> cur;
  for (const auto& mv : task.moves) cur.push_back(mv.source);
  std::vector<std::optional<CPoint>> park(m);
  {
    auto occupied = cur;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (distance(occupied[j], task.moves[i].target) > tol) continue;
        std::vector<CPoint> others = task.pinned;
        for (std::size_t k = 0; k < m; ++k) {
          others.push_back(occupied[k]);
          others.push_back(task.moves[k].target);
        }
        std::optional<CPoint> spot;
        double best_gap = -1.0;
        for (double r : {1.0, 2.0, 4.0}) {
          for (Eigen::Index axis = 0; axis < occupied[j].size(); ++axis) {
            for (const Complex phase : {Complex(0, 1), Complex(1, 0), Complex(0, -1), Complex(-1, 0)}) {
              CPoint w = occupied[j];
              w[axis] += r * phase;
              if (!task.region.empty() && task.region.distance(w) < task.clearance) continue;
              double gap = std::numeric_limits<double>::infinity();
              for (const auto& q : others) gap = std::min(gap, distance(w, q));
              if (gap > best_gap) {
                best_gap = gap;
                spot = w;
              }
            }
          }
          if (spot && best_gap >= 0.5 * r) break;
        }
        if (!spot) throw SeparationFailure("no parking spot for " + describe(occupied[j]));
        park[j] = spot;
        occupied[j] = *spot;
      }
      occupied[i] = task.moves[i].target;
    }
  }
  std::size_t carries = m;
  for (const auto& p : park) carries += p.has_value();
  const double share = task.epsilon / static_cast<double>(carries);

  const RegionShadow shadow(task.region);
  AutWord word = identity_word(dim);
  double spent = 0.0;
  auto carry = [&](std::size_t i, const CPoint& to) {
    std::vector<CPoint> pins = task.pinned;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != i) pins.push_back(cur[k]);
    }
    const auto w = carry_with_inflation(cur[i], to, pins, task.region, shadow, share, spent, options, nullptr);
    spent += share;
    cur[i] = eval(w, cur[i]);
    word = word.then(w);
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (park[j] && distance(cur[j], task.moves[i].target) <= tol) carry(j, *park[j]);
    }
    carry(i, task.moves[i].target);
  }

  for (const auto& mv : task.moves) {
    if (distance(eval(word, mv.source), mv.target) > 1e-9) throw SeparationFailure("move residual above 1e-9");
  }
  if (budget > 0.0 && !task.region.empty()) {
    const double dev = sup_deviation(word, nullptr, task.region, budget);
    if (dev > task.epsilon) throw SeparationFailure("sampled deviation " + std::to_string(dev) + " exceeds epsilon");
  }
  return word;
}

}  // namespace holointerp
