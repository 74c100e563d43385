#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "holointerp/errors.hpp"
#include "holointerp/relocation.hpp"
#include "oracles.hpp"

using namespace holointerp;

namespace {

CertifiedCompact ball_region(double r, Eigen::Index n = 2) { return CertifiedCompact::ball(Ball(CPoint::Zero(n), r)); }

// Independent grid deviation: plain cubic lattice in R^4 clipped to the ball.
double grid_deviation(const AutWord& w, double r, int per_axis) {
  double worst = 0.0;
  const double h = 2.0 * r / per_axis;
  for (int a = 0; a <= per_axis; ++a)
    for (int b = 0; b <= per_axis; ++b)
      for (int c = 0; c <= per_axis; ++c)
        for (int d = 0; d <= per_axis; ++d) {
          const auto z = make_point({Complex(-r + a * h, -r + b * h), Complex(-r + c * h, -r + d * h)});
          if (z.norm() > r) continue;
          worst = std::max(worst, (eval(w, z) - z).norm());
        }
  return worst;
}

std::vector<std::size_t> all_pins_vanish(const AutWord& w, const std::vector<CPoint>& pins) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& a = w.letters[i];
    if (a.kind != LetterKind::Shear) continue;
    for (const auto& q : pins) {
      if (std::abs(a.h(a.frame.col(static_cast<Eigen::Index>(a.functional)).dot(q))) > 1e-13) bad.push_back(i);
    }
  }
  return bad;
}

}  // namespace

TEST_CASE("nothing to move gives the identity") {
  RelocationTask task;
  task.pinned = {make_point({5.0, 0.0})};
  task.region = ball_region(2.0);
  task.epsilon = 0.1;
  task.clearance = 0.5;
  const auto w = relocate_points(task, 4.0);
  CHECK(w.empty());
  CHECK(sup_deviation(w, nullptr, task.region, 4.0) == 0.0);
}

TEST_CASE("one move with two pins") {
  RelocationTask task;
  task.moves = {{make_point({3.0, 0.0}), make_point({3.0, 2.0})}};
  task.pinned = {make_point({5.0, 0.0}), make_point({6.0, 0.0})};
  task.region = ball_region(1.0);
  task.epsilon = 0.01;
  task.clearance = 0.5;
  const auto w = relocate_points(task, 4.0);
  CHECK(distance(eval(w, make_point({3.0, 0.0})), make_point({3.0, 2.0})) <= 1e-9);
  for (const auto& q : task.pinned) CHECK(distance(eval(w, q), q) <= 1e-9);
  CHECK(grid_deviation(w, 1.0, 12) <= 0.01);
  CHECK(all_pins_vanish(w, task.pinned).empty());
}

TEST_CASE("swapping two points goes through a parking spot") {
  RelocationTask task;
  task.moves = {{make_point({3.0, 0.0}), make_point({4.0, 0.0})}, {make_point({4.0, 0.0}), make_point({3.0, 0.0})}};
  task.region = ball_region(1.0);
  task.epsilon = 0.1;
  task.clearance = 0.5;
  const auto w = relocate_points(task, 4.0);
  CHECK(distance(eval(w, make_point({3.0, 0.0})), make_point({4.0, 0.0})) <= 1e-9);
  CHECK(distance(eval(w, make_point({4.0, 0.0})), make_point({3.0, 0.0})) <= 1e-9);
  CHECK(grid_deviation(w, 1.0, 12) <= 0.1);
}

TEST_CASE("single carry has the closed-form damping") {
  CarryPlan plan;
  const auto w = build_carry(make_point({3.0, 0.0}), make_point({3.0, 1.0}), {}, ball_region(1.0), 0.1, {}, &plan);
  REQUIRE(w.size() == 1);
  CHECK(plan.frame == 0);
  CHECK(plan.total_degree == 3);
  const auto& a = w.letters[0];
  CHECK(a.functional == 0);
  CHECK(a.direction == 1);
  // h(z) = (z/3)^3, checked on a disc grid.
  double worst = 0.0, sup = 0.0;
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      const Complex z(i / 20.0, j / 20.0);
      worst = std::max(worst, std::abs(a.h(z) - std::pow(z / 3.0, 3)));
      if (std::abs(z) <= 1.0) sup = std::max(sup, std::abs(a.h(z)));
    }
  }
  CHECK(worst < 1e-15);
  CHECK(sup <= 0.1);
  CHECK(distance(eval(w, make_point({3.0, 0.0})), make_point({3.0, 1.0})) <= 1e-12);
}

TEST_CASE("a pin adds an exact zero") {
  const auto pin = make_point({5.0, 0.0});
  const auto w = build_carry(make_point({3.0, 0.0}), make_point({3.0, 1.0}), {pin}, ball_region(1.0), 0.1);
  REQUIRE(w.size() == 1);
  const auto& h = w.letters[0].h;
  CHECK(h(5.0) == Complex(0.0));
  CHECK(h(3.0) == Complex(1.0));
  CHECK(eval(w, pin) == pin);
  // (z-5)/(3-5) reaches 3 on the unit disc: 3 * 3^-d <= 0.1 first holds at d = 4.
  CHECK(h.degree() == 1 + 4);
}

TEST_CASE("zero displacement is the empty word") {
  CHECK(build_carry(make_point({3.0, 0.0}), make_point({3.0, 0.0}), {}, ball_region(1.0), 0.1).empty());
}

TEST_CASE("clearance and separation errors") {
  RelocationTask task;
  task.moves = {{make_point({0.5, 0.0}), make_point({3.0, 0.0})}};
  task.region = ball_region(1.0);
  task.epsilon = 0.1;
  task.clearance = 0.2;
  CHECK_THROWS_AS(relocate_points(task, 0.0), ClearanceViolation);
}

TEST_CASE("budget additivity over carries") {
  const std::vector<CPoint> pins{make_point({0.0, 6.0})};
  const auto region = ball_region(1.5);
  const auto w1 = build_carry(make_point({3.0, 1.0}), make_point({-2.0, 3.0}), pins, region, 0.02);
  const auto w2 = build_carry(make_point({0.0, -4.0}), make_point({4.0, 0.0}), pins, region, 0.03);
  const double d1 = sup_deviation(w1, nullptr, region, 3.0);
  const double d2 = sup_deviation(w2, nullptr, region, 3.0);
  const double d12 = sup_deviation(w1.then(w2), nullptr, region, 3.0);
  CHECK(d1 <= 0.02);
  CHECK(d2 <= 0.03);
  CHECK(d12 <= d1 + d2 + 1e-15);
}

TEST_CASE("moves in C^3 around a graph piece") {
  RelocationTask task;
  const auto X = VarietyModel::graph_curve({0.0, 0.0, 0.5}, 3);
  task.region = CertifiedCompact::ball(Ball(CPoint::Zero(3), 1.0))
                    .united(CertifiedCompact::piece(GraphPiece{X, make_point({0.0}), 2.0, nullptr, 0.0}),
                            Certificate::BallUnionGraph);
  task.moves = {{make_point({0.0, 3.0, 1.0}), make_point({Complex(0, 3), 0.0, -2.0})},
                {make_point({-3.0, 0.0, 0.0}), make_point({0.0, 0.0, 4.0})}};
  task.pinned = {make_point({4.0, 8.0, 0.0})};
  task.epsilon = 0.05;
  task.clearance = 0.5;
  const auto w = relocate_points(task, 3.0);
  for (const auto& mv : task.moves) CHECK(distance(eval(w, mv.source), mv.target) <= 1e-9);
  CHECK(eval(w, task.pinned[0]) == task.pinned[0]);
  CHECK(sup_deviation(w, nullptr, task.region, 4.0) <= 0.05);
}

TEST_CASE("normal form is left alone") {
  SequenceSpec seq;
  for (int j = 1; j <= 5; ++j) seq.points.push_back(make_point({double(j), 0.0}));
  const auto w = tame_normalize(seq);
  for (int j = 1; j <= 5; ++j) CHECK(eval(w, seq.points[j - 1]) == seq.points[j - 1]);
}

TEST_CASE("shifted line is normalised") {
  SequenceSpec seq;
  for (int j = 1; j <= 5; ++j) seq.points.push_back(make_point({double(j), 1.0}));
  const auto w = tame_normalize(seq);
  for (int j = 1; j <= 5; ++j) CHECK(distance(eval(w, seq.points[j - 1]), make_point({double(j), 0.0})) <= 1e-9);
}

TEST_CASE("plane in C^3 is normalised") {
  SequenceSpec seq;
  std::mt19937_64 rng(3);
  const auto a = make_point({1.0, Complex(0, 2), -1.0});
  const auto b = make_point({0.0, 1.0, Complex(1, 1)});
  for (int j = 0; j < 7; ++j) {
    const Complex s(4 * oracle::unit(rng) - 2, 4 * oracle::unit(rng) - 2);
    const Complex t(4 * oracle::unit(rng) - 2, 4 * oracle::unit(rng) - 2);
    seq.points.push_back(make_point({1.0, 0.5, 0.0}) + s * a + t * b);
  }
  const auto w = tame_normalize(seq);
  for (int j = 0; j < 7; ++j) {
    CHECK(distance(eval(w, seq.points[j]), make_point({double(j + 1), 0.0, 0.0})) <= 1e-9);
  }
}

TEST_CASE("points off every line are rejected") {
  SequenceSpec seq;
  for (int j = 1; j <= 4; ++j) seq.points.push_back(make_point({double(j), 0.0}));
  seq.points.push_back(make_point({5.0, Complex(0, 0.5)}));
  CHECK_THROWS_AS(tame_normalize(seq), NotInSubspace);
}

TEST_CASE("lifting adds a coordinate") {
  SequenceSpec seq{{make_point({Complex(1, 1)}), make_point({3.0})}, 0.1};
  const auto [lifted, w] = lift_sequence(seq);
  REQUIRE(lifted.points.size() == 2);
  CHECK(lifted.points[0] == make_point({Complex(1, 1), 0.0}));
  CHECK(distance(eval(w, lifted.points[0]), make_point({1.0, 0.0})) <= 1e-9);
  CHECK(distance(eval(w, lifted.points[1]), make_point({2.0, 0.0})) <= 1e-9);

  SequenceSpec ej;
  for (int j = 1; j <= 4; ++j) ej.points.push_back(make_point({double(j), 0.0}));
  const auto [l2, w2] = lift_sequence(ej);
  for (int j = 1; j <= 4; ++j) CHECK(distance(eval(w2, l2.points[j - 1]), make_point({double(j), 0.0, 0.0})) <= 1e-9);
  CHECK_THROWS_AS(lift_sequence(SequenceSpec{}), EmptySequence);
}

TEST_CASE("no collision means no nudge") {
  const auto X = VarietyModel::first_axis(2);
  SequenceSpec targets{{make_point({7.0, 1.0})}, 0.1};
  CHECK(collision_nudge(X, targets, {}, ball_region(2.0), 0.01).empty());
}

namespace {

// Lower bound for dist(b, W(X)) with X the first axis: grid minimum minus a
// Lipschitz allowance measured on the same grid.
double image_distance_lower_bound(const AutWord& w, const CPoint& b, Complex around) {
  const double h = 2e-3;
  double best = INFINITY, lip = 0.0;
  for (int i = -150; i <= 150; ++i) {
    for (int j = -150; j <= 150; ++j) {
      const Complex t = around + Complex(i * h, j * h);
      const auto z = eval(w, make_point({t, 0.0}));
      best = std::min(best, (z - b).norm());
      const auto zn = eval(w, make_point({t + h, 0.0}));
      lip = std::max(lip, (zn - z).norm() / h);
    }
  }
  return best - lip * h;
}

}  // namespace

TEST_CASE("a target on the variety is nudged off") {
  const auto X = VarietyModel::first_axis(2);
  const auto b = make_point({7.0, 0.0});
  SequenceSpec targets{{b, make_point({-6.0, 2.0})}, 0.1};
  const auto w = collision_nudge(X, targets, {}, ball_region(2.0), 0.01);
  CHECK(!w.empty());
  CHECK(image_distance_lower_bound(w, b, 7.0) >= 1e-6);
  CHECK(grid_deviation(w, 2.0, 12) <= 0.01);
  CHECK(eval(w, targets.points[1]) == targets.points[1]);
}

TEST_CASE("two collisions at once, matched target untouched") {
  const auto X = VarietyModel::first_axis(2);
  const auto b1 = make_point({7.0, 0.0});
  const auto b2 = make_point({Complex(0, -5), 0.0});
  const auto matched = make_point({4.0, 0.0});
  SequenceSpec targets{{b1, matched, b2}, 0.1};
  const auto w = collision_nudge(X, targets, {1}, ball_region(2.0), 0.01);
  CHECK(image_distance_lower_bound(w, b1, 7.0) >= 1e-6);
  CHECK(image_distance_lower_bound(w, b2, Complex(0, -5)) >= 1e-6);
  CHECK(distance(eval(w, matched), matched) <= 1e-9);
  CHECK(grid_deviation(w, 2.0, 12) <= 0.01);
}
