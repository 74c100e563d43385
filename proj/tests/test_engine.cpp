#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "holointerp/engine.hpp"
#include "holointerp/errors.hpp"
#include "oracles.hpp"

using namespace holointerp;

namespace {

CPoint origin2() { return CPoint::Zero(2); }

// z -> (z1, z2 + h(z1)) with dense h.
AutWord vertical_shear(std::vector<Complex> coeffs) {
  AutWord w = identity_word(2);
  w.push(ElementaryAut::shear(CMatrix::Identity(2, 2), 1, 0, Polynomial::dense(std::move(coeffs))));
  return w;
}

// First exit radius along a ray of {z2 = 0}, by plain bisection.
double ray_exit(const AutWord& w, double r, Complex dir) {
  double lo = 0.0, hi = 1.0;
  while ((eval(w, make_point({hi * dir, 0.0}))).norm() <= r) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((eval(w, make_point({mid * dir, 0.0}))).norm() <= r ? lo : hi) = mid;
  }
  return lo;
}

// Sup of |w(z) - z| over a lattice of the ball of radius r in C^2 and over
// samples of the disc {|t| <= s} of the first axis.
double deviation_on(const AutWord& w, double r, double s) {
  double worst = 0.0;
  const int per_axis = 12;
  const double h = 2.0 * r / per_axis;
  for (int a = 0; a <= per_axis; ++a)
    for (int b = 0; b <= per_axis; ++b)
      for (int c = 0; c <= per_axis; ++c)
        for (int d = 0; d <= per_axis; ++d) {
          const auto z = make_point({Complex(-r + a * h, -r + b * h), Complex(-r + c * h, -r + d * h)});
          if (z.norm() > r) continue;
          worst = std::max(worst, (eval(w, z) - z).norm());
        }
  for (int i = 0; i <= 40; ++i)
    for (int k = 0; k < 64; ++k) {
      const auto z = make_point({std::polar(s * i / 40.0, 2.0 * std::numbers::pi * k / 64.0), 0.0});
      worst = std::max(worst, (eval(w, z) - z).norm());
    }
  return worst;
}

InterpolationProblem single_pair(CPoint a, CPoint b) {
  InterpolationProblem p;
  p.variety = VarietyModel::first_axis(2);
  p.sources.points = {std::move(a)};
  p.targets.points = {std::move(b)};
  return p;
}

StepInput step_input(const InterpolationProblem& p, bool matched) {
  StepInput in;
  in.problem = &p;
  in.phi = identity_word(2);
  in.positions = p.sources.points;
  in.matched = std::vector<bool>(p.sources.size(), matched);
  in.B = Ball(origin2(), 2.0);
  in.B1 = Ball(origin2(), 4.0);
  in.L = {ParamDisc{CPoint::Zero(1), 1.5, std::nullopt}};
  in.epsilon = 0.1;
  return in;
}

}  // namespace

TEST_CASE("problem validation names the field") {
  auto p = seeded_instance(7, 3);
  CHECK_NOTHROW(p.validate());

  auto bad = p;
  bad.epsilon = 1.5;
  try {
    bad.validate();
    FAIL("accepted epsilon 1.5");
  } catch (const ValidationError& e) {
    CHECK(e.field == "epsilon");
    CHECK(e.reason == "must lie in (0,1)");
  }

  bad = p;
  bad.sources.points[1][1] = 1e-3;
  try {
    bad.validate();
    FAIL("accepted a source off X");
  } catch (const ValidationError& e) {
    CHECK(e.field == "sources");
  }

  bad = p;
  bad.targets.points[2] = bad.targets.points[0];
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = p;
  bad.dimension = 1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("seeded instance is reproducible and discrete") {
  const auto p = seeded_instance(7, 8);
  const auto q = seeded_instance(7, 8);
  REQUIRE(p.targets.size() == 8);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(p.targets.points[j] == q.targets.points[j]);
    CHECK(p.targets.points[j].norm() <= 20.0);
    CHECK(p.sources.points[j] == make_point({double(j + 1), 0.0}));
  }
  CHECK(oracle::brute_min_distance(p.targets.points) >= 0.5);
  CHECK(seeded_instance(8, 8).targets.points[0] != p.targets.points[0]);
}

TEST_CASE("level set of the identity is the disc itself") {
  const auto X = VarietyModel::first_axis(2);
  const auto piece = level_set_L(identity_word(2), X, Ball(origin2(), 5.0), 1e-3);
  REQUIRE_FALSE(is_empty_piece(piece));
  CHECK(piece.param_radius == doctest::Approx(5.0).epsilon(4e-4));
}

TEST_CASE("level set of a shear matches ray bisection") {
  const auto X = VarietyModel::first_axis(2);
  const double res = 1e-3;

  // Rotationally symmetric: |t|^2 + 0.09 |t|^4 = 25.
  const auto sym = vertical_shear({0.0, 0.0, 0.3});
  const double closed = std::sqrt((-1.0 + std::sqrt(1.0 + 4.0 * 0.09 * 25.0)) / 0.18);
  CHECK(std::abs(level_set_L(sym, X, Ball(origin2(), 5.0), res).param_radius - closed) <= res);

  const auto skew = vertical_shear({0.0, Complex(0.0, 0.05), 0.08});
  double oracle_radius = INFINITY;
  for (int k = 0; k < 720; ++k) {
    oracle_radius = std::min(oracle_radius, ray_exit(skew, 5.0, std::polar(1.0, 2.0 * std::numbers::pi * k / 720.0)));
  }
  CHECK(std::abs(level_set_L(skew, X, Ball(origin2(), 5.0), res).param_radius - oracle_radius) <= res);
}

TEST_CASE("level set empty when X misses the ball") {
  const auto X = VarietyModel::affine(make_point({0.0, 3.0}), {make_point({1.0, 0.0})});
  CHECK(is_empty_piece(level_set_L(identity_word(2), X, Ball(origin2(), 1.0), 1e-3)));
  CHECK_THROWS_AS(level_set_L(identity_word(2), X, Ball(origin2(), 1.0), 0.0), ValidationError);
}

TEST_CASE("step with nothing to do is the identity") {
  const auto p = single_pair(make_point({3.0, 0.0}), make_point({3.0, 0.0}));
  const auto out = inductive_step(step_input(p, true));
  CHECK(out.theta.empty());
  CHECK(out.newly_matched.empty());
  CHECK(out.expelled.empty());
  CHECK(out.B2.radius > 4.0 + 1.0);
}

TEST_CASE("step matches a pair whose target lies in the new ball") {
  const auto p = single_pair(make_point({3.0, 0.0}), make_point({3.5, 1.0}));
  const auto in = step_input(p, false);
  const auto out = inductive_step(in);
  const CPoint b = p.targets.points[0];
  CHECK(distance(eval(out.theta, p.sources.points[0]), b) <= 1e-9);
  CHECK(deviation_on(out.theta, 2.0, 1.5) <= in.epsilon);
  CHECK(out.B2.contains(b, 0.0));
  CHECK(out.B2.radius > in.B1.radius + 1.0);
  REQUIRE(out.newly_matched.size() == 1);
}

TEST_CASE("step expels a source whose target is far") {
  const auto p = single_pair(make_point({3.0, 0.0}), make_point({60.0, 5.0}));
  const auto in = step_input(p, false);
  const auto out = inductive_step(in);
  CHECK(out.newly_matched.empty());
  REQUIRE(out.expelled.size() == 1);
  CHECK(eval(out.theta, p.sources.points[0]).norm() > out.B2.radius);
  CHECK(p.targets.points[0].norm() > out.B2.radius);
  CHECK(deviation_on(out.theta, 2.0, 1.5) <= in.epsilon);
}

TEST_CASE("empty problem gives the empty word") {
  InterpolationProblem p;
  p.variety = VarietyModel::first_axis(2);
  const auto r = run_interpolation(p);
  CHECK(r.word.empty());
  CHECK(r.matched.empty());
  REQUIRE(r.stages.size() == p.stages);
  for (const auto& s : r.stages) CHECK(s.pass());
}

TEST_CASE("identity instance stays matched and close to the identity") {
  InterpolationProblem p;
  p.variety = VarietyModel::first_axis(2);
  for (int j = 1; j <= 3; ++j) {
    p.sources.points.push_back(make_point({double(j), 0.0}));
    p.targets.points.push_back(make_point({double(j), 0.0}));
  }
  p.stages = 4;
  const auto r = run_interpolation(p);
  CHECK(r.matched.size() == 3);
  CHECK(r.residual <= 1e-9);
  for (const auto& s : r.stages) CHECK(s.pass());
  CHECK(deviation_on(r.word, p.r1, 0.0) < p.epsilon);
}

TEST_CASE("small seeded run: conditions, schedule and membership") {
  auto p = seeded_instance(3, 4);
  p.stages = 5;
  const auto r = run_interpolation(p);
  REQUIRE(r.matched.size() == 4);
  CHECK(r.residual <= 1e-8);
  const auto& radii = r.word.schedule;
  REQUIRE(radii.size() == p.stages + 1);
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) CHECK(radii[k + 1] - radii[k] > 1.0);
  for (const auto& s : r.stages) {
    CHECK(s.cond_i.pass);
    CHECK(s.cond_ii.pass);
    CHECK(s.cond_iii.pass);
    CHECK(s.cond_iv.pass);
    CHECK(s.cond_v.pass);
    CHECK(s.remark.pass);
  }

  const auto words = stage_words(r.word);
  REQUIRE(words.size() == p.stages);
  for (const auto& a : p.sources.points) {
    const auto m = fb_membership(words, radii, a);
    CHECK(m.inside);
    CHECK(m.stage == p.stages);
  }
  const auto deep = fb_membership(words, radii, make_point({Complex(0.1, 0.1), Complex(0.0, 0.2)}));
  CHECK(deep.inside);

  // A point of X beyond every level disc: its orbit leaves the balls.
  const auto far = fb_membership(words, radii, make_point({40.0, 0.0}));
  CHECK_FALSE(far.inside);
  CHECK(far.stage >= 1);
  CHECK(far.stage <= p.stages);
}

TEST_CASE("membership escapes on overflow and checks the schedule") {
  const auto w = vertical_shear({0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1e90});
  const auto m = fb_membership({identity_word(2), w}, {5.0, 6.0}, make_point({10.0, 0.0}));
  CHECK_FALSE(m.inside);
  CHECK(m.stage == 1);
  const auto in = fb_membership({identity_word(2), w}, {5.0, 6.0}, make_point({0.0, 0.1}));
  CHECK(in.inside);
  CHECK(in.stage == 2);
  CHECK_THROWS_AS(fb_membership({identity_word(2), w}, {5.0}, origin2()), ValidationError);
}
