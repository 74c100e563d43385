#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holointerp/automorphism.hpp"
#include "holointerp/geometry.hpp"
#include "holointerp/relocation.hpp"

namespace holointerp {

struct Tolerances {
  double membership = 1e-10;
  double match = 1e-9;
  double duplicate = 1e-12;
};

struct InterpolationProblem {
  std::size_t dimension = 2;
  VarietyModel variety;
  SequenceSpec sources;
  SequenceSpec targets;
  double epsilon = 0.5;
  std::size_t stages = 6;
  double r1 = 0.5;
  double r2 = 2.0;
  double grid_density = 4.0;
  std::uint64_t seed = 0;
  Tolerances tolerances;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// The instance used throughout the tests: C^2, X = {z_2 = 0}, a_j = e_j for
/// j = 1..count, seeded targets with |b| <= 20 and separation >= 0.5.
InterpolationProblem seeded_instance(std::uint64_t seed = 7, std::size_t count = 8);

/// PointMap evaluating a word (forward) and its inverse.
class WordMap : public PointMap {
 public:
  explicit WordMap(AutWord word) : word_(std::move(word)) {}
  CPoint forward(const CPoint& z) const override { return eval(word_, z); }
  CPoint inverse(const CPoint& w) const override { return eval_inverse(word_, w); }
  const AutWord& word() const { return word_; }

 private:
  AutWord word_;
};

/// Parameter disc of the variety; `source` names the source it was grown around.
struct ParamDisc {
  CPoint center;
  double radius = 0.0;
  std::optional<std::size_t> source;
};

/// Largest disc around center whose image under word stays in ball, found by
/// bisection along rays and certified on a dense rim that must stay `margin`
/// inside the ball. `outer` is the largest first-exit radius seen, so the band
/// outer - radius measures how far the level set is from round. A negative
/// radius means center itself maps outside the ball. A positive floor asks for
/// a radius strictly above it whenever the rim there still certifies.
struct LevelDisc {
  double radius = -1.0;
  double outer = -1.0;
  bool empty() const { return radius <= 0.0; }
};

LevelDisc centered_level_disc(const AutWord& word, const VarietyModel& variety, const Ball& ball, const CPoint& center,
                              double resolution, double margin, double floor = 0.0);

/// Conservative inner disc of {z in X : word(z) in ball} centred at the
/// parameter nearest the ball centre. Returns a piece with negative radius
/// (see is_empty_piece) when that centre already maps outside. Throws
/// ResolutionTooCoarse when the band exceeds 10% of the radius.
GraphPiece level_set_L(const AutWord& word, const VarietyModel& variety, const Ball& ball, double resolution);
bool is_empty_piece(const GraphPiece& piece);

/// L_k as parameter discs: the central disc plus one island around each
/// matched source whose target lies in ball. Discs of `previous` with the same
/// centre serve as floors, so consecutive stages nest.
std::vector<ParamDisc> level_discs(const AutWord& word, const InterpolationProblem& problem,
                                   const std::vector<bool>& matched, const Ball& ball,
                                   const std::vector<ParamDisc>& previous = {});

/// Pieces of the variety over the discs, pushed forward by map (may be null).
CertifiedCompact disc_pieces(const VarietyModel& variety, const std::vector<ParamDisc>& discs,
                             std::shared_ptr<const PointMap> map, double thickness = 0.0);

/// Everything the inductive step needs, in image coordinates of Phi_k.
struct StepInput {
  const InterpolationProblem* problem = nullptr;
  AutWord phi;                     // Phi_k
  std::vector<CPoint> positions;   // Phi_k(a_j)
  std::vector<bool> matched;
  Ball B;
  Ball B1;                         // B'
  std::vector<ParamDisc> L;        // L_k, parameters of X
  ParamDisc K;                     // exhaustion disc K_k
  double epsilon = 0.0;            // epsilon_k
  double planned_radius = 0.0;     // preferred radius of B''
  RelocationOptions options;
};

struct StepOutput {
  AutWord theta;
  std::vector<ParamDisc> M;
  Ball B2;                         // B''
  std::vector<std::size_t> newly_matched;
  std::vector<std::size_t> expelled;
  double delta0 = 0.0;
  double epsilon_used = 0.0;
};

/// One inductive step: nudge, phase one (match sources whose targets fall in the
/// new ball), phase two (expel the other sources inside it).
StepOutput inductive_step(const StepInput& in);

struct ConditionResult {
  bool pass = true;
  double value = 0.0;
  double bound = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
};

struct StageRecord {
  std::size_t stage = 0;
  double radius = 0.0;       // r_k
  double next_radius = 0.0;  // r_{k+1}
  std::size_t word_length = 0;
  std::size_t matched_count = 0;
  std::vector<ParamDisc> L;
  ConditionResult cond_i, cond_ii, cond_iii, cond_iv, cond_v, remark;
  bool pass() const;
};

struct InterpolationResult {
  AutWord word;  // Phi_{K_max} with stage ranges and schedule
  std::vector<StageRecord> stages;
  std::vector<std::size_t> matched;
  double residual = 0.0;
  double wall_seconds = 0.0;
};

struct EngineOptions {
  RelocationOptions relocation;
  /// Grid density of the engine's own stage checks (verification uses its own).
  double check_density = 2.0;
  bool run_checks = true;
};

InterpolationResult run_interpolation(const InterpolationProblem& problem, const EngineOptions& options = {});

/// theta_1 = Phi_1, theta_k = Phi_k o Phi_{k-1}^{-1}, read off the stage ranges.
std::vector<AutWord> stage_words(const AutWord& word);

/// Recompute every per-stage condition from the word and the problem alone.
std::vector<StageRecord> evaluate_stages(const InterpolationProblem& problem, const AutWord& word, double density,
                                         double offset);

struct Membership {
  bool inside = false;
  std::size_t stage = 0;  // last stage when inside, escape stage otherwise
};

Membership fb_membership(const std::vector<AutWord>& words, const std::vector<double>& schedule, const CPoint& z);

}  // namespace holointerp
