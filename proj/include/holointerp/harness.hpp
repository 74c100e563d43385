#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "holointerp/engine.hpp"

namespace holointerp {

/// Problem files are JSON with format_version 1. Malformed documents raise
/// ParseError naming the line or field; well-formed but invalid ones raise
/// ValidationError from InterpolationProblem::validate.
InterpolationProblem problem_from_json(const std::string& text);
std::string problem_to_json(const InterpolationProblem& problem);
InterpolationProblem load_problem(const std::string& path);

/// Sequence files for `normalize`: {"format_version": 1, "points": [[[re, im], ...], ...]}.
SequenceSpec sequence_from_json(const std::string& text);

struct VerifyOptions {
  /// Samples per unit length; the problem's grid density is used when larger.
  double density = 4.0;
  /// Grid offset in cells, half a cell away from the engine's own grids.
  double offset = 0.5;
  std::size_t roundtrip_points = 1000;
  std::uint64_t roundtrip_seed = 0;
};

struct VerificationReport {
  std::vector<StageRecord> stages;
  std::size_t word_length = 0;
  std::size_t matched = 0;
  std::size_t unmatched_inside = 0;  // targets inside the final ball left unmatched
  double residual = 0.0;             // max |Phi(a_j) - b_j| over matched j
  double residual_tolerance = 1e-8;
  // Inverse exactness on seeded points of the final ball: max |Phi^-1(Phi(z)) - z|
  // over the samples whose orbit stays below the overflow threshold. Reported,
  // not part of pass(): off the controlled set the word grows past 1e100.
  double roundtrip = 0.0;
  double roundtrip_tolerance = 0.0;
  std::size_t roundtrip_samples = 0;
  std::size_t roundtrip_overflow = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;            // the seed the roundtrip samples were drawn with
  std::string failure;               // why the word could not be checked at all
  /// Every stage passes, every target in the final ball is matched, residual within tolerance.
  bool pass() const;
};

/// Recomputes every stage condition, the matches and the inverse roundtrip
/// from the word and the problem alone.
VerificationReport verify(const AutWord& word, const InterpolationProblem& problem, const VerifyOptions& options = {});
VerificationReport verify(const InterpolationResult& result, const InterpolationProblem& problem,
                          const VerifyOptions& options = {});

std::string report_to_json(const VerificationReport& report);
std::string report_to_text(const VerificationReport& report);

/// Rectangle in the complex plane of one coordinate, the others held at base.
struct OrbitWindow {
  std::size_t coordinate = 0;
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
  CPoint base;  // empty means the origin
};

struct OrbitCell {
  double re = 0.0;
  double im = 0.0;
  std::size_t escape_stage = 0;  // 0: inside through every stage
};

/// Grid of escape stages with the given spacing, corners included.
std::vector<OrbitCell> export_orbit(const std::vector<AutWord>& words, const std::vector<double>& schedule,
                                    const OrbitWindow& window, double resolution);
std::string orbit_to_csv(const std::vector<OrbitCell>& cells);

/// Writes through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace holointerp
