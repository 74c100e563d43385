#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "holointerp/automorphism.hpp"
#include "holointerp/geometry.hpp"

namespace holointerp {

struct Move {
  CPoint source;
  CPoint target;
};

/// Move finitely many points, fix others exactly, stay epsilon-close to the
/// identity on the region.
struct RelocationTask {
  std::vector<Move> moves;
  std::vector<CPoint> pinned;
  CertifiedCompact region;
  double epsilon = 0.0;
  /// Lower bound for dist(p, region) over sources and targets. Pinned points
  /// are exempt: they are fixed exactly wherever they are.
  double clearance = 0.0;
};

struct RelocationOptions {
  std::size_t frame_count = 32;
  std::uint64_t frame_seed = 0x5eed;
  /// Largest total damping degree tried for a single letter.
  unsigned max_degree = 600;
  /// Letters with identity Jacobian at the moving point and at every pin.
  bool flat = false;
};

/// How one carry was realised. Coordinates are taken in pool frame `frame`;
/// pivot is the functional used at the source, finisher the one used at the
/// target, helper the coordinate raised to a far value (when needed).
struct CarryPlan {
  std::size_t frame = 0;
  std::size_t pivot = 0;
  std::size_t finisher = 0;
  std::size_t helper = 0;
  bool uses_helper = false;
  std::size_t letters = 0;
  std::size_t total_degree = 0;
};

/// Word of shears taking source to target, fixing pinned points exactly, with
/// sup deviation on the region at most share. Throws SeparationFailure when no
/// frame of the pool separates the moving point from the region.
AutWord build_carry(const CPoint& source, const CPoint& target, const std::vector<CPoint>& pinned,
                    const CertifiedCompact& region, double share, const RelocationOptions& options = {},
                    CarryPlan* plan = nullptr);

/// All moves of the task as one word. budget is the grid density for the
/// a posteriori deviation check; pass 0 to skip it.
AutWord relocate_points(const RelocationTask& task, double budget, const RelocationOptions& options = {});

/// Word sending the j-th point of a sequence inside a proper affine subspace to
/// e_j = (j, 0, ..., 0), j = 1..J.
AutWord tame_normalize(const SequenceSpec& seq);

/// Word close to the identity on region whose image of the variety avoids every
/// unmatched target by at least gap; matched targets stay fixed.
AutWord collision_nudge(const VarietyModel& variety, const SequenceSpec& targets, const std::vector<std::size_t>& matched,
                        const CertifiedCompact& region, double epsilon, double gap = 1e-6,
                        const RelocationOptions& options = {});

/// Same, with the variety given only through its distance function.
AutWord collision_nudge(const std::function<double(const CPoint&)>& variety_distance, std::size_t dimension,
                        const SequenceSpec& targets, const std::vector<std::size_t>& matched,
                        const CertifiedCompact& region, double epsilon, double gap = 1e-6,
                        const RelocationOptions& options = {});

/// seq x {0} in C^{N+1} and a word normalising it.
std::pair<SequenceSpec, AutWord> lift_sequence(const SequenceSpec& seq);

/// Disc containing <z, u> for z in the atom.
Disc atom_projection(const Atom& atom, const CPoint& functional);

}  // namespace holointerp
