#pragma once

#include <optional>
#include <vector>

#include "holointerp/geometry.hpp"

namespace holointerp::detail {

/// Projection discs of a region's atoms for arbitrary linear functionals.
/// Mapped pieces are represented by rim samples taken once.
class RegionShadow {
 public:
  explicit RegionShadow(const CertifiedCompact& region);
  /// Discs containing <z, u> over each atom, grown by `inflate`; discs lying
  /// inside another are dropped.
  std::vector<Disc> discs(const CPoint& u, double inflate) const;

 private:
  struct Entry {
    enum class Kind { Ball, Piece, Rim } kind = Kind::Ball;
    CPoint center;
    double radius = 0.0;
    double thickness = 0.0;
    GraphPiece piece;
    std::vector<CPoint> rim;
  };
  std::vector<Entry> entries_;
};

struct Damping {
  std::vector<Complex> roots;
  std::vector<unsigned> multiplicities;
  std::size_t degree = 0;
};

/// Roots and multiplicities of the damped interpolating factor
///   h = delta * prod_q (z - q)/(zeta0 - q) * prod_a ((z - c_a)/(zeta0 - c_a))^{d_a}
/// with |h| <= share on every disc. Empty when zeta0 meets a pin or a disc, or
/// the degree would exceed max_degree. With flat set, pins become double roots
/// and a linear factor makes h'(zeta0) = 0, so the shear has identity
/// Jacobian at the moving point and at every pin.
std::optional<Damping> solve_damping(Complex zeta0, Complex delta, const std::vector<Complex>& pins,
                                     const std::vector<Disc>& discs, double share, unsigned max_degree,
                                     bool flat = false);

}  // namespace holointerp::detail
