#pragma once

#include <complex>
#include <functional>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace holointerp {

using Complex = std::complex<double>;
/// A point (or vector) of C^N.
using CPoint = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kMembershipTol = 1e-10;
inline constexpr double kDuplicateTol = 1e-12;

/// Max of |z_i - w_i| collapsed into the Euclidean norm; the distance used everywhere.
inline double distance(const CPoint& z, const CPoint& w) { return (z - w).norm(); }

CPoint make_point(std::initializer_list<Complex> coords);
bool is_finite(const CPoint& z);

/// A holomorphic automorphism seen only through point evaluation. Pieces of the
/// variety pushed forward by a word carry one of these.
class PointMap {
 public:
  virtual ~PointMap() = default;
  virtual CPoint forward(const CPoint& z) const = 0;
  virtual CPoint inverse(const CPoint& w) const = 0;
};

/// Closed disc in the complex plane.
struct Disc {
  Complex center;
  double radius = 0.0;
  bool contains(const Disc& other) const {
    return std::abs(other.center - center) + other.radius <= radius;
  }
};

/// Smallest disc containing both discs.
Disc enclose(const Disc& a, const Disc& b);

struct Ball {
  CPoint center;
  double radius = 0.0;

  Ball() = default;
  Ball(CPoint c, double r);

  bool contains(const CPoint& z, double tol = kMembershipTol) const {
    return holointerp::distance(z, center) <= radius + tol;
  }
  double distance(const CPoint& z) const {
    return std::max(0.0, holointerp::distance(z, center) - radius);
  }
  std::size_t dimension() const { return static_cast<std::size_t>(center.size()); }
};

/// Radii of the nested balls B_1 c B_2 c ... centred at the origin.
struct BallSchedule {
  std::vector<double> radii;

  /// True when r_{k+1} - r_k > 1 for every k.
  bool well_spaced() const;
  double min_gap() const;
};

/// Desk-scale model of the subvariety X: an affine subspace or the graph curve
/// t -> (t, p(t), 0, ..., 0).
///
/// Affine parameters are coordinates with respect to an orthonormalised copy of
/// the supplied basis, so parameter discs are metric balls on the subspace.
class VarietyModel {
 public:
  enum class Kind { AffineSubspace, GraphCurve };

  static VarietyModel affine(CPoint basepoint, const std::vector<CPoint>& basis);
  static VarietyModel graph_curve(std::vector<Complex> coefficients, std::size_t dimension);
  /// The coordinate hyperplane-like line {z_2 = ... = z_N = 0}.
  static VarietyModel first_axis(std::size_t dimension);

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t param_dimension() const;
  const CPoint& basepoint() const { return basepoint_; }
  const CMatrix& basis() const { return basis_; }
  const std::vector<Complex>& coefficients() const { return coefficients_; }

  CPoint point(const CPoint& param) const;
  /// Parameter of the nearest point of the variety.
  CPoint nearest_param(const CPoint& z) const;
  double distance(const CPoint& z) const;
  bool contains(const CPoint& z, double tol = kMembershipTol) const { return distance(z) <= tol; }

  /// Upper bound of |d gamma| over the parameter ball.
  double lipschitz_bound(const CPoint& param_center, double param_radius) const;
  /// Disc containing l(gamma(t)) for |t - c| <= rho, where l(z) = <z, u> = u^H z.
  Disc projection_disc(const CPoint& functional, const CPoint& param_center, double param_radius) const;

 private:
  Kind kind_ = Kind::AffineSubspace;
  std::size_t dimension_ = 0;
  CPoint basepoint_;
  CMatrix basis_;  // orthonormal columns
  std::vector<Complex> coefficients_;
};

/// Compact piece of the variety: gamma(parameter ball), optionally pushed forward
/// by an automorphism and thickened to a tubular neighbourhood.
struct GraphPiece {
  VarietyModel variety;
  CPoint param_center;
  double param_radius = 0.0;
  std::shared_ptr<const PointMap> image;  // null for the piece itself
  double thickness = 0.0;

  CPoint point(const CPoint& param) const;
  CPoint center_point() const { return point(param_center); }
  bool contains(const CPoint& z, double tol = kMembershipTol) const;
  double distance(const CPoint& z) const;
  bool is_mapped() const { return static_cast<bool>(image); }
};

using Atom = std::variant<Ball, GraphPiece>;

/// Why a CertifiedCompact is polynomially convex.
enum class Certificate {
  Ball,
  GraphDisc,
  BallUnionGraph,     // B u L with X n B contained in L
  DisjointGraphDiscs, // graph over a union of disjoint parameter discs
  Image,              // automorphic image of a certified set
  Neighborhood,       // union of certified sets and thin tubes; used only as a sampling zone
};

std::string to_string(Certificate c);

class CertifiedCompact {
 public:
  CertifiedCompact() = default;
  CertifiedCompact(std::vector<Atom> atoms, Certificate certificate);

  static CertifiedCompact ball(Ball b);
  static CertifiedCompact piece(GraphPiece p);

  const std::vector<Atom>& atoms() const { return atoms_; }
  Certificate certificate() const { return certificate_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t dimension() const;

  bool contains(const CPoint& z, double tol = kMembershipTol) const;
  double distance(const CPoint& z) const;

  /// Union keeping the weaker certificate tag.
  CertifiedCompact united(const CertifiedCompact& other, Certificate tag) const;
  /// Every atom enlarged by delta (balls grow, pieces gain a tube).
  CertifiedCompact inflated(double delta) const;

 private:
  std::vector<Atom> atoms_;
  Certificate certificate_ = Certificate::Neighborhood;
};

/// A truncated discrete sequence.
struct SequenceSpec {
  std::vector<CPoint> points;
  double min_separation = 0.0;
  std::size_t size() const { return points.size(); }
};

struct DiscretenessReport {
  double min_distance = 0.0;
  std::size_t closest_i = 0;
  std::size_t closest_j = 0;
  bool pass = false;
};

/// Minimum pairwise distance and pass/fail against min_separation.
/// Throws DuplicatePoint when two entries coincide within kDuplicateTol.
DiscretenessReport check_discrete(const SequenceSpec& seq, double duplicate_tol = kDuplicateTol);

/// Ball centred at the centroid of the atom centres containing the set with
/// clearance >= margin.
Ball circumscribed_ball(const CertifiedCompact& set, double margin);

/// sup of |z - from| over the set.
double reach(const CertifiedCompact& set, const CPoint& from);

/// Certifies B u L when L is a graph piece containing X n B.
CertifiedCompact union_certified(const Ball& ball, const GraphPiece& piece);

/// Deterministic grid inside the set with spacing <= 1/density. offset in [0,1)
/// shifts the lattice by that fraction of a cell.
std::vector<CPoint> sample_grid(const CertifiedCompact& set, double density, double offset = 0.0);

/// Grid on the boundary of every atom (sphere of a ball, image of the boundary
/// of a parameter ball). Sup norms of holomorphic maps over the set are attained
/// there.
std::vector<CPoint> boundary_grid(const CertifiedCompact& set, double density, double offset = 0.0);

// Lattice helpers shared by the grids above.
std::vector<CPoint> ball_lattice(const CPoint& center, double radius, double spacing, double offset);
std::vector<CPoint> sphere_lattice(const CPoint& center, double radius, double spacing, double offset);
/// Visits the points of sphere_lattice in the same order without storing them.
void for_each_sphere_point(const CPoint& center, double radius, double spacing, double offset,
                           const std::function<void(const CPoint&)>& visit);

}  // namespace holointerp
