#include "holointerp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "holointerp/errors.hpp"
#include "minimize.hpp"

namespace holointerp {

CPoint make_point(std::initializer_list<Complex> coords) {
  CPoint z(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (const auto& c : coords) z[i++] = c;
  return z;
}

bool is_finite(const CPoint& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
  }
  return true;
}

Disc enclose(const Disc& a, const Disc& b) {
  if (a.contains(b)) return a;
  if (b.contains(a)) return b;
  const double d = std::abs(b.center - a.center);
  const double radius = 0.5 * (d + a.radius + b.radius);
  // Centre sits on the segment between the two centres.
  const Complex dir = (b.center - a.center) / d;
  return {a.center + dir * (radius - a.radius), radius};
}

Ball::Ball(CPoint c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("radius", "must be positive and finite");
  if (!is_finite(center)) throw ValidationError("center", "must be finite");
}

bool BallSchedule::well_spaced() const {
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] - radii[k - 1] > 1.0)) return false;
  }
  return true;
}

double BallSchedule::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < radii.size(); ++k) gap = std::min(gap, radii[k] - radii[k - 1]);
  return gap;
}

// ---------------------------------------------------------------------------
// VarietyModel

namespace {

Complex horner(const std::vector<Complex>& c, Complex t) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

// Taylor coefficients of p at t0.
std::vector<Complex> shift_polynomial(std::vector<Complex> c, Complex t0) {
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = n - 1; j > k; --j) c[j - 1] += t0 * c[j];
  }
  return c;
}

}  // namespace

VarietyModel VarietyModel::affine(CPoint basepoint, const std::vector<CPoint>& basis) {
  const auto n = static_cast<std::size_t>(basepoint.size());
  if (n < 2) throw ValidationError("variety", "ambient dimension must be at least 2");
  if (basis.size() >= n) throw ValidationError("variety", "affine subspace must be proper");
  VarietyModel v;
  v.kind_ = Kind::AffineSubspace;
  v.dimension_ = n;
  v.basepoint_ = std::move(basepoint);
  v.basis_ = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (static_cast<std::size_t>(basis[k].size()) != n) throw ValidationError("variety", "basis dimension mismatch");
    CPoint u = basis[k];
    const double scale = u.norm();
    for (std::size_t j = 0; j < k; ++j) {
      const auto col = v.basis_.col(static_cast<Eigen::Index>(j));
      u -= col * col.dot(u);
    }
    if (!(u.norm() > 1e-10 * std::max(1.0, scale))) {
      throw ValidationError("variety", "basis vectors are linearly dependent");
    }
    v.basis_.col(static_cast<Eigen::Index>(k)) = u / u.norm();
  }
  return v;
}

VarietyModel VarietyModel::graph_curve(std::vector<Complex> coefficients, std::size_t dimension) {
  if (dimension < 2) throw ValidationError("variety", "graph curve needs dimension >= 2");
  while (coefficients.size() > 1 && coefficients.back() == Complex(0.0)) coefficients.pop_back();
  if (coefficients.empty()) coefficients.push_back(0.0);
  VarietyModel v;
  v.kind_ = Kind::GraphCurve;
  v.dimension_ = dimension;
  v.basepoint_ = CPoint::Zero(static_cast<Eigen::Index>(dimension));
  v.coefficients_ = std::move(coefficients);
  return v;
}

VarietyModel VarietyModel::first_axis(std::size_t dimension) {
  CPoint e1 = CPoint::Zero(static_cast<Eigen::Index>(dimension));
  e1[0] = 1.0;
  return affine(CPoint::Zero(static_cast<Eigen::Index>(dimension)), {e1});
}

std::size_t VarietyModel::param_dimension() const {
  return kind_ == Kind::GraphCurve ? 1 : static_cast<std::size_t>(basis_.cols());
}

CPoint VarietyModel::point(const CPoint& param) const {
  if (kind_ == Kind::AffineSubspace) return basepoint_ + basis_ * param;
  CPoint z = CPoint::Zero(static_cast<Eigen::Index>(dimension_));
  z[0] = param[0];
  z[1] = horner(coefficients_, param[0]);
  return z;
}

CPoint VarietyModel::nearest_param(const CPoint& z) const {
  if (kind_ == Kind::AffineSubspace) return basis_.adjoint() * (z - basepoint_);
  const Complex z1 = z[0];
  const Complex z2 = z[1];
  const double reach = std::abs(z2 - horner(coefficients_, z1));
  if (reach == 0.0) return make_point({z1});
  // The nearest parameter lies within `reach` of z1 since t = z1 already achieves it.
  auto cost = [&](const CPoint& t) {
    return std::norm(t[0] - z1) + std::norm(horner(coefficients_, t[0]) - z2);
  };
  return detail::argmin_on_ball(cost, make_point({z1}), reach);
}

double VarietyModel::distance(const CPoint& z) const { return holointerp::distance(z, point(nearest_param(z))); }

double VarietyModel::lipschitz_bound(const CPoint& param_center, double param_radius) const {
  if (kind_ == Kind::AffineSubspace) return 1.0;
  const double reach = std::abs(param_center[0]) + param_radius;
  double deriv = 0.0;
  for (std::size_t k = 1; k < coefficients_.size(); ++k) {
    deriv += static_cast<double>(k) * std::abs(coefficients_[k]) * std::pow(reach, static_cast<double>(k - 1));
  }
  return std::sqrt(1.0 + deriv * deriv);
}

Disc VarietyModel::projection_disc(const CPoint& functional, const CPoint& param_center, double param_radius) const {
  const Complex center = functional.dot(point(param_center));
  if (kind_ == Kind::AffineSubspace) {
    const Eigen::RowVectorXcd row = functional.adjoint() * basis_;
    return {center, param_radius * row.norm()};
  }
  // l(gamma(t)) = conj(u1) t + conj(u2) p(t), expanded around the centre.
  std::vector<Complex> q = coefficients_;
  for (auto& c : q) c *= std::conj(functional[1]);
  if (q.size() < 2) q.resize(2, 0.0);
  q[1] += std::conj(functional[0]);
  const auto shifted = shift_polynomial(q, param_center[0]);
  double radius = 0.0;
  for (std::size_t k = 1; k < shifted.size(); ++k) {
    radius += std::abs(shifted[k]) * std::pow(param_radius, static_cast<double>(k));
  }
  return {center, radius};
}

// ---------------------------------------------------------------------------
// GraphPiece

CPoint GraphPiece::point(const CPoint& param) const {
  CPoint z = variety.point(param);
  return image ? image->forward(z) : z;
}

double GraphPiece::distance(const CPoint& z) const {
  double best;
  if (!image && variety.kind() == VarietyModel::Kind::AffineSubspace) {
    CPoint t = variety.nearest_param(z);
    const double off = (t - param_center).norm();
    if (off > param_radius) t = param_center + (t - param_center) * (param_radius / off);
    best = holointerp::distance(z, variety.point(t));
  } else {
    auto cost = [&](const CPoint& t) { return (point(t) - z).squaredNorm(); };
    best = std::sqrt(detail::minimize_on_ball(cost, param_center, param_radius, nullptr));
  }
  return std::max(0.0, best - thickness);
}

bool GraphPiece::contains(const CPoint& z, double tol) const {
  if (image && thickness == 0.0) {
    CPoint w;
    try {
      w = image->inverse(z);
    } catch (const Overflow&) {
      return false;
    }
    const CPoint t = variety.nearest_param(w);
    if ((t - param_center).norm() > param_radius + tol) return false;
    return holointerp::distance(w, variety.point(t)) <= tol;
  }
  return distance(z) <= tol;
}

// ---------------------------------------------------------------------------
// CertifiedCompact

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::Ball: return "ball";
    case Certificate::GraphDisc: return "graph_disc";
    case Certificate::BallUnionGraph: return "ball_union_graph";
    case Certificate::DisjointGraphDiscs: return "disjoint_graph_discs";
    case Certificate::Image: return "image";
    case Certificate::Neighborhood: return "neighborhood";
  }
  return "unknown";
}

CertifiedCompact::CertifiedCompact(std::vector<Atom> atoms, Certificate certificate)
    : atoms_(std::move(atoms)), certificate_(certificate) {}

CertifiedCompact CertifiedCompact::ball(Ball b) { return CertifiedCompact({std::move(b)}, Certificate::Ball); }

CertifiedCompact CertifiedCompact::piece(GraphPiece p) {
  const auto tag = p.is_mapped() ? Certificate::Image : Certificate::GraphDisc;
  return CertifiedCompact({std::move(p)}, tag);
}

std::size_t CertifiedCompact::dimension() const {
  if (atoms_.empty()) return 0;
  return std::visit(
      [](const auto& a) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Ball>) {
          return a.dimension();
        } else {
          return a.variety.dimension();
        }
      },
      atoms_.front());
}

bool CertifiedCompact::contains(const CPoint& z, double tol) const {
  return std::any_of(atoms_.begin(), atoms_.end(),
                     [&](const Atom& a) { return std::visit([&](const auto& x) { return x.contains(z, tol); }, a); });
}

double CertifiedCompact::distance(const CPoint& z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) best = std::min(best, std::visit([&](const auto& x) { return x.distance(z); }, a));
  return best;
}

CertifiedCompact CertifiedCompact::united(const CertifiedCompact& other, Certificate tag) const {
  auto atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  return CertifiedCompact(std::move(atoms), tag);
}

CertifiedCompact CertifiedCompact::inflated(double delta) const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    if (const auto* b = std::get_if<Ball>(&a)) {
      atoms.emplace_back(Ball(b->center, b->radius + delta));
    } else {
      auto p = std::get<GraphPiece>(a);
      p.thickness += delta;
      atoms.emplace_back(std::move(p));
    }
  }
  return CertifiedCompact(std::move(atoms), Certificate::Neighborhood);
}

// ---------------------------------------------------------------------------
// Operations

DiscretenessReport check_discrete(const SequenceSpec& seq, double duplicate_tol) {
  if (seq.points.empty()) throw EmptySequence();
  DiscretenessReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.points.size(); ++j) {
      const double d = distance(seq.points[i], seq.points[j]);
      if (d <= duplicate_tol) throw DuplicatePoint(i, j);
      if (d < report.min_distance) {
        report.min_distance = d;
        report.closest_i = i;
        report.closest_j = j;
      }
    }
  }
  report.pass = report.min_distance >= seq.min_separation;
  return report;
}

namespace {

CPoint atom_center(const Atom& a) {
  if (const auto* b = std::get_if<Ball>(&a)) return b->center;
  return std::get<GraphPiece>(a).center_point();
}

// sup over the piece of |x - c|; |gamma - c|^2 is subharmonic so the boundary suffices.
double piece_reach(const GraphPiece& p, const CPoint& c) {
  if (!p.image && p.variety.kind() == VarietyModel::Kind::AffineSubspace) {
    const CPoint v = p.center_point() - c;
    const CPoint along = p.variety.basis().adjoint() * v;
    const double perp2 = std::max(0.0, v.squaredNorm() - along.squaredNorm());
    return std::sqrt(perp2 + std::pow(along.norm() + p.param_radius, 2)) + p.thickness;
  }
  auto neg = [&](const CPoint& t) { return -(p.point(t) - c).squaredNorm(); };
  const double best = -detail::minimize_on_ball(neg, p.param_center, p.param_radius, nullptr, /*boundary_only=*/true);
  return std::sqrt(std::max(0.0, best)) + p.thickness;
}

void add_thickness(std::vector<CPoint>& out, const CPoint& z, double thickness) {
  out.push_back(z);
  if (thickness <= 0.0) return;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    for (const Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
      CPoint w = z;
      w[k] += thickness * dir;
      out.push_back(std::move(w));
    }
  }
}

}  // namespace

Ball circumscribed_ball(const CertifiedCompact& set, double margin) {
  if (set.empty()) throw ValidationError("set", "must be nonempty");
  CPoint centroid = CPoint::Zero(static_cast<Eigen::Index>(set.dimension()));
  for (const auto& a : set.atoms()) centroid += atom_center(a);
  centroid /= static_cast<double>(set.atoms().size());
  double radius = 0.0;
  for (const auto& a : set.atoms()) {
    if (const auto* b = std::get_if<Ball>(&a)) {
      radius = std::max(radius, distance(b->center, centroid) + b->radius);
    } else {
      radius = std::max(radius, piece_reach(std::get<GraphPiece>(a), centroid));
    }
  }
  return Ball(centroid, std::max(radius + margin, std::numeric_limits<double>::min()));
}

double reach(const CertifiedCompact& set, const CPoint& from) {
  double radius = 0.0;
  for (const auto& a : set.atoms()) {
    if (const auto* b = std::get_if<Ball>(&a)) {
      radius = std::max(radius, distance(b->center, from) + b->radius);
    } else {
      radius = std::max(radius, piece_reach(std::get<GraphPiece>(a), from));
    }
  }
  return radius;
}

CertifiedCompact union_certified(const Ball& ball, const GraphPiece& piece) {
  if (piece.image || piece.thickness != 0.0) throw UncertifiablePattern("piece must be a bare graph over a disc");
  if (ball.dimension() != piece.variety.dimension()) throw UncertifiablePattern("dimension mismatch");
  const auto& X = piece.variety;
  bool covered = true;
  if (X.kind() == VarietyModel::Kind::AffineSubspace) {
    const CPoint p0 = X.nearest_param(ball.center);
    const double d = distance(ball.center, X.point(p0));
    if (d < ball.radius) {
      const double half = std::sqrt(ball.radius * ball.radius - d * d);
      covered = (p0 - piece.param_center).norm() + half <= piece.param_radius + kMembershipTol;
    }
  } else {
    // Any t with gamma(t) in the ball has |t - c_1| <= r; scan that disc.
    const CPoint c1 = make_point({ball.center[0]});
    const double spacing = ball.radius / 96.0;
    auto pts = ball_lattice(c1, ball.radius, spacing, 0.0);
    const auto rim = sphere_lattice(c1, ball.radius, spacing, 0.0);
    pts.insert(pts.end(), rim.begin(), rim.end());
    for (const auto& t : pts) {
      if (ball.contains(X.point(t), 0.0) && (t - piece.param_center).norm() > piece.param_radius + kMembershipTol) {
        covered = false;
        break;
      }
    }
  }
  if (!covered) throw UncertifiablePattern("graph piece does not contain X n B");
  return CertifiedCompact({ball, piece}, Certificate::BallUnionGraph);
}

std::vector<CPoint> sample_grid(const CertifiedCompact& set, double density, double offset) {
  if (!(density > 0.0)) throw ValidationError("density", "must be positive");
  std::vector<CPoint> out;
  for (const auto& a : set.atoms()) {
    if (const auto* b = std::get_if<Ball>(&a)) {
      auto pts = ball_lattice(b->center, b->radius, 1.0 / density, offset);
      out.insert(out.end(), pts.begin(), pts.end());
      continue;
    }
    const auto& p = std::get<GraphPiece>(a);
    const double lip = p.image ? 1.0 : p.variety.lipschitz_bound(p.param_center, p.param_radius);
    const double spacing = 1.0 / (density * std::max(1.0, lip));
    for (const auto& t : ball_lattice(p.param_center, p.param_radius, spacing, offset)) {
      add_thickness(out, p.point(t), p.thickness);
    }
  }
  return out;
}

std::vector<CPoint> boundary_grid(const CertifiedCompact& set, double density, double offset) {
  if (!(density > 0.0)) throw ValidationError("density", "must be positive");
  std::vector<CPoint> out;
  for (const auto& a : set.atoms()) {
    if (const auto* b = std::get_if<Ball>(&a)) {
      auto pts = sphere_lattice(b->center, b->radius, 1.0 / density, offset);
      out.insert(out.end(), pts.begin(), pts.end());
      continue;
    }
    const auto& p = std::get<GraphPiece>(a);
    const double lip = p.image ? 1.0 : p.variety.lipschitz_bound(p.param_center, p.param_radius);
    const double spacing = 1.0 / (density * std::max(1.0, lip));
    for (const auto& t : sphere_lattice(p.param_center, p.param_radius, spacing, offset)) {
      add_thickness(out, p.point(t), p.thickness);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lattices

std::vector<CPoint> ball_lattice(const CPoint& center, double radius, double spacing, double offset) {
  const auto n = static_cast<std::size_t>(center.size());
  const std::size_t real_dim = 2 * n;
  std::vector<CPoint> out;
  std::vector<double> x(real_dim, 0.0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t d, double remaining2) {
    if (d == real_dim) {
      CPoint z = center;
      for (std::size_t k = 0; k < n; ++k) z[static_cast<Eigen::Index>(k)] += Complex(x[2 * k], x[2 * k + 1]);
      out.push_back(std::move(z));
      return;
    }
    const double reach = std::sqrt(std::max(0.0, remaining2));
    const auto lo = static_cast<long>(std::ceil(-reach / spacing - offset));
    const auto hi = static_cast<long>(std::floor(reach / spacing - offset));
    for (long i = lo; i <= hi; ++i) {
      x[d] = (static_cast<double>(i) + offset) * spacing;
      rec(d + 1, remaining2 - x[d] * x[d]);
    }
  };
  rec(0, radius * radius);
  if (out.empty()) out.push_back(center);
  return out;
}

namespace {

std::vector<CPoint> unit_sphere_points(std::size_t n, double radius, double spacing, double offset) {
  constexpr double pi = std::numbers::pi;
  std::vector<CPoint> out;
  if (radius <= 0.0) {
    out.push_back(CPoint::Zero(static_cast<Eigen::Index>(n)));
    return out;
  }
  if (n == 1) {
    const auto m = static_cast<std::size_t>(std::max(3.0, std::ceil(2.0 * pi * radius / spacing)));
    for (std::size_t k = 0; k < m; ++k) {
      const double a = 2.0 * pi * (static_cast<double>(k) + offset) / static_cast<double>(m);
      out.push_back(make_point({std::polar(radius, a)}));
    }
    return out;
  }
  const auto rows = static_cast<std::size_t>(std::max(2.0, std::ceil(0.5 * pi * radius / spacing) + 1.0));
  for (std::size_t i = 0; i < rows; ++i) {
    const double frac = std::min(1.0, (static_cast<double>(i) + offset) / static_cast<double>(rows - 1));
    const double eta = 0.5 * pi * frac;
    const double r1 = radius * std::cos(eta);
    const double r2 = radius * std::sin(eta);
    const auto first = unit_sphere_points(1, r1 < 1e-14 * radius ? 0.0 : r1, spacing, offset);
    const auto rest = unit_sphere_points(n - 1, r2 < 1e-14 * radius ? 0.0 : r2, spacing, offset);
    for (const auto& a : first) {
      for (const auto& b : rest) {
        CPoint z(static_cast<Eigen::Index>(n));
        z[0] = a[0];
        z.tail(static_cast<Eigen::Index>(n - 1)) = b;
        out.push_back(std::move(z));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<CPoint> sphere_lattice(const CPoint& center, double radius, double spacing, double offset) {
  auto pts = unit_sphere_points(static_cast<std::size_t>(center.size()), radius, spacing, offset);
  for (auto& p : pts) p += center;
  return pts;
}

void for_each_sphere_point(const CPoint& center, double radius, double spacing, double offset,
                           const std::function<void(const CPoint&)>& visit) {
  const auto n = static_cast<std::size_t>(center.size());
  if (n <= 1 || radius <= 0.0) {
    for (const auto& p : sphere_lattice(center, radius, spacing, offset)) visit(p);
    return;
  }
  // Same rows as sphere_lattice, without holding the whole lattice in memory.
  constexpr double pi = std::numbers::pi;
  const auto rows = static_cast<std::size_t>(std::max(2.0, std::ceil(0.5 * pi * radius / spacing) + 1.0));
  CPoint z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows; ++i) {
    const double frac = std::min(1.0, (static_cast<double>(i) + offset) / static_cast<double>(rows - 1));
    const double eta = 0.5 * pi * frac;
    const double r1 = radius * std::cos(eta);
    const double r2 = radius * std::sin(eta);
    const auto first = unit_sphere_points(1, r1 < 1e-14 * radius ? 0.0 : r1, spacing, offset);
    const auto rest = unit_sphere_points(n - 1, r2 < 1e-14 * radius ? 0.0 : r2, spacing, offset);
    for (const auto& a : first) {
      for (const auto& b : rest) {
        z[0] = a[0];
        z.tail(static_cast<Eigen::Index>(n - 1)) = b;
        visit(z + center);
      }
    }
  }
}

}  // namespace holointerp
