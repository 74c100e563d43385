#include "holointerp/automorphism.hpp"

#include <cmath>
#include <random>

#include "holointerp/errors.hpp"

namespace holointerp {

std::string to_string(LetterKind k) {
  switch (k) {
    case LetterKind::Shear: return "shear";
    case LetterKind::Overshear: return "overshear";
    case LetterKind::AffineUnitary: return "affine";
  }
  return "unknown";
}

namespace {

void require_unitary(const CMatrix& u) {
  if (u.rows() != u.cols() || u.rows() < 2) throw ValidationError("frame", "must be square of size >= 2");
  const CMatrix gram = u.adjoint() * u;
  const double err = (gram - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (!(err <= 1e-12)) throw ValidationError("frame", "not unitary to 1e-12");
}

ElementaryAut make_shear_like(LetterKind kind, CMatrix frame, std::size_t d, std::size_t c, Polynomial h) {
  require_unitary(frame);
  const auto n = static_cast<std::size_t>(frame.cols());
  if (d >= n || c >= n) throw ValidationError("direction", "index outside the frame");
  if (c == d) throw ValidationError("functional", "must differ from the direction");
  ElementaryAut a;
  a.kind = kind;
  a.frame = std::move(frame);
  a.direction = d;
  a.functional = c;
  a.h = std::move(h);
  return a;
}

}  // namespace

ElementaryAut ElementaryAut::shear(CMatrix frame, std::size_t d, std::size_t c, Polynomial h) {
  return make_shear_like(LetterKind::Shear, std::move(frame), d, c, std::move(h));
}

ElementaryAut ElementaryAut::overshear(CMatrix frame, std::size_t d, std::size_t c, Polynomial h) {
  return make_shear_like(LetterKind::Overshear, std::move(frame), d, c, std::move(h));
}

ElementaryAut ElementaryAut::affine_unitary(CMatrix u, CPoint translation) {
  require_unitary(u);
  if (translation.size() != u.rows()) throw ValidationError("translation", "dimension mismatch");
  ElementaryAut a;
  a.kind = LetterKind::AffineUnitary;
  a.frame = std::move(u);
  a.translation = std::move(translation);
  return a;
}

CPoint ElementaryAut::apply(const CPoint& z) const {
  switch (kind) {
    case LetterKind::Shear: {
      const Complex l = frame.col(static_cast<Eigen::Index>(functional)).dot(z);
      return z + frame.col(static_cast<Eigen::Index>(direction)) * h(l);
    }
    case LetterKind::Overshear: {
      const auto ud = frame.col(static_cast<Eigen::Index>(direction));
      const Complex l = frame.col(static_cast<Eigen::Index>(functional)).dot(z);
      return z + ud * ((std::exp(h(l)) - 1.0) * ud.dot(z));
    }
    case LetterKind::AffineUnitary:
      return frame * z + translation;
  }
  return z;
}

CPoint ElementaryAut::apply_inverse(const CPoint& w) const {
  switch (kind) {
    case LetterKind::Shear: {
      const Complex l = frame.col(static_cast<Eigen::Index>(functional)).dot(w);
      return w - frame.col(static_cast<Eigen::Index>(direction)) * h(l);
    }
    case LetterKind::Overshear: {
      const auto ud = frame.col(static_cast<Eigen::Index>(direction));
      const Complex l = frame.col(static_cast<Eigen::Index>(functional)).dot(w);
      return w + ud * ((std::exp(-h(l)) - 1.0) * ud.dot(w));
    }
    case LetterKind::AffineUnitary:
      return frame.adjoint() * (w - translation);
  }
  return w;
}

ElementaryAut ElementaryAut::inverse() const {
  ElementaryAut a = *this;
  if (kind == LetterKind::AffineUnitary) {
    a.frame = frame.adjoint();
    a.translation = -(a.frame * translation);
  } else {
    a.h = h.scaled(-1.0);
  }
  return a;
}

bool ElementaryAut::volume_preserving() const {
  switch (kind) {
    case LetterKind::Shear:
      // The derivative only enters through <u_d, u_c>, zero for distinct frame columns.
      return direction != functional;
    case LetterKind::Overshear:
      return h.is_zero();
    case LetterKind::AffineUnitary:
      return std::abs(frame.determinant() - 1.0) <= 1e-12;
  }
  return false;
}

void AutWord::push(ElementaryAut letter) {
  if (dimension == 0) dimension = letter.dimension();
  if (letter.dimension() != dimension) throw ValidationError("letter", "dimension mismatch");
  letters.push_back(std::move(letter));
}

AutWord AutWord::then(const AutWord& other) const {
  AutWord w = *this;
  if (w.dimension == 0) w.dimension = other.dimension;
  if (other.dimension != 0 && other.dimension != w.dimension) throw ValidationError("word", "dimension mismatch");
  const std::size_t shift = letters.size();
  w.letters.insert(w.letters.end(), other.letters.begin(), other.letters.end());
  for (const auto& s : other.stages) w.stages.push_back({s.begin + shift, s.end + shift});
  return w;
}

AutWord AutWord::inverse() const {
  AutWord w;
  w.dimension = dimension;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(it->inverse());
  return w;
}

AutWord AutWord::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > letters.size()) throw ValidationError("slice", "range outside the word");
  AutWord w;
  w.dimension = dimension;
  w.letters.assign(letters.begin() + static_cast<std::ptrdiff_t>(begin), letters.begin() + static_cast<std::ptrdiff_t>(end));
  return w;
}

AutWord identity_word(std::size_t dimension) {
  AutWord w;
  w.dimension = dimension;
  return w;
}

namespace {

void check_escape(const CPoint& z, std::size_t letter) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    // Written so that NaN also counts as escaped.
    if (!(std::abs(z[i]) <= kEscapeThreshold)) throw Overflow(letter);
  }
}

}  // namespace

CPoint eval(const AutWord& word, const CPoint& z) {
  CPoint w = z;
  for (std::size_t i = 0; i < word.letters.size(); ++i) {
    w = word.letters[i].apply(w);
    check_escape(w, i);
  }
  return w;
}

CPoint eval_inverse(const AutWord& word, const CPoint& w) {
  CPoint z = w;
  for (std::size_t i = word.letters.size(); i-- > 0;) {
    z = word.letters[i].apply_inverse(z);
    check_escape(z, i);
  }
  return z;
}

double sup_deviation(const AutWord& word, const AutWord* reference, const CertifiedCompact& set, double density) {
  if (set.empty()) throw ValidationError("set", "must be nonempty");
  double best = 0.0;
  for (const auto& z : sample_grid(set, density)) {
    const CPoint ref = reference ? eval(*reference, z) : z;
    best = std::max(best, distance(eval(word, z), ref));
  }
  return best;
}

std::vector<CMatrix> frame_pool(std::size_t dimension, std::size_t count, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(dimension);
  std::vector<CMatrix> pool{CMatrix::Identity(n, n)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t k = 0; k < count; ++k) {
    CMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    // Re-orthonormalise so the frame passes the 1e-12 unitarity check comfortably.
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i) * q.col(i).dot(q.col(j));
      q.col(j).normalize();
    }
    pool.push_back(std::move(q));
  }
  return pool;
}

}  // namespace holointerp
