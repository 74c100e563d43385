#include "holointerp/polynomial.hpp"

#include <numeric>

#include "holointerp/errors.hpp"

namespace holointerp {

Polynomial Polynomial::dense(std::vector<Complex> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  Polynomial p;
  p.form_ = Form::Dense;
  p.coeffs_ = std::move(coefficients);
  return p;
}

Polynomial Polynomial::factored(Complex scale, Complex anchor, std::vector<Complex> roots,
                                std::vector<unsigned> multiplicities) {
  if (roots.size() != multiplicities.size()) throw ValidationError("polynomial", "roots and multiplicities differ in length");
  Polynomial p;
  p.form_ = Form::Factored;
  p.coeffs_.clear();
  p.scale_ = scale;
  p.anchor_ = anchor;
  p.roots_ = std::move(roots);
  p.mult_ = std::move(multiplicities);
  for (const auto& r : p.roots_) {
    if (r == anchor) throw ValidationError("polynomial", "anchor coincides with a root");
  }
  p.prepare();
  return p;
}

Polynomial Polynomial::lagrange(std::vector<Complex> nodes, std::vector<Complex> values) {
  if (nodes.empty() || nodes.size() != values.size()) throw ValidationError("polynomial", "bad interpolation data");
  Polynomial p;
  p.form_ = Form::Lagrange;
  p.coeffs_.clear();
  p.nodes_ = std::move(nodes);
  p.values_ = std::move(values);
  p.prepare();
  return p;
}

void Polynomial::prepare() {
  if (form_ == Form::Factored) {
    inv_denominators_.clear();
    for (const auto& r : roots_) inv_denominators_.push_back(1.0 / (anchor_ - r));
  } else if (form_ == Form::Lagrange) {
    weights_.assign(nodes_.size(), 1.0);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (k == j) continue;
        if (nodes_[j] == nodes_[k]) throw ValidationError("polynomial", "interpolation nodes must be distinct");
        weights_[j] /= nodes_[j] - nodes_[k];
      }
    }
  }
}

std::size_t Polynomial::degree() const {
  switch (form_) {
    case Form::Dense: {
      std::size_t d = coeffs_.size() - 1;
      while (d > 0 && coeffs_[d] == Complex(0.0)) --d;
      return d;
    }
    case Form::Factored:
      return scale_ == Complex(0.0) ? 0 : std::accumulate(mult_.begin(), mult_.end(), std::size_t{0});
    case Form::Lagrange:
      return nodes_.size() - 1;
  }
  return 0;
}

namespace {

// Binary powering; much cheaper than the exp/log route for small exponents.
Complex ipow(Complex base, unsigned n) {
  Complex result = 1.0;
  while (n) {
    if (n & 1u) result *= base;
    n >>= 1u;
    if (n) base *= base;
  }
  return result;
}

}  // namespace

Complex Polynomial::operator()(Complex z) const {
  switch (form_) {
    case Form::Dense: {
      Complex acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
      return acc;
    }
    case Form::Factored: {
      if (z == anchor_) return scale_;
      Complex acc = scale_;
      for (std::size_t i = 0; i < roots_.size(); ++i) {
        const Complex f = (z - roots_[i]) * inv_denominators_[i];
        if (f == Complex(0.0)) return 0.0;
        acc *= ipow(f, mult_[i]);
      }
      return acc;
    }
    case Form::Lagrange: {
      // First barycentric form; stable away from the nodes as well.
      Complex node_poly = 1.0;
      Complex sum = 0.0;
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const Complex diff = z - nodes_[j];
        if (diff == Complex(0.0)) return values_[j];
        node_poly *= diff;
        sum += weights_[j] * values_[j] / diff;
      }
      return node_poly * sum;
    }
  }
  return 0.0;
}

Polynomial Polynomial::scaled(Complex s) const {
  Polynomial p = *this;
  for (auto& c : p.coeffs_) c *= s;
  p.scale_ *= s;
  for (auto& v : p.values_) v *= s;
  return p;
}

bool Polynomial::is_zero() const {
  switch (form_) {
    case Form::Dense:
      for (const auto& c : coeffs_) {
        if (c != Complex(0.0)) return false;
      }
      return true;
    case Form::Factored:
      return scale_ == Complex(0.0);
    case Form::Lagrange:
      for (const auto& v : values_) {
        if (v != Complex(0.0)) return false;
      }
      return true;
  }
  return true;
}

}  // namespace holointerp
