#pragma once

#include <cstddef>
#include <vector>

#include "holointerp/geometry.hpp"

namespace holointerp {

/// One-variable complex polynomial h used by shear letters.
///
/// Three exact representations are kept because the constructions need them:
/// dense coefficients, a normalised product form (exact zeros, exact anchor
/// value, stable at high degree) and Lagrange data (exact node values).
class Polynomial {
 public:
  enum class Form { Dense, Factored, Lagrange };

  Polynomial() : coeffs_{Complex(0.0)} {}

  /// sum_k c_k z^k.
  static Polynomial dense(std::vector<Complex> coefficients);
  /// scale * prod_i ((z - r_i)/(anchor - r_i))^{m_i}; equals scale at the anchor.
  static Polynomial factored(Complex scale, Complex anchor, std::vector<Complex> roots,
                             std::vector<unsigned> multiplicities);
  /// Interpolant of values at distinct nodes.
  static Polynomial lagrange(std::vector<Complex> nodes, std::vector<Complex> values);

  Form form() const { return form_; }
  std::size_t degree() const;
  Complex operator()(Complex z) const;
  /// Same representation with every value multiplied by s.
  Polynomial scaled(Complex s) const;
  bool is_zero() const;

  const std::vector<Complex>& coefficients() const { return coeffs_; }
  Complex scale() const { return scale_; }
  Complex anchor() const { return anchor_; }
  const std::vector<Complex>& roots() const { return roots_; }
  const std::vector<unsigned>& multiplicities() const { return mult_; }
  const std::vector<Complex>& nodes() const { return nodes_; }
  const std::vector<Complex>& values() const { return values_; }

 private:
  void prepare();

  Form form_ = Form::Dense;
  std::vector<Complex> coeffs_;
  Complex scale_ = 0.0;
  Complex anchor_ = 0.0;
  std::vector<Complex> roots_;
  std::vector<unsigned> mult_;
  std::vector<Complex> inv_denominators_;
  std::vector<Complex> nodes_;
  std::vector<Complex> values_;
  std::vector<Complex> weights_;
};

}  // namespace holointerp
