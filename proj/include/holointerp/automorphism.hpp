#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "holointerp/geometry.hpp"
#include "holointerp/polynomial.hpp"

namespace holointerp {

/// Coordinates whose modulus exceeds this mark an escaping orbit.
inline constexpr double kEscapeThreshold = 1e100;

enum class LetterKind { Shear, Overshear, AffineUnitary };

std::string to_string(LetterKind k);

/// One elementary automorphism with an exact inverse.
///
/// With u_j the columns of the unitary frame and l(z) = <z, u_c> = u_c^H z:
///   Shear:         z -> z + u_d h(l(z))
///   Overshear:     z -> z + u_d (exp(h(l(z))) - 1) <z, u_d>
///   AffineUnitary: z -> U z + t
struct ElementaryAut {
  LetterKind kind = LetterKind::Shear;
  CMatrix frame;  // the frame for shears, U for affine letters
  std::size_t direction = 0;
  std::size_t functional = 1;
  Polynomial h;
  CPoint translation;

  static ElementaryAut shear(CMatrix frame, std::size_t direction, std::size_t functional, Polynomial h);
  static ElementaryAut overshear(CMatrix frame, std::size_t direction, std::size_t functional, Polynomial h);
  static ElementaryAut affine_unitary(CMatrix u, CPoint translation);

  std::size_t dimension() const { return static_cast<std::size_t>(frame.rows()); }
  CPoint apply(const CPoint& z) const;
  CPoint apply_inverse(const CPoint& w) const;
  /// The letter whose apply() is this letter's apply_inverse().
  ElementaryAut inverse() const;
  /// Complex Jacobian determinant is identically one. Decided from the letter
  /// structure: det = 1 + h'(l) <u_d, u_c> for shears.
  bool volume_preserving() const;
};

/// Letter index range [begin, end) of one stage map.
struct StageRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Composition word; letters apply in order, first letter first.
struct AutWord {
  std::size_t dimension = 0;
  std::vector<ElementaryAut> letters;
  std::vector<StageRange> stages;
  /// Ball radii used while building the word (empty for plain words).
  std::vector<double> schedule;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  /// Append a letter, checking its dimension.
  void push(ElementaryAut letter);
  /// Letters of this then other; stages of other are shifted.
  AutWord then(const AutWord& other) const;
  /// Formal inverse word.
  AutWord inverse() const;
  /// Sub-word of the letters in [begin, end).
  AutWord slice(std::size_t begin, std::size_t end) const;
};

AutWord identity_word(std::size_t dimension);

CPoint eval(const AutWord& word, const CPoint& z);
CPoint eval_inverse(const AutWord& word, const CPoint& w);

/// max over sample_grid(set, density) of |word(z) - reference(z)|; reference
/// null means the identity. A grid estimate, not a rigorous bound.
double sup_deviation(const AutWord& word, const AutWord* reference, const CertifiedCompact& set, double density);

/// Unitary frames: the standard one first, then `count` random ones from the
/// seed (QR of a complex Gaussian matrix).
std::vector<CMatrix> frame_pool(std::size_t dimension, std::size_t count, std::uint64_t seed);

/// Word file (JSON). Round trip is bit exact.
std::string word_to_json(const AutWord& word);
AutWord word_from_json(const std::string& text);

}  // namespace holointerp
