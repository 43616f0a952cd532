#pragma once

#include <map>
#include <vector>

#include "spinodal/common.hpp"

namespace spinodal {

/// Exponent tuple of a monomial x^a = x_1^{a_1}...x_n^{a_n}.
using MultiIndex = std::vector<int>;

int multi_index_degree(const MultiIndex& a);
double multi_index_factorial(const MultiIndex& a);

/// All multi-indices of exact degree k in n variables, lexicographic order
/// (deterministic; first index varies slowest).
std::vector<MultiIndex> monomials_of_degree(int n, int k);

// ============================================================================
// Multi-variable polynomials with complex coefficients
// ============================================================================

/// Sparse polynomial in n real variables with complex coefficients. Immutable
/// algebra (operations return new values); term order is the lexicographic
/// multi-index order, so serialization and iteration are deterministic.
class Poly {
 public:
  explicit Poly(int nvars = 0) : nvars_(nvars) {}

  static Poly monomial(int nvars, const MultiIndex& a, cplx c);
  static Poly constant(int nvars, cplx c);

  int nvars() const { return nvars_; }
  bool empty() const { return terms_.empty(); }
  const std::map<MultiIndex, cplx>& terms() const { return terms_; }

  void add_term(const MultiIndex& a, cplx c);

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(cplx c) const;
  Poly mul(const Poly& o) const;

  Poly derivative(int axis) const;
  Poly laplacian() const;

  cplx eval(const RVector& x) const;

  /// Max total degree among terms (-1 for the zero polynomial).
  int degree() const;
  /// True if every term has total degree exactly k.
  bool is_homogeneous(int k) const;
  double max_abs_coeff() const;
  /// Copy with terms of magnitude <= tol removed.
  Poly pruned(double tol) const;

 private:
  int nvars_;
  std::map<MultiIndex, cplx> terms_;
  // Flattened term list cached for evaluation hot paths.
  mutable std::vector<std::pair<MultiIndex, cplx>> flat_;
  mutable bool flat_valid_ = false;
};

// ============================================================================
// Exact rational arithmetic (small scale)
// ============================================================================

/// Rational number on int64 with gcd normalization; intermediates widened to
/// 128 bits. Large enough for the low-degree integer elimination this project
/// needs; overflow raises an error rather than wrapping.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n);  // NOLINT(google-explicit-constructor)
  Rational(long long n, long long d);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / den; }
};

/// Basis of the right null space of an exact rational matrix, via fraction-free
/// reduced row echelon form. Rows may be fewer than columns; the basis vectors
/// are returned as rational column vectors in a deterministic order.
std::vector<std::vector<Rational>> rational_nullspace(
    const std::vector<std::vector<Rational>>& matrix, int cols);

}  // namespace spinodal
