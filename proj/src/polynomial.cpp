#include "spinodal/polynomial.hpp"

#include <functional>
#include <numeric>

namespace spinodal {

int multi_index_degree(const MultiIndex& a) {
  int d = 0;
  for (int e : a) d += e;
  return d;
}

double multi_index_factorial(const MultiIndex& a) {
  double f = 1.0;
  for (int e : a)
    for (int j = 2; j <= e; ++j) f *= j;
  return f;
}

std::vector<MultiIndex> monomials_of_degree(int n, int k) {
  require(n >= 1 && k >= 0, ErrorKind::invalid_dimension,
          "monomials_of_degree: need n >= 1, k >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur(n, 0);
  // Recursive lexicographic enumeration, first variable slowest.
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e);
    }
  };
  rec(0, k);
  return out;
}

// ============================================================================
// Poly
// ============================================================================

Poly Poly::monomial(int nvars, const MultiIndex& a, cplx c) {
  Poly p(nvars);
  p.add_term(a, c);
  return p;
}

Poly Poly::constant(int nvars, cplx c) {
  return monomial(nvars, MultiIndex(nvars, 0), c);
}

void Poly::add_term(const MultiIndex& a, cplx c) {
  require(static_cast<int>(a.size()) == nvars_, ErrorKind::shape_mismatch,
          "Poly::add_term: multi-index arity mismatch");
  flat_valid_ = false;
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    if (c != cplx(0.0, 0.0)) terms_.emplace(a, c);
  } else {
    it->second += c;
    if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& o) const {
  require(nvars_ == o.nvars_, ErrorKind::shape_mismatch, "Poly: arity mismatch");
  Poly r = *this;
  r.flat_valid_ = false;
  for (const auto& [a, c] : o.terms_) r.add_term(a, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o * cplx(-1.0, 0.0); }

Poly Poly::operator*(cplx c) const {
  Poly r(nvars_);
  if (c == cplx(0.0, 0.0)) return r;
  for (const auto& [a, v] : terms_) r.terms_.emplace(a, v * c);
  return r;
}

Poly Poly::mul(const Poly& o) const {
  require(nvars_ == o.nvars_, ErrorKind::shape_mismatch, "Poly: arity mismatch");
  Poly r(nvars_);
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : o.terms_) {
      MultiIndex s(nvars_);
      for (int i = 0; i < nvars_; ++i) s[i] = a[i] + b[i];
      r.add_term(s, ca * cb);
    }
  }
  return r;
}

Poly Poly::derivative(int axis) const {
  require(axis >= 0 && axis < nvars_, ErrorKind::shape_mismatch,
          "Poly::derivative: axis out of range");
  Poly r(nvars_);
  for (const auto& [a, c] : terms_) {
    if (a[axis] == 0) continue;
    MultiIndex b = a;
    b[axis] -= 1;
    r.add_term(b, c * static_cast<double>(a[axis]));
  }
  return r;
}

Poly Poly::laplacian() const {
  Poly r(nvars_);
  for (int i = 0; i < nvars_; ++i) r = r + derivative(i).derivative(i);
  return r;
}

cplx Poly::eval(const RVector& x) const {
  require(x.size() == nvars_, ErrorKind::shape_mismatch, "Poly::eval: arity");
  if (!flat_valid_) {
    flat_.assign(terms_.begin(), terms_.end());
    flat_valid_ = true;
  }
  // Power table: powers[i][p] = x_i^p.
  int maxdeg = 0;
  for (const auto& [a, c] : flat_)
    for (int e : a) maxdeg = std::max(maxdeg, e);
  require(nvars_ <= 16 && maxdeg <= 23, ErrorKind::resolution,
          "Poly::eval: arity/degree beyond the fast-path table");
  double powers[16][24];
  for (int i = 0; i < nvars_; ++i) {
    powers[i][0] = 1.0;
    for (int p = 1; p <= maxdeg; ++p) powers[i][p] = powers[i][p - 1] * x[i];
  }
  cplx acc(0.0, 0.0);
  for (const auto& [a, c] : flat_) {
    double m = 1.0;
    for (int i = 0; i < nvars_; ++i) m *= powers[i][a[i]];
    acc += c * m;
  }
  return acc;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [a, c] : terms_) d = std::max(d, multi_index_degree(a));
  return d;
}

bool Poly::is_homogeneous(int k) const {
  for (const auto& [a, c] : terms_)
    if (multi_index_degree(a) != k) return false;
  return true;
}

double Poly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Poly Poly::pruned(double tol) const {
  Poly r(nvars_);
  for (const auto& [a, c] : terms_)
    if (std::abs(c) > tol) r.terms_.emplace(a, c);
  return r;
}

// ============================================================================
// Rational arithmetic and exact null spaces
// ============================================================================

namespace {

long long safe_narrow(__int128 v) {
  require(v <= INT64_MAX && v >= INT64_MIN, ErrorKind::resolution,
          "Rational: 64-bit overflow (problem too large for exact mode)");
  return static_cast<long long>(v);
}

}  // namespace

Rational::Rational(long long n) : num(n), den(1) {}

Rational::Rational(long long n, long long d) {
  require(d != 0, ErrorKind::singularity, "Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long long g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

Rational Rational::operator+(const Rational& o) const {
  const __int128 n = static_cast<__int128>(num) * o.den +
                     static_cast<__int128>(o.num) * den;
  const __int128 d = static_cast<__int128>(den) * o.den;
  // Reduce in 128 bits before narrowing.
  __int128 a = n < 0 ? -n : n, b = d;
  while (b) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  return {safe_narrow(n / a), safe_narrow(d / a)};
}

Rational Rational::operator-(const Rational& o) const {
  return *this + Rational(-o.num, o.den);
}

Rational Rational::operator*(const Rational& o) const {
  const Rational x(num, o.den), y(o.num, den);  // cross-reduce first
  return {safe_narrow(static_cast<__int128>(x.num) * y.num),
          safe_narrow(static_cast<__int128>(x.den) * y.den)};
}

Rational Rational::operator/(const Rational& o) const {
  require(o.num != 0, ErrorKind::singularity, "Rational: division by zero");
  return *this * Rational(o.den, o.num);
}

std::vector<std::vector<Rational>> rational_nullspace(
    const std::vector<std::vector<Rational>>& matrix, int cols) {
  std::vector<std::vector<Rational>> m = matrix;
  const int rows = static_cast<int>(m.size());
  for (auto& r : m)
    require(static_cast<int>(r.size()) == cols, ErrorKind::shape_mismatch,
            "rational_nullspace: ragged matrix");

  std::vector<int> pivot_col_of_row(rows, -1);
  std::vector<bool> col_is_pivot(cols, false);
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = -1;
    for (int r = row; r < rows; ++r)
      if (!m[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[row], m[piv]);
    const Rational inv = Rational(1) / m[row][col];
    for (int c = col; c < cols; ++c) m[row][c] = m[row][c] * inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      const Rational f = m[r][col];
      for (int c = col; c < cols; ++c)
        m[r][c] = m[r][c] - f * m[row][c];
    }
    pivot_col_of_row[row] = col;
    col_is_pivot[col] = true;
    ++row;
  }

  std::vector<std::vector<Rational>> basis;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (col_is_pivot[free_col]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free_col] = Rational(1);
    for (int r = 0; r < row; ++r) {
      const int pc = pivot_col_of_row[r];
      if (pc >= 0) v[pc] = Rational(0) - m[r][free_col];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace spinodal
