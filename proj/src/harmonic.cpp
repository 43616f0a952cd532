#include "spinodal/harmonic.hpp"

#include <Eigen/LU>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace spinodal {

// ---------------------------------------------------------------------------
// HomogeneousSpinorPoly
// ---------------------------------------------------------------------------

HomogeneousSpinorPoly::HomogeneousSpinorPoly(int n, int fiber_dim, int degree)
    : n_(n), degree_(degree),
      components_(static_cast<std::size_t>(fiber_dim), Poly(n)) {
  require(n >= 1, ErrorKind::invalid_dimension, "polynomial dimension must be positive");
  require(fiber_dim >= 1, ErrorKind::shape_mismatch, "fiber dimension must be positive");
  require(degree >= 0, ErrorKind::construction, "polynomial degree must be nonnegative");
}

HomogeneousSpinorPoly::HomogeneousSpinorPoly(int n, int degree,
                                             std::vector<Poly> components)
    : n_(n), degree_(degree), components_(std::move(components)) {
  check_homogeneous();
}

Poly& HomogeneousSpinorPoly::component(int c) {
  deriv_ready_ = false;
  deriv_.clear();
  lap_.clear();
  return components_.at(static_cast<std::size_t>(c));
}

void HomogeneousSpinorPoly::check_homogeneous() const {
  for (const Poly& p : components_) {
    if (p.terms().empty()) continue;
    require(p.is_homogeneous(degree_), ErrorKind::construction,
            "component is not homogeneous of the stated degree");
  }
}

void HomogeneousSpinorPoly::ensure_derivatives() const {
  if (deriv_ready_) return;
  const std::size_t N = components_.size();
  deriv_.assign(N, std::vector<Poly>(static_cast<std::size_t>(n_)));
  lap_.assign(N, Poly());
  for (std::size_t c = 0; c < N; ++c) {
    for (int a = 0; a < n_; ++a) {
      deriv_[c][static_cast<std::size_t>(a)] = components_[c].derivative(a);
    }
    lap_[c] = components_[c].laplacian();
  }
  deriv_ready_ = true;
}

CVector HomogeneousSpinorPoly::eval(const RVector& x) const {
  const int N = fiber_dim();
  CVector v(N);
  for (int c = 0; c < N; ++c) v[c] = components_[static_cast<std::size_t>(c)].eval(x);
  return v;
}

Matrix HomogeneousSpinorPoly::grad(const RVector& x) const {
  ensure_derivatives();
  const int N = fiber_dim();
  Matrix g(N, n_);
  for (int c = 0; c < N; ++c) {
    for (int a = 0; a < n_; ++a) {
      g(c, a) = deriv_[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)].eval(x);
    }
  }
  return g;
}

CVector HomogeneousSpinorPoly::laplacian_eval(const RVector& x) const {
  ensure_derivatives();
  const int N = fiber_dim();
  CVector v(N);
  for (int c = 0; c < N; ++c) v[c] = lap_[static_cast<std::size_t>(c)].eval(x);
  return v;
}

double HomogeneousSpinorPoly::max_abs_coeff() const {
  double best = 0.0;
  for (const Poly& p : components_) best = std::max(best, p.max_abs_coeff());
  return best;
}

bool HomogeneousSpinorPoly::is_zero() const { return max_abs_coeff() == 0.0; }

double HomogeneousSpinorPoly::harmonic_residual() const {
  double best = 0.0;
  for (const Poly& p : components_) best = std::max(best, p.laplacian().max_abs_coeff());
  return best;
}

double HomogeneousSpinorPoly::dirac_residual(const CliffordRep& rep) const {
  return dirac_apply_poly(rep, *this).max_abs_coeff();
}

HomogeneousSpinorPoly HomogeneousSpinorPoly::scaled(cplx factor) const {
  std::vector<Poly> comps;
  comps.reserve(components_.size());
  for (const Poly& p : components_) comps.push_back(p * factor);
  HomogeneousSpinorPoly out;
  out.n_ = n_;
  out.degree_ = degree_;
  out.components_ = std::move(comps);
  return out;
}

HomogeneousSpinorPoly HomogeneousSpinorPoly::plus(
    const HomogeneousSpinorPoly& other) const {
  require(n_ == other.n_ && fiber_dim() == other.fiber_dim() &&
              degree_ == other.degree_,
          ErrorKind::shape_mismatch, "cannot add mismatched spinor polynomials");
  std::vector<Poly> comps;
  comps.reserve(components_.size());
  for (std::size_t c = 0; c < components_.size(); ++c) {
    comps.push_back(components_[c] + other.components_[c]);
  }
  HomogeneousSpinorPoly out;
  out.n_ = n_;
  out.degree_ = degree_;
  out.components_ = std::move(comps);
  return out;
}

HomogeneousSpinorPoly dirac_apply_poly(const CliffordRep& rep,
                                       const HomogeneousSpinorPoly& p) {
  require(p.n() == rep.n && p.fiber_dim() == rep.fiber_dim,
          ErrorKind::shape_mismatch, "polynomial shape does not match representation");
  const int N = rep.fiber_dim;
  std::vector<Poly> out(static_cast<std::size_t>(N), Poly(rep.n));
  for (int j = 0; j < rep.n; ++j) {
    const Matrix& g = rep.gammas[static_cast<std::size_t>(j)];
    for (int d = 0; d < N; ++d) {
      const Poly dp = p.component(d).derivative(j);
      if (dp.empty()) continue;
      for (int c = 0; c < N; ++c) {
        const cplx coeff = g(c, d);
        if (coeff == cplx(0.0, 0.0)) continue;
        out[static_cast<std::size_t>(c)] =
            out[static_cast<std::size_t>(c)] + dp * coeff;
      }
    }
  }
  const int deg = std::max(p.degree() - 1, 0);
  HomogeneousSpinorPoly result(rep.n, N, deg);
  for (int c = 0; c < N; ++c) result.component(c) = out[static_cast<std::size_t>(c)];
  result.check_homogeneous();
  return result;
}

// ---------------------------------------------------------------------------
// Harmonic bases
// ---------------------------------------------------------------------------

namespace {

std::int64_t binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < b; ++i) {
    r = r * (a - i) / (i + 1);
  }
  return r;
}

}  // namespace

int harmonic_space_dim(int n, int k) {
  require(n >= 1 && k >= 0, ErrorKind::invalid_dimension, "bad harmonic space parameters");
  return static_cast<int>(binomial(n + k - 1, k) - binomial(n + k - 3, k - 2));
}

double monomial_sphere_integral(int n, const MultiIndex& alpha) {
  require(static_cast<int>(alpha.size()) == n, ErrorKind::shape_mismatch,
          "multi-index length does not match dimension");
  int total = 0;
  for (int a : alpha) {
    require(a >= 0, ErrorKind::construction, "negative exponent");
    if (a % 2 == 1) return 0.0;
    total += a;
  }
  double log_num = 0.0;
  for (int a : alpha) log_num += std::lgamma(0.5 * (a + 1));
  const double log_den = std::lgamma(0.5 * (total + n));
  return 2.0 * std::exp(log_num - log_den);
}

namespace {

/// Gram matrix of the given monomials in L2 of the unit sphere.
Eigen::MatrixXd monomial_gram(int n, const std::vector<MultiIndex>& mons) {
  const int P = static_cast<int>(mons.size());
  Eigen::MatrixXd G(P, P);
  for (int i = 0; i < P; ++i) {
    for (int j = i; j < P; ++j) {
      MultiIndex sum(mons[static_cast<std::size_t>(i)]);
      for (std::size_t a = 0; a < sum.size(); ++a) {
        sum[a] += mons[static_cast<std::size_t>(j)][a];
      }
      G(i, j) = G(j, i) = monomial_sphere_integral(n, sum);
    }
  }
  return G;
}

/// Modified Gram-Schmidt for complex coefficient vectors under the Hermitian
/// form induced by a block-diagonal repetition of the real Gram matrix G.
/// vectors: columns are coefficient stacks of length blocks*P.
void gram_schmidt_blocks(const Eigen::MatrixXd& G, int blocks, Matrix& vectors) {
  const int P = static_cast<int>(G.rows());
  const Matrix Gc = G.cast<cplx>();
  const auto inner = [&](const Eigen::VectorXcd& a,
                         const Eigen::VectorXcd& b) -> cplx {
    cplx acc = 0.0;
    for (int blk = 0; blk < blocks; ++blk) {
      const Eigen::VectorXcd pa = a.segment(blk * P, P);
      const Eigen::VectorXcd pb = b.segment(blk * P, P);
      acc += pb.dot(Gc * pa);
    }
    return acc;
  };
  for (int i = 0; i < vectors.cols(); ++i) {
    Eigen::VectorXcd v = vectors.col(i);
    const double initial = std::sqrt(std::max(0.0, inner(v, v).real()));
    for (int rep = 0; rep < 2; ++rep) {
      for (int j = 0; j < i; ++j) {
        const Eigen::VectorXcd e = vectors.col(j);
        v -= inner(v, e) * e;
      }
    }
    const double norm = std::sqrt(std::max(0.0, inner(v, v).real()));
    require(norm > 1e-10 * std::max(initial, 1.0), ErrorKind::ill_conditioned,
            "orthonormalization collapsed; kernel basis is degenerate");
    vectors.col(i) = v / norm;
  }
}

}  // namespace

std::vector<Poly> scalar_harmonic_basis(int n, int k) {
  require(n >= 2, ErrorKind::invalid_dimension,
          "harmonic basis needs at least two variables");
  require(k >= 0, ErrorKind::construction, "degree must be nonnegative");
  const std::vector<MultiIndex> mons = monomials_of_degree(n, k);
  const int P = static_cast<int>(mons.size());
  const int expected = harmonic_space_dim(n, k);

  Eigen::MatrixXd kernel;  // columns = harmonic coefficient vectors
  if (k < 2) {
    kernel = Eigen::MatrixXd::Identity(P, P);
  } else if (k <= 4) {
    // Exact rational kernel of the Laplacian restricted to degree-k monomials.
    const std::vector<MultiIndex> rows = monomials_of_degree(n, k - 2);
    std::vector<std::vector<Rational>> M(
        rows.size(), std::vector<Rational>(static_cast<std::size_t>(P)));
    for (int j = 0; j < P; ++j) {
      const MultiIndex& alpha = mons[static_cast<std::size_t>(j)];
      for (int a = 0; a < n; ++a) {
        if (alpha[static_cast<std::size_t>(a)] < 2) continue;
        MultiIndex beta = alpha;
        beta[static_cast<std::size_t>(a)] -= 2;
        const auto it = std::find(rows.begin(), rows.end(), beta);
        const std::size_t r = static_cast<std::size_t>(it - rows.begin());
        const long long c = static_cast<long long>(alpha[static_cast<std::size_t>(a)]) *
                            (alpha[static_cast<std::size_t>(a)] - 1);
        M[r][static_cast<std::size_t>(j)] =
            M[r][static_cast<std::size_t>(j)] + Rational(c);
      }
    }
    const std::vector<std::vector<Rational>> basis = rational_nullspace(M, P);
    kernel.resize(P, static_cast<int>(basis.size()));
    for (std::size_t b = 0; b < basis.size(); ++b) {
      for (int j = 0; j < P; ++j) {
        kernel(j, static_cast<int>(b)) = basis[b][static_cast<std::size_t>(j)].to_double();
      }
    }
  } else {
    const std::vector<MultiIndex> rows = monomials_of_degree(n, k - 2);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), P);
    for (int j = 0; j < P; ++j) {
      const MultiIndex& alpha = mons[static_cast<std::size_t>(j)];
      for (int a = 0; a < n; ++a) {
        if (alpha[static_cast<std::size_t>(a)] < 2) continue;
        MultiIndex beta = alpha;
        beta[static_cast<std::size_t>(a)] -= 2;
        const auto it = std::find(rows.begin(), rows.end(), beta);
        M(static_cast<int>(it - rows.begin()), j) +=
            static_cast<double>(alpha[static_cast<std::size_t>(a)]) *
            (alpha[static_cast<std::size_t>(a)] - 1);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    kernel = lu.kernel();
  }
  require(static_cast<int>(kernel.cols()) == expected, ErrorKind::construction,
          "harmonic kernel dimension mismatch");

  const Eigen::MatrixXd G = monomial_gram(n, mons);
  Matrix vectors = kernel.cast<cplx>();
  gram_schmidt_blocks(G, 1, vectors);

  std::vector<Poly> basis;
  basis.reserve(static_cast<std::size_t>(expected));
  for (int b = 0; b < vectors.cols(); ++b) {
    Poly p(n);
    for (int j = 0; j < P; ++j) {
      p.add_term(mons[static_cast<std::size_t>(j)], vectors(j, b));
    }
    basis.push_back(p.pruned(1e-14 * p.max_abs_coeff()));
  }
  return basis;
}

std::vector<HomogeneousSpinorPoly> dirac_harmonic_basis(const CliffordRep& rep,
                                                        int k) {
  require(k >= 0, ErrorKind::construction, "degree must be nonnegative");
  const int n = rep.n;
  const int N = rep.fiber_dim;
  const std::vector<MultiIndex> mons = monomials_of_degree(n, k);
  const int P = static_cast<int>(mons.size());

  Matrix kernel;
  if (k == 0) {
    kernel = Matrix::Identity(N, N);
  } else {
    const std::vector<MultiIndex> rows = monomials_of_degree(n, k - 1);
    const int Q = static_cast<int>(rows.size());
    // Column (j, c) = monomial j tensor fiber c; row (r, d) likewise.
    Matrix M = Matrix::Zero(Q * N, P * N);
    for (int j = 0; j < P; ++j) {
      const MultiIndex& alpha = mons[static_cast<std::size_t>(j)];
      for (int a = 0; a < n; ++a) {
        if (alpha[static_cast<std::size_t>(a)] < 1) continue;
        MultiIndex beta = alpha;
        beta[static_cast<std::size_t>(a)] -= 1;
        const auto it = std::find(rows.begin(), rows.end(), beta);
        const int r = static_cast<int>(it - rows.begin());
        const double factor = alpha[static_cast<std::size_t>(a)];
        const Matrix& g = rep.gammas[static_cast<std::size_t>(a)];
        for (int c = 0; c < N; ++c) {
          for (int d = 0; d < N; ++d) {
            M(r * N + d, j * N + c) += factor * g(d, c);
          }
        }
      }
    }
    Eigen::FullPivLU<Matrix> lu(M);
    lu.setThreshold(1e-10);
    kernel = lu.kernel();
  }

  // Reorder the stacked coefficients into fiber blocks for Gram-Schmidt.
  const int dim = static_cast<int>(kernel.cols());
  require(dim >= 1, ErrorKind::construction, "kernel is empty");
  Matrix stacked(P * N, dim);
  for (int b = 0; b < dim; ++b) {
    for (int j = 0; j < P; ++j) {
      for (int c = 0; c < N; ++c) {
        stacked(c * P + j, b) = k == 0 ? kernel(c, b) : kernel(j * N + c, b);
      }
    }
  }
  const Eigen::MatrixXd G = monomial_gram(n, mons);
  gram_schmidt_blocks(G, N, stacked);

  std::vector<HomogeneousSpinorPoly> basis;
  basis.reserve(static_cast<std::size_t>(dim));
  for (int b = 0; b < dim; ++b) {
    HomogeneousSpinorPoly hp(n, N, k);
    for (int c = 0; c < N; ++c) {
      Poly p(n);
      for (int j = 0; j < P; ++j) {
        p.add_term(mons[static_cast<std::size_t>(j)], stacked(c * P + j, b));
      }
      hp.component(c) = p.pruned(1e-14 * std::max(p.max_abs_coeff(), 1.0));
    }
    const double scale = hp.max_abs_coeff();
    require(hp.dirac_residual(rep) <= 1e-10 * std::max(scale, 1.0),
            ErrorKind::construction, "kernel element fails the operator check");
    basis.push_back(std::move(hp));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Leading-term recovery
// ---------------------------------------------------------------------------

LeadingTermFit fit_leading_term(const SpinorField& field, const RVector& center,
                                int k, double r_min, double r_max, int shells) {
  const GridSpec& grid = field.grid();
  const CliffordRep& rep = field.rep();
  const int n = grid.n;
  const int N = rep.fiber_dim;
  require(k >= 0, ErrorKind::construction, "degree must be nonnegative");
  require(shells >= 2, ErrorKind::resolution, "need at least two shells");
  require(r_min > 0.0 && r_min < r_max, ErrorKind::domain, "bad shell radius range");

  // Precheck: mean field size on the extreme shells must scale like r^k.
  const auto shell_mean = [&](double r) {
    const SphereSamples s = sphere_trace(field, center, r);
    std::vector<double> num(s.psi.size()), den(s.psi.size());
    for (std::size_t i = 0; i < s.psi.size(); ++i) {
      num[i] = s.weights[i] * s.psi[i].squaredNorm();
      den[i] = s.weights[i];
    }
    return std::sqrt(pairwise_sum(num) / pairwise_sum(den));
  };
  const double m_lo = shell_mean(r_min);
  const double m_hi = shell_mean(r_max);
  require(m_lo > 0.0 && m_hi > 0.0, ErrorKind::degenerate_field,
          "field vanishes identically on the sampling shells");
  const double slope = std::log(m_hi / m_lo) / std::log(r_max / r_min);
  require(std::abs(slope - k) <= 0.2, ErrorKind::wrong_order,
          "field does not vanish to the requested order at the center");

  // Components of an admissible leading term are scalar harmonics, so the
  // fit runs in the harmonic basis: radial contamination (which is constant
  // on each sphere) is orthogonal to every basis element of degree >= 1.
  const std::vector<Poly> basis = scalar_harmonic_basis(n, k);
  const int P = static_cast<int>(basis.size());
  const SphereRule& rule = field.sphere_rule();
  const int m = static_cast<int>(rule.nodes.size());
  require(m >= 2 * P, ErrorKind::ill_conditioned,
          "sphere rule too sparse for the requested degree");

  // Basis values on the direction set. The basis is complex-coefficient in
  // general, but scalar_harmonic_basis returns real coefficients; evaluate
  // as complex and keep the real design matrix.
  Eigen::MatrixXd mv(m, P);
  for (int i = 0; i < m; ++i) {
    const RVector& d = rule.nodes[static_cast<std::size_t>(i)];
    for (int j = 0; j < P; ++j) {
      mv(i, j) = basis[static_cast<std::size_t>(j)].eval(d).real();
    }
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(P, P);
  for (int i = 0; i < m; ++i) {
    G += rule.weights[static_cast<std::size_t>(i)] *
         (mv.row(i).transpose() * mv.row(i));
  }
  G *= static_cast<double>(shells);

  Matrix rhs = Matrix::Zero(P, N);
  std::vector<std::vector<CVector>> samples(
      static_cast<std::size_t>(shells));  // for the residual pass
  std::vector<double> radii(static_cast<std::size_t>(shells));
  for (int t = 0; t < shells; ++t) {
    const double r = r_min + (r_max - r_min) * t / (shells - 1);
    radii[static_cast<std::size_t>(t)] = r;
    const double rk = std::pow(r, -k);
    SphereSamples s = sphere_trace(field, center, r);
    samples[static_cast<std::size_t>(t)] = s.psi;
    for (int i = 0; i < m; ++i) {
      const double w = rule.weights[static_cast<std::size_t>(i)];
      for (int j = 0; j < P; ++j) {
        rhs.row(j) += w * rk * mv(i, j) * s.psi[static_cast<std::size_t>(i)].transpose();
      }
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> solver(G);
  require(solver.info() == Eigen::Success, ErrorKind::ill_conditioned,
          "normal equations are not positive definite");
  Matrix coeffs(P, N);
  for (int c = 0; c < N; ++c) {
    const Eigen::VectorXd re = solver.solve(rhs.col(c).real().eval());
    const Eigen::VectorXd im = solver.solve(rhs.col(c).imag().eval());
    coeffs.col(c) = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
  }

  HomogeneousSpinorPoly poly(n, N, k);
  for (int c = 0; c < N; ++c) {
    Poly p(n);
    for (int j = 0; j < P; ++j) {
      p = p + basis[static_cast<std::size_t>(j)] * coeffs(j, c);
    }
    poly.component(c) = p.pruned(1e-13 * std::max(p.max_abs_coeff(), 1e-300));
  }

  // Residual over all sampled shells.
  std::vector<double> err2, tot2;
  for (int t = 0; t < shells; ++t) {
    const double r = radii[static_cast<std::size_t>(t)];
    for (int i = 0; i < m; ++i) {
      const RVector x = r * rule.nodes[static_cast<std::size_t>(i)];
      const CVector pv = poly.eval(x);
      const CVector& fv = samples[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      const double w = rule.weights[static_cast<std::size_t>(i)];
      err2.push_back(w * (fv - pv).squaredNorm());
      tot2.push_back(w * fv.squaredNorm());
    }
  }
  const double tot = pairwise_sum(tot2);
  LeadingTermFit out;
  out.poly = std::move(poly);
  out.rel_residual = tot > 0.0 ? std::sqrt(pairwise_sum(err2) / tot) : 0.0;
  out.slope_estimate = slope;
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial serialization
// ---------------------------------------------------------------------------

namespace {

std::string multi_index_key(const MultiIndex& alpha) {
  std::string key;
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (a) key += ' ';
    key += std::to_string(alpha[a]);
  }
  return key;
}

MultiIndex parse_multi_index_key(const std::string& key, int n) {
  std::stringstream ss(key);
  MultiIndex alpha(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    require(static_cast<bool>(ss >> alpha[static_cast<std::size_t>(a)]), ErrorKind::io,
            "bad multi-index key: " + key);
  }
  return alpha;
}

}  // namespace

void save_spinor_poly(const HomogeneousSpinorPoly& poly, const std::string& path) {
  nlohmann::json j;
  j["format"] = "spinodal-poly v1";
  j["n"] = poly.n();
  j["fiber"] = poly.fiber_dim();
  j["degree"] = poly.degree();
  nlohmann::json comps = nlohmann::json::array();
  for (int c = 0; c < poly.fiber_dim(); ++c) {
    nlohmann::json entry = nlohmann::json::object();
    for (const auto& [alpha, coeff] : poly.component(c).terms()) {
      entry[multi_index_key(alpha)] = {coeff.real(), coeff.imag()};
    }
    comps.push_back(entry);
  }
  j["components"] = comps;
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  require(out.good(), ErrorKind::io, "write to " + path + " failed");
}

HomogeneousSpinorPoly load_spinor_poly(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorKind::io, std::string("bad polynomial file: ") + e.what());
  }
  require(j.value("format", "") == std::string("spinodal-poly v1"), ErrorKind::io,
          "not a spinodal polynomial file: " + path);
  const int n = j.at("n").get<int>();
  const int N = j.at("fiber").get<int>();
  const int k = j.at("degree").get<int>();
  HomogeneousSpinorPoly poly(n, N, k);
  const auto& comps = j.at("components");
  require(static_cast<int>(comps.size()) == N, ErrorKind::io,
          "component count mismatch in " + path);
  for (int c = 0; c < N; ++c) {
    Poly p(n);
    for (const auto& [key, value] : comps.at(static_cast<std::size_t>(c)).items()) {
      const MultiIndex alpha = parse_multi_index_key(key, n);
      p.add_term(alpha, cplx(value.at(0).get<double>(), value.at(1).get<double>()));
    }
    poly.component(c) = p;
  }
  poly.check_homogeneous();
  return poly;
}

}  // namespace spinodal
