#include "spinodal/corpus.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <utility>

#include "spinodal/harmonic.hpp"
#include "spinodal/nodal.hpp"

namespace spinodal {
namespace {

// Seed-stream tags so the per-entry draws stay decoupled: adding an entry or
// reordering draws inside one builder never shifts the parameters of another.
constexpr std::uint64_t kTagMix = 0x6d69780000000001ULL;
constexpr std::uint64_t kTagWave = 0x7761766500000002ULL;
constexpr std::uint64_t kTagPlanted = 0x706c616e00000003ULL;
constexpr std::uint64_t kTagBubble = 0x6275620000000004ULL;
constexpr std::uint64_t kTagSmooth = 0x736d6f6f00000005ULL;

}  // namespace

RVector random_unit_vector(int n, Rng* rng) {
  require(n >= 1, ErrorKind::invalid_dimension, "unit vector needs n >= 1");
  RVector v(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) v(i) = rng->normal();
    norm = v.norm();
  } while (norm < 1.0e-8);
  return v / norm;
}

CVector random_unit_spinor(int dim, Rng* rng) {
  require(dim >= 1, ErrorKind::invalid_dimension, "unit spinor needs dim >= 1");
  CVector v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v(i) = cplx(rng->normal(), rng->normal());
    norm = v.norm();
  } while (norm < 1.0e-8);
  return v / norm;
}

CVector isotropic_kernel_vector(const CliffordRep& rep) {
  require(rep.n >= 2, ErrorKind::invalid_dimension,
          "isotropic kernel vector needs n >= 2");
  // gamma(e1 + i e2) squares to zero because e1 + i e2 is isotropic, so the
  // matrix is nilpotent and its kernel has dimension >= fiber_dim / 2.
  const Matrix a = rep.gammas[0] + cplx(0.0, 1.0) * rep.gammas[1];
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1.0e-10);
  const Matrix kernel = lu.kernel();
  require(kernel.cols() >= 1 && kernel.col(0).norm() > 1.0e-12,
          ErrorKind::construction, "isotropic symbol kernel came out empty");
  CVector u = kernel.col(0);
  u /= u.norm();
  // Phase-fix on the largest entry so the choice is unique.
  int pivot = 0;
  for (int c = 1; c < u.size(); ++c) {
    if (std::abs(u(c)) > std::abs(u(pivot))) pivot = c;
  }
  u *= std::conj(u(pivot)) / std::abs(u(pivot));
  require((a * u).norm() <= 1.0e-12, ErrorKind::construction,
          "isotropic kernel vector fails the symbol equation");
  return u;
}

HomogeneousSpinorPoly planar_power(const CliffordRep& rep, int k) {
  require(k >= 1, ErrorKind::domain, "planar power needs degree >= 1");
  const CVector u = isotropic_kernel_vector(rep);
  // Expand (x1 + i x2)^k once; each component is u_c times this polynomial.
  Poly zk(rep.n);
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    MultiIndex a(static_cast<std::size_t>(rep.n), 0);
    a[0] = k - j;
    a[1] = j;
    zk.add_term(a, binom * std::pow(cplx(0.0, 1.0), j));
    binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
  }
  std::vector<Poly> comps;
  comps.reserve(static_cast<std::size_t>(rep.fiber_dim));
  for (int c = 0; c < rep.fiber_dim; ++c) comps.push_back(zk * u(c));
  HomogeneousSpinorPoly poly(rep.n, k, std::move(comps));
  require(poly.dirac_residual(rep) <= 1.0e-12, ErrorKind::construction,
          "planar power is not Dirac-harmonic");
  return poly;
}

HomogeneousSpinorPoly random_harmonic_mix(const CliffordRep& rep, int degree,
                                          Rng* rng) {
  const auto basis = dirac_harmonic_basis(rep, degree);
  require(!basis.empty(), ErrorKind::construction,
          "empty Dirac-harmonic basis");
  HomogeneousSpinorPoly mix = basis[0].scaled(cplx(rng->normal(), rng->normal()));
  for (std::size_t i = 1; i < basis.size(); ++i) {
    mix = mix.plus(basis[i].scaled(cplx(rng->normal(), rng->normal())));
  }
  if (mix.is_zero()) return basis[0];
  return mix.scaled(1.0 / mix.max_abs_coeff());
}

std::vector<CorpusEntry> manufactured_corpus(
    std::shared_ptr<const CliffordRep> rep, const GridSpec& grid,
    std::uint64_t seed) {
  grid.validate();
  const int n = grid.n;
  const RVector origin = RVector::Zero(n);
  std::vector<CorpusEntry> corpus;

  {
    Rng rng(seed ^ kTagMix);
    const HomogeneousSpinorPoly mix = random_harmonic_mix(*rep, 2, &rng);
    CorpusEntry e;
    e.name = "harmonic_mix_deg2";
    e.field = synth_harmonic_poly(rep, grid, mix, origin);
    e.order = 2;
    e.invariance = invariance_dimension(mix);
    e.exactly_harmonic = true;
    corpus.push_back(std::move(e));
  }
  for (int k = 1; k <= 2; ++k) {
    const HomogeneousSpinorPoly poly = planar_power(*rep, k);
    CorpusEntry e;
    e.name = "planar_k" + std::to_string(k);
    e.field = synth_harmonic_poly(rep, grid, poly, origin);
    e.order = k;
    e.invariance = invariance_dimension(poly);
    e.exactly_harmonic = true;
    corpus.push_back(std::move(e));
  }
  {
    Rng rng(seed ^ kTagWave);
    const RVector xi = random_unit_vector(n, &rng) * rng.uniform(0.8, 1.6);
    CorpusEntry e;
    e.name = "plane_wave";
    e.field = synth_plane_wave(rep, grid, xi, 1);
    corpus.push_back(std::move(e));
  }
  for (int k = 1; k <= 2; ++k) {
    Rng rng(seed ^ (kTagPlanted + static_cast<std::uint64_t>(k)));
    const HomogeneousSpinorPoly leading = random_harmonic_mix(*rep, k, &rng);
    const CVector dir = random_unit_spinor(rep->fiber_dim, &rng);
    CorpusEntry e;
    e.name = "planted_k" + std::to_string(k);
    e.field = synth_planted(rep, grid, leading, 0.05, dir, origin);
    e.order = k;
    e.invariance = invariance_dimension(leading);
    corpus.push_back(std::move(e));
  }
  {
    Rng rng(seed ^ kTagBubble);
    const CVector u = random_unit_spinor(rep->fiber_dim, &rng);
    CorpusEntry e;
    e.name = "bubble";
    e.field = synth_dirac_bubble(rep, grid, u, -1.0);
    corpus.push_back(std::move(e));
  }
  return corpus;
}

SpinorField random_smooth_field(std::shared_ptr<const CliffordRep> rep,
                                const GridSpec& grid, std::uint64_t seed) {
  grid.validate();
  const int n = grid.n;
  const int fiber = rep->fiber_dim;
  Rng rng(seed ^ kTagSmooth);

  struct SmoothPolyData {
    std::vector<Poly> comps;
    std::vector<std::vector<Poly>> deriv;  // [component][axis]
    std::vector<Poly> lap;
  };
  auto data = std::make_shared<SmoothPolyData>();
  data->comps.reserve(static_cast<std::size_t>(fiber));
  for (int c = 0; c < fiber; ++c) {
    Poly p(n);
    for (int d = 0; d <= 3; ++d) {
      const double scale = 1.0 / (1.0 + static_cast<double>(d * d));
      for (const MultiIndex& a : monomials_of_degree(n, d)) {
        p.add_term(a, scale * cplx(rng.normal(), rng.normal()));
      }
    }
    data->comps.push_back(std::move(p));
  }
  data->deriv.resize(static_cast<std::size_t>(fiber));
  data->lap.reserve(static_cast<std::size_t>(fiber));
  for (int c = 0; c < fiber; ++c) {
    auto& row = data->deriv[static_cast<std::size_t>(c)];
    row.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      row.push_back(data->comps[static_cast<std::size_t>(c)].derivative(j));
    }
    data->lap.push_back(data->comps[static_cast<std::size_t>(c)].laplacian());
  }
  // Warm every evaluation cache before the parallel grid sampling inside
  // synth_custom touches these polynomials from multiple threads.
  const RVector warm = RVector::Zero(n);
  for (int c = 0; c < fiber; ++c) {
    (void)data->comps[static_cast<std::size_t>(c)].eval(warm);
    (void)data->lap[static_cast<std::size_t>(c)].eval(warm);
    for (int j = 0; j < n; ++j) {
      (void)data->deriv[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)]
          .eval(warm);
    }
  }

  ClosedFormData closed;
  closed.value = [data, fiber](const RVector& x) {
    CVector v(fiber);
    for (int c = 0; c < fiber; ++c) {
      v(c) = data->comps[static_cast<std::size_t>(c)].eval(x);
    }
    return v;
  };
  closed.grad = [data, fiber](const RVector& x) {
    const int nv = static_cast<int>(x.size());
    Matrix g(fiber, nv);
    for (int c = 0; c < fiber; ++c) {
      for (int j = 0; j < nv; ++j) {
        g(c, j) =
            data->deriv[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)]
                .eval(x);
      }
    }
    return g;
  };
  closed.lap = [data, fiber](const RVector& x) {
    CVector v(fiber);
    for (int c = 0; c < fiber; ++c) {
      v(c) = data->lap[static_cast<std::size_t>(c)].eval(x);
    }
    return v;
  };
  return synth_custom(rep, grid, std::move(closed));
}

}  // namespace spinodal
