#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pbec/evolve.hpp"
#include "pbec/phonon_oracle.hpp"

using namespace pbec;
using namespace pbec::lindblad;

namespace {

DyeParameters plain_dye(int n_mol = 1) {
  DyeParameters d;
  d.omega10 = 1e3;
  d.Omega = 20.0;
  d.huang_rhys = 0.3;
  d.d01 = 1e-30;
  d.temperature = 1e-12;
  d.n_molecules = n_mol;
  return d;
}

rates::RateSet zero_rates(std::size_t n_modes) {
  rates::RateSet r;
  r.gamma_abs.assign(n_modes, 0.0);
  r.gamma_em.assign(n_modes, 0.0);
  r.kpp_abs.assign(n_modes, 0.0);
  r.kpp_em.assign(n_modes, 0.0);
  return r;
}

CavityMode mode_at(double omega, double gamma, double W = 0.0) {
  CavityMode m;
  m.omega_nu = omega;
  m.gamma_nu = gamma;
  m.Omega_nu = W;
  return m;
}

// Column-by-column dense construction of -i[H,rho] + sum gamma D[X] rho,
// using matrix products on basis matrices; independent of the kron-formula
// path used by superoperator_matrix.
Eigen::MatrixXcd dense_oracle(const Eigen::MatrixXcd& H,
                              const std::vector<Dissipator>& diss) {
  const long d = H.rows();
  Eigen::MatrixXcd L(d * d, d * d);
  for (long l = 0; l < d; ++l)
    for (long k = 0; k < d; ++k) {
      Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(d, d);
      E(k, l) = 1.0;
      Eigen::MatrixXcd dE = cplx(0, -1) * (H * E - E * H);
      for (const auto& ds : diss) {
        Eigen::MatrixXcd X = ds.op;
        dE += ds.rate * (X * E * X.adjoint() -
                         0.5 * (X.adjoint() * X * E + E * X.adjoint() * X));
      }
      L.col(l * d + k) = Eigen::Map<Eigen::VectorXcd>(dE.data(), d * d);
    }
  return L;
}

}  // namespace

TEST_CASE("golden sparse fingerprint for 1 molecule, 1 mode, cutoff 5") {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {5};
  auto dye = plain_dye();

  rates::RateSet r = zero_rates(1);
  r.kappa = 1.0;
  r.gamma_down = 0.5;
  r.gamma_up = 0.25;
  r.Gamma = 1.75;
  r.gamma_abs = {0.1};
  r.gamma_em = {0.2};
  r.kpp_abs = {0.01};
  r.kpp_em = {-0.02};
  auto modes = std::vector<CavityMode>{mode_at(dye.omega10 - 20.0, 1.0)};
  auto L = build_liouvillian(lay, r, modes, dye);

  // same physics, assembled by dense matrix products per basis column
  Eigen::MatrixXcd H = Eigen::MatrixXcd(L.hamiltonian);
  auto Ld = dense_oracle(H, L.dissipators);

  const double tol = 1e-14 * Ld.cwiseAbs().maxCoeff();
  long nnz_dense = 0;
  for (long c = 0; c < Ld.cols(); ++c)
    for (long rr = 0; rr < Ld.rows(); ++rr)
      if (std::abs(Ld(rr, c)) > tol) ++nnz_dense;

  long nnz_csr = 0;
  Eigen::VectorXcd colsum_csr = Eigen::VectorXcd::Zero(L.dim_l);
  for (long rr = 0; rr < L.dim_l; ++rr)
    for (std::int64_t j = L.row_ptr[rr]; j < L.row_ptr[rr + 1]; ++j) {
      if (std::abs(L.val[j]) > tol) ++nnz_csr;
      colsum_csr[L.col[j]] += L.val[j];
    }
  CHECK(nnz_csr == nnz_dense);
  for (long c = 0; c < L.dim_l; ++c)
    CHECK(std::abs(colsum_csr[c] - Ld.col(c).sum()) < 1e-10);
}

TEST_CASE("paper Lindblad convention equals the standard dissipator form") {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {2};
  auto sig = sigma_minus(lay, 0);
  auto a = photon_annihilation(lay, 0);
  const long d = lay.dimension();

  SpMat H = SpMat(3.0 * SpMat(sig.adjoint() * sig)) +
            SpMat(1.7 * SpMat(a.adjoint() * a));
  const double gamma = 0.8;
  auto L = superoperator_matrix(H, {{gamma, a, "k"}});

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXcd rho(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) rho(i, j) = cplx(u(rng), u(rng));
  rho = 0.5 * (rho + rho.adjoint()).eval();

  // paper's convention: drho = -i[H,rho] - (gamma/2) L[a] rho with
  // L[X] rho = X†X rho + rho X†X - 2 X rho X†
  Eigen::MatrixXcd Hd = Eigen::MatrixXcd(H);
  Eigen::MatrixXcd A = Eigen::MatrixXcd(a);
  Eigen::MatrixXcd lhs = cplx(0, -1) * (Hd * rho - rho * Hd) -
                         0.5 * gamma *
                             (A.adjoint() * A * rho + rho * A.adjoint() * A -
                              2.0 * A * rho * A.adjoint());

  Eigen::VectorXcd x = Eigen::Map<Eigen::VectorXcd>(rho.data(), d * d);
  Eigen::VectorXcd y = Eigen::MatrixXcd(L) * x;
  Eigen::MatrixXcd rhs = Eigen::Map<Eigen::MatrixXcd>(y.data(), d, d);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("zero rates and zero coupling preserve every population") {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {3};
  auto dye = plain_dye();
  auto L = build_liouvillian(lay, zero_rates(1),
                             {mode_at(dye.omega10 + 7.0, 1.0)}, dye);
  auto s = QuantumState::basis_state(lay, basis_index(lay, {1, 2}));
  EvolveOptions eo;
  eo.t_final = 2.0;
  eo.dt = 1e-3;
  eo.sample_stride = 400;
  auto traj = evolve(s, L, eo);
  CHECK(traj.points.back().excitation == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(traj.points.back().n_photon[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("kappa-only Liouvillian conserves the excitation-difference blocks") {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {2};
  auto dye = plain_dye();
  rates::RateSet r = zero_rates(1);
  r.kappa = 1.0;
  auto L = build_liouvillian(lay, r, {mode_at(dye.omega10, 1.0)}, dye);

  const auto exc = excitation_diagonal(lay);
  const auto nph = photon_number_diagonal(lay, 0);
  const long d = lay.dimension();
  auto sector = [&](long idx) {
    const long row = idx % d, col = idx / d;
    return (exc[row] + nph[row]) - (exc[col] + nph[col]);
  };
  for (long rr = 0; rr < L.dim_l; ++rr)
    for (std::int64_t j = L.row_ptr[rr]; j < L.row_ptr[rr + 1]; ++j)
      if (std::abs(L.val[j]) > 1e-14)
        CHECK(sector(rr) == sector(L.col[j]));
}

TEST_CASE("empty cavity decays exactly exponentially") {
  HilbertLayout lay;
  lay.n_molecules = 0;
  lay.photon_cutoffs = {3};
  auto dye = plain_dye(0);
  rates::RateSet r = zero_rates(1);
  r.kappa = 1.0;
  auto L = build_liouvillian(lay, r, {mode_at(dye.omega10, 1.0)}, dye);

  auto s = QuantumState::basis_state(lay, basis_index(lay, {1}));
  EvolveOptions eo;
  eo.t_final = 5.0;
  eo.dt = 1e-3;
  eo.sample_stride = 100;
  auto traj = evolve(s, L, eo);
  for (const auto& p : traj.points) {
    const double expect = std::exp(-p.t);
    CHECK(std::abs(p.n_photon[0] - expect) <= 1e-6 * expect);
  }
  CHECK(traj.max_trace_error < 1e-9);
  CHECK(traj.max_hermiticity_error < 1e-12);
  CHECK(traj.min_eigenvalue >= -1e-10);
}

TEST_CASE("two-level pumping saturates at Gamma_up/(Gamma_up + Gamma_down)") {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {};
  auto dye = plain_dye();
  rates::RateSet r = zero_rates(0);
  r.gamma_up = 0.4;
  r.gamma_down = 0.6;
  auto L = build_liouvillian(lay, r, {}, dye);

  auto s = QuantumState::basis_state(lay, 0);  // ground
  EvolveOptions eo;
  eo.t_final = 8.0;
  eo.dt = 2e-4;
  eo.sample_stride = 2000;
  auto traj = evolve(s, L, eo);
  const double f_inf = 0.4;
  const double rate = 1.0;
  for (const auto& p : traj.points) {
    const double expect = f_inf * (1.0 - std::exp(-rate * p.t));
    CHECK(std::abs(p.excitation - expect) < 1e-6);
  }
}

TEST_CASE("closed Jaynes-Cummings vacuum Rabi oscillation at Omega_nu") {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {2};
  auto dye = plain_dye();
  const double W = 2.0;  // Omega_nu
  BuildOptions bo;
  bo.jc_coupling = 0.5 * W;  // bare H_SB4 normalization
  auto L = build_liouvillian(lay, zero_rates(1), {mode_at(dye.omega10, 1e-9)},
                             dye, bo);

  auto s = QuantumState::basis_state(lay, basis_index(lay, {1, 0}));  // |e,0>
  EvolveOptions eo;
  eo.t_final = 3.0 * 2.0 * constants::pi / W;
  eo.dt = 1e-4;
  eo.sample_stride = 200;
  auto traj = evolve(s, L, eo);
  for (const auto& p : traj.points) {
    // full-contrast oscillation of <sigma†sigma> at angular frequency W
    const double expect = 0.5 * (1.0 + std::cos(W * p.t));
    CHECK(std::abs(p.excitation - expect) < 1e-6);
  }
}

TEST_CASE("steady states: vacuum, inverted, and evolve cross-check") {
  auto dye = plain_dye();

  SUBCASE("kappa only: vacuum") {
    HilbertLayout lay;
    lay.n_molecules = 0;
    lay.photon_cutoffs = {3};
    auto d0 = plain_dye(0);
    rates::RateSet r = zero_rates(1);
    r.kappa = 1.0;
    auto L = build_liouvillian(lay, r, {mode_at(d0.omega10, 1.0)}, d0);
    auto st = steady_state(L);
    CHECK(st.state.expect_diagonal(photon_number_diagonal(lay, 0)) <
          1e-10);
    CHECK(st.null_space_dim == 1);
  }

  SUBCASE("pump only: fully excited molecule") {
    HilbertLayout lay;
    lay.n_molecules = 1;
    lay.photon_cutoffs = {};
    rates::RateSet r = zero_rates(0);
    r.gamma_up = 0.7;
    auto L = build_liouvillian(lay, r, {}, dye);
    auto st = steady_state(L);
    CHECK(st.state.expect_diagonal(excitation_diagonal(lay)) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("full reference: direct solve equals long evolution") {
    HilbertLayout lay;
    lay.n_molecules = 1;
    lay.photon_cutoffs = {4};
    rates::RateSet r = zero_rates(1);
    r.kappa = 1.0;
    r.gamma_down = 0.5;
    r.gamma_up = 0.4;
    r.Gamma = 1.9;
    auto model = rates::CorrelationModel::from_dye(dye);
    const double delta = -dye.Omega;
    const double W = 0.3;
    const auto Ka = rates::k_transform(model, W, delta, r.Gamma);
    const auto Ke = rates::k_transform(model, W, -delta, r.Gamma);
    r.gamma_abs = {2.0 * Ka.real()};
    r.gamma_em = {2.0 * Ke.real()};
    r.kpp_abs = {Ka.imag()};
    r.kpp_em = {Ke.imag()};
    auto L = build_liouvillian(
        lay, r, {mode_at(dye.omega10 + delta, r.kappa, W)}, dye);

    auto st = steady_state(L);
    auto s = QuantumState::basis_state(lay, 0);
    EvolveOptions eo;
    eo.t_final = 60.0;
    eo.dt = 2e-3;
    eo.sample_stride = 1 << 30;
    eo.track_eigenvalues = false;
    auto traj = evolve(s, L, eo);
    const double n_evolved = traj.points.back().n_photon[0];
    const double n_direct =
        st.state.expect_diagonal(photon_number_diagonal(lay, 0));
    CHECK(std::abs(n_evolved - n_direct) < 1e-6);
  }
}

TEST_CASE("degenerate steady state is reported") {
  HilbertLayout lay;
  lay.n_molecules = 0;
  lay.photon_cutoffs = {1, 1};
  auto d0 = plain_dye(0);
  rates::RateSet r = zero_rates(2);
  r.kappa = 1.0;
  // kappa on the first mode only; the second mode keeps any diagonal state
  std::vector<CavityMode> modes{mode_at(d0.omega10, 1.0),
                                mode_at(d0.omega10 + 1.0, 1e-30)};
  auto L = build_liouvillian(lay, r, modes, d0);
  L.dissipators.resize(1);  // drop the second mode's dissipator entirely
  L.compile();
  CHECK_THROWS_WITH_AS(steady_state(L),
                       doctest::Contains("non-unique"), std::runtime_error);
}

TEST_CASE("rotating-frame independence of dissipative observables") {
  auto dye_a = plain_dye();
  auto dye_b = plain_dye();
  dye_b.omega10 = dye_a.omega10 + 137.0;  // common shift of all frequencies

  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {3};
  rates::RateSet r = zero_rates(1);
  r.kappa = 0.8;
  r.gamma_down = 0.3;
  r.gamma_up = 0.25;
  r.Gamma = 1.35;
  r.gamma_abs = {0.05};
  r.gamma_em = {0.12};
  r.kpp_abs = {0.01};
  r.kpp_em = {0.02};

  BuildOptions bo;
  bo.frame_offset = dye_a.omega10;  // same frame for both builds
  auto La = build_liouvillian(lay, r, {mode_at(dye_a.omega10 - 5.0, 0.8)},
                              dye_a, bo);
  auto Lb = build_liouvillian(lay, r, {mode_at(dye_b.omega10 - 5.0, 0.8)},
                              dye_b, bo);

  auto sa = QuantumState::basis_state(lay, basis_index(lay, {1, 1}));
  auto sb = sa;
  EvolveOptions eo;
  eo.t_final = 4.0;
  eo.dt = 5e-4;
  eo.sample_stride = 800;
  eo.track_eigenvalues = false;
  auto ta = evolve(sa, La, eo);
  auto tb = evolve(sb, Lb, eo);
  for (std::size_t i = 0; i < ta.points.size(); ++i) {
    CHECK(std::abs(ta.points[i].n_photon[0] - tb.points[i].n_photon[0]) <
          1e-8);
    CHECK(std::abs(ta.points[i].excitation - tb.points[i].excitation) < 1e-8);
    CHECK(std::abs(ta.points[i].purity - tb.points[i].purity) < 1e-8);
  }
}

TEST_CASE("literal photon-sum option multiplies kappa by N") {
  auto dye = plain_dye(2);
  HilbertLayout lay;
  lay.n_molecules = 2;
  lay.photon_cutoffs = {2};
  rates::RateSet r = zero_rates(1);
  r.kappa = 1.0;

  BuildOptions literal;
  literal.literal_photon_sum = true;
  auto L = build_liouvillian(lay, r, {mode_at(dye.omega10, 1.0)}, dye,
                             literal);
  auto s = QuantumState::basis_state(lay, basis_index(lay, {0, 0, 1}));
  EvolveOptions eo;
  eo.t_final = 2.0;
  eo.dt = 1e-3;
  eo.sample_stride = 500;
  eo.track_eigenvalues = false;
  auto traj = evolve(s, L, eo);
  for (const auto& p : traj.points)
    CHECK(p.n_photon[0] ==
          doctest::Approx(std::exp(-2.0 * p.t)).epsilon(1e-5));
}

TEST_CASE("with no pump the total excitation is non-increasing") {
  auto dye = plain_dye();
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {2};
  rates::RateSet r = zero_rates(1);
  r.kappa = 0.4;
  r.gamma_down = 0.3;
  r.gamma_abs = {0.2};
  r.gamma_em = {0.1};
  r.Gamma = 0.7;
  auto L = build_liouvillian(lay, r, {mode_at(dye.omega10 - 3.0, 0.4)}, dye);
  auto s = QuantumState::basis_state(lay, basis_index(lay, {1, 1}));
  EvolveOptions eo;
  eo.t_final = 6.0;
  eo.dt = 1e-3;
  eo.sample_stride = 300;
  eo.track_eigenvalues = false;
  auto traj = evolve(s, L, eo);
  const auto nph = photon_number_diagonal(lay, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& p : traj.points) {
    const double total = p.excitation + p.n_photon[0];
    CHECK(total <= prev + 1e-10);
    prev = total;
  }
}

TEST_CASE("evolution is linear in the initial state") {
  auto dye = plain_dye();
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {2};
  rates::RateSet r = zero_rates(1);
  r.kappa = 0.5;
  r.gamma_down = 0.2;
  r.gamma_up = 0.1;
  auto L = build_liouvillian(lay, r, {mode_at(dye.omega10 + 2.0, 0.5)}, dye);

  auto s1 = QuantumState::basis_state(lay, basis_index(lay, {1, 0}));
  auto s2 = QuantumState::basis_state(lay, basis_index(lay, {0, 2}));
  const double alpha = 0.3;
  QuantumState mix = s1;
  mix.rho = alpha * s1.rho + (1.0 - alpha) * s2.rho;

  EvolveOptions eo;
  eo.t_final = 2.0;
  eo.dt = 1e-3;
  eo.sample_stride = 1 << 30;
  eo.track_eigenvalues = false;
  auto t1 = evolve(s1, L, eo);
  auto t2 = evolve(s2, L, eo);
  auto tm = evolve(mix, L, eo);
  const double expect = alpha * t1.points.back().n_photon[0] +
                        (1.0 - alpha) * t2.points.back().n_photon[0];
  CHECK(tm.points.back().n_photon[0] == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("input contracts: cap, negative rate, unresolved dt") {
  HilbertLayout big;
  big.n_molecules = 1;
  big.photon_cutoffs = {4095};
  CHECK_THROWS_AS(big.validate(), std::invalid_argument);

  auto dye = plain_dye();
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {2};
  rates::RateSet r = zero_rates(1);
  r.kappa = -1.0;
  CHECK_THROWS_AS(
      build_liouvillian(lay, r, {mode_at(dye.omega10, 1.0)}, dye),
      std::invalid_argument);

  r.kappa = 1.0;
  auto L = build_liouvillian(lay, r, {mode_at(dye.omega10, 1.0)}, dye);
  auto s = QuantumState::basis_state(lay, 0);
  EvolveOptions eo;
  eo.t_final = 1.0;
  eo.dt = 10.0;  // far beyond the stability bound
  CHECK_THROWS_AS(evolve(s, L, eo), std::invalid_argument);
}

TEST_CASE("explicit-phonon oracle degenerates cleanly at S = 0") {
  PhononOracleConfig cfg;
  cfg.dye = plain_dye();
  cfg.dye.huang_rhys = 0.0;
  cfg.dye.Omega = 1.0;
  cfg.omega_nu = cfg.dye.omega10 - 0.2;
  cfg.kappa = 5e-3;
  cfg.gamma_down = 3e-3;
  cfg.gamma_up = 2e-3;
  cfg.coupling = 2e-4;
  cfg.photon_cutoff = 2;
  cfg.phonon_cutoff = 2;  // idle ladder
  auto rep = explicit_phonon_oracle(cfg, false);
  CHECK(rep.rel_deviation < 1e-2);
  CHECK(rep.phonon_leakage < 1e-12);
}
