#include "pbec/phonon_oracle.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "pbec/correlation.hpp"

namespace pbec::lindblad {

namespace {

HilbertLayout explicit_layout(const PhononOracleConfig& cfg) {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {cfg.photon_cutoff};
  lay.phonon_cutoff = cfg.phonon_cutoff;
  lay.dimension_cap = 8192;
  return lay;
}

}  // namespace

LiouvillianSpec build_explicit_phonon_liouvillian(
    const PhononOracleConfig& cfg, double delta_nu) {
  if (cfg.phonon_cutoff < 20 * cfg.dye.huang_rhys || cfg.phonon_cutoff < 1)
    throw std::invalid_argument(
        "phonon oracle: phonon cutoff must be >= 20 S quanta");

  const auto lay = explicit_layout(cfg);
  LiouvillianSpec L;
  L.layout = lay;

  const SpMat sig = sigma_minus(lay, 0);
  const SpMat a = photon_annihilation(lay, 0);
  const SpMat b = phonon_annihilation(lay);
  const long d = lay.dimension();
  SpMat I(d, d);
  I.setIdentity();

  const SpMat n_ph = SpMat(a.adjoint() * a);
  const SpMat n_b = SpMat(b.adjoint() * b);
  const SpMat sz = SpMat(2.0 * SpMat(sig.adjoint() * sig) - I);
  const SpMat bx = SpMat(b + SpMat(b.adjoint()));
  const SpMat up = SpMat(a * sig.adjoint());

  SpMat H = delta_nu * n_ph + cfg.dye.Omega * n_b;
  H += (cfg.dye.Omega * std::sqrt(cfg.dye.huang_rhys)) * SpMat(sz * bx);
  H += cfg.coupling * SpMat(up + SpMat(up.adjoint()));
  L.hamiltonian = H;

  if (cfg.kappa > 0.0) L.dissipators.push_back({cfg.kappa, a, "kappa"});
  if (cfg.gamma_down > 0.0)
    L.dissipators.push_back({cfg.gamma_down, sig, "gamma_down"});
  if (cfg.gamma_up > 0.0)
    L.dissipators.push_back({cfg.gamma_up, SpMat(sig.adjoint()), "gamma_up"});

  L.compile();
  return L;
}

LiouvillianSpec build_nested_reference(const PhononOracleConfig& cfg,
                                       double delta_nu) {
  HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {cfg.photon_cutoff};

  const double Gamma = cfg.kappa + cfg.gamma_down + cfg.gamma_up;
  const auto model = rates::CorrelationModel::from_dye(cfg.dye);

  rates::RateSet rs;
  rs.kappa = cfg.kappa;
  rs.gamma_down = cfg.gamma_down;
  rs.gamma_up = cfg.gamma_up;
  rs.Gamma = Gamma;
  const auto Ka = rates::k_transform(model, cfg.coupling, delta_nu, Gamma);
  const auto Ke = rates::k_transform(model, cfg.coupling, -delta_nu, Gamma);
  rs.gamma_abs = {2.0 * Ka.real()};
  rs.gamma_em = {2.0 * Ke.real()};
  rs.kpp_abs = {Ka.imag()};
  rs.kpp_em = {Ke.imag()};

  CavityMode mode;
  mode.omega_nu = cfg.dye.omega10 + delta_nu;
  mode.gamma_nu = cfg.kappa;
  mode.Omega_nu = cfg.coupling;

  return build_liouvillian(lay, rs, {mode}, cfg.dye);
}

namespace {

// Steady photon number via sparse LU with pattern reuse across a sweep.
class SteadySolver {
 public:
  explicit SteadySolver(const PhononOracleConfig& cfg) : cfg_(cfg) {}

  QuantumState solve(double delta_nu) {
    LiouvillianSpec L = build_explicit_phonon_liouvillian(cfg_, delta_nu);
    const long n = L.dim_l;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(L.val.size() + L.dim);
    for (long i = 0; i < L.dim; ++i)
      trip.emplace_back(0, static_cast<int>(i * L.dim + i), 1.0);
    for (long r = 1; r < n; ++r)
      for (std::int64_t j = L.row_ptr[r]; j < L.row_ptr[r + 1]; ++j)
        trip.emplace_back(static_cast<int>(r), L.col[j], L.val[j]);
    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());

    if (!analyzed_) {
      lu_.analyzePattern(A);
      analyzed_ = true;
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("phonon oracle: sparse LU factorization failed");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs[0] = 1.0;
    Eigen::VectorXcd x = lu_.solve(rhs);

    QuantumState s;
    s.layout = L.layout;
    cplx tr{};
    for (long i = 0; i < L.dim; ++i) tr += x[i * L.dim + i];
    s.rho = x / tr;
    return s;
  }

 private:
  PhononOracleConfig cfg_;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu_;
  bool analyzed_ = false;
};

// Golden-section refinement of a bracketed maximum.
template <class F>
double refine_peak(F&& f, double lo, double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y,
                                      double threshold) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > threshold)
      idx.push_back(i);
  return idx;
}

}  // namespace

PhononOracleReport explicit_phonon_oracle(const PhononOracleConfig& cfg,
                                          bool run_sweep, int coarse_points) {
  PhononOracleReport rep;
  const double delta0 = cfg.omega_nu - cfg.dye.omega10;
  const double Gamma = cfg.kappa + cfg.gamma_down + cfg.gamma_up;

  SteadySolver solver(cfg);
  const auto lay = explicit_layout(cfg);
  const auto nph_diag = photon_number_diagonal(lay, 0);
  const auto nb_diag = phonon_number_diagonal(lay);

  QuantumState s = solver.solve(delta0);
  rep.n_explicit = s.expect_diagonal(nph_diag);
  rep.trace_error = s.trace_error();
  rep.hermiticity_error = s.hermiticity_error();
  rep.min_eigenvalue = s.min_eigenvalue();

  // truncation-leakage monitors
  {
    const long d = lay.dimension();
    const auto dens = s.density();
    double top_phonon = 0.0, top_photon = 0.0;
    for (long i = 0; i < d; ++i) {
      const double p = dens(i, i).real();
      if (nb_diag[i] == cfg.phonon_cutoff) top_phonon += p;
      if (nph_diag[i] == cfg.photon_cutoff) top_photon += p;
    }
    rep.phonon_leakage = top_phonon;
    rep.photon_leakage = top_photon;
    if (top_phonon > 1e-6)
      throw std::runtime_error(
          "phonon oracle: phonon truncation leakage exceeds 1e-6");
  }

  // nested counterpart
  {
    LiouvillianSpec Ln = build_nested_reference(cfg, delta0);
    auto st = steady_state(Ln);
    const auto diag_n =
        photon_number_diagonal(st.state.layout, 0);
    rep.n_nested = st.state.expect_diagonal(diag_n);
  }
  rep.rel_deviation = std::abs(rep.n_explicit - rep.n_nested) /
                      std::max(rep.n_nested, 1e-300);

  if (!run_sweep) return rep;

  // Detuning sweep: the cavity samples the molecular emission spectrum.
  const double lo = -2.2 * cfg.dye.Omega, hi = 2.2 * cfg.dye.Omega;
  rep.sweep_delta.resize(coarse_points);
  rep.sweep_n_explicit.resize(coarse_points);
  rep.sweep_gamma_em.resize(coarse_points);
  const auto model = rates::CorrelationModel::from_dye(cfg.dye);
  for (int i = 0; i < coarse_points; ++i) {
    const double delta = lo + (hi - lo) * i / (coarse_points - 1);
    rep.sweep_delta[i] = delta;
    rep.sweep_n_explicit[i] =
        solver.solve(delta).expect_diagonal(nph_diag);
    rep.sweep_gamma_em[i] =
        rates::gamma_of(model, cfg.coupling, -delta, Gamma);
  }

  const double step = (hi - lo) / (coarse_points - 1);
  const double thr_e =
      0.25 * *std::max_element(rep.sweep_n_explicit.begin(),
                               rep.sweep_n_explicit.end());
  auto n_of_delta = [&](double delta) {
    return solver.solve(delta).expect_diagonal(nph_diag);
  };
  for (std::size_t i : local_maxima(rep.sweep_n_explicit, thr_e)) {
    const double center = rep.sweep_delta[i];
    rep.peaks_explicit.push_back(refine_peak(
        n_of_delta, center - step, center + step, 0.2 * Gamma));
  }

  const double thr_n =
      0.25 * *std::max_element(rep.sweep_gamma_em.begin(),
                               rep.sweep_gamma_em.end());
  auto em_of_delta = [&](double delta) {
    return rates::gamma_of(model, cfg.coupling, -delta, Gamma);
  };
  for (std::size_t i : local_maxima(rep.sweep_gamma_em, thr_n)) {
    const double center = rep.sweep_delta[i];
    rep.peaks_nested.push_back(refine_peak(
        em_of_delta, center - step, center + step, 0.05 * Gamma));
  }

  // pair explicit peaks with the nearest nested peak
  rep.max_peak_mismatch = 0.0;
  for (double pe : rep.peaks_explicit) {
    double best = std::numeric_limits<double>::infinity();
    for (double pn : rep.peaks_nested) best = std::min(best, std::abs(pe - pn));
    rep.max_peak_mismatch = std::max(rep.max_peak_mismatch, best);
  }
  return rep;
}

}  // namespace pbec::lindblad
