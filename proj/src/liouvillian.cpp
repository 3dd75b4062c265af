#include "pbec/liouvillian.hpp"

#include <cmath>

#include "pbec/kernels.hpp"

namespace pbec::lindblad {

namespace {

SpMat identity(long n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace

SpMat superoperator_matrix(const SpMat& H,
                           const std::vector<Dissipator>& dissipators) {
  const long d = H.rows();
  const SpMat I = identity(d);
  const cplx im(0.0, 1.0);

  // vec is column-major: vec(A rho B) = (B^T kron A) vec(rho).
  SpMat Ht = H.transpose();
  SpMat L = kron(I, H) * (-im) + kron(Ht, I) * im;

  for (const auto& dsp : dissipators) {
    const SpMat& X = dsp.op;
    SpMat Xd = X.adjoint();
    SpMat XdX = Xd * X;
    SpMat Xc = X.conjugate();
    SpMat XdXt = XdX.transpose();
    L += dsp.rate * kron(Xc, X);
    L -= (0.5 * dsp.rate) * kron(I, XdX);
    L -= (0.5 * dsp.rate) * kron(XdXt, I);
  }
  L.makeCompressed();
  return L;
}

void LiouvillianSpec::compile() {
  layout.validate();
  dim = layout.dimension();
  dim_l = dim * dim;
  for (const auto& d : dissipators)
    if (d.rate < 0.0)
      throw std::invalid_argument("liouvillian: negative rate for " + d.label);

  SpMat L = superoperator_matrix(hamiltonian, dissipators);

  row_ptr.assign(dim_l + 1, 0);
  col.clear();
  val.clear();
  col.reserve(L.nonZeros());
  val.reserve(L.nonZeros());
  scale_ = 0.0;
  for (long r = 0; r < dim_l; ++r) {
    double row_sum = 0.0;
    for (SpMat::InnerIterator it(L, r); it; ++it) {
      col.push_back(static_cast<std::int32_t>(it.col()));
      val.push_back(it.value());
      row_sum += std::abs(it.value());
    }
    row_ptr[r + 1] = static_cast<std::int64_t>(col.size());
    scale_ = std::max(scale_, row_sum);
  }
}

void LiouvillianSpec::apply(const cplx* x, cplx* y) const {
  kernels::active().spmv(static_cast<std::size_t>(dim_l), row_ptr.data(),
                         col.data(), val.data(), x, y);
}

LiouvillianSpec LiouvillianSpec::from_superoperator(
    const HilbertLayout& layout, const SpMat& L) {
  LiouvillianSpec spec;
  spec.layout = layout;
  spec.dim = layout.dimension();
  spec.dim_l = spec.dim * spec.dim;
  if (L.rows() != spec.dim_l || L.cols() != spec.dim_l)
    throw std::invalid_argument("from_superoperator: dimension mismatch");
  spec.row_ptr.assign(spec.dim_l + 1, 0);
  spec.scale_ = 0.0;
  for (long r = 0; r < spec.dim_l; ++r) {
    double row_sum = 0.0;
    for (SpMat::InnerIterator it(L, r); it; ++it) {
      spec.col.push_back(static_cast<std::int32_t>(it.col()));
      spec.val.push_back(it.value());
      row_sum += std::abs(it.value());
    }
    spec.row_ptr[r + 1] = static_cast<std::int64_t>(spec.col.size());
    spec.scale_ = std::max(spec.scale_, row_sum);
  }
  return spec;
}

LiouvillianSpec build_liouvillian(const HilbertLayout& layout,
                                  const rates::RateSet& rates,
                                  const std::vector<CavityMode>& modes,
                                  const DyeParameters& dye,
                                  const BuildOptions& options) {
  layout.validate();
  if (layout.photon_cutoffs.size() != modes.size())
    throw std::invalid_argument(
        "build_liouvillian: one photon cutoff per mode required");
  if (layout.n_molecules != dye.n_molecules)
    throw std::invalid_argument(
        "build_liouvillian: layout/dye molecule count mismatch");

  LiouvillianSpec L;
  L.layout = layout;
  const long d = layout.dimension();

  const double frame =
      options.frame_offset >= 0.0 ? options.frame_offset : dye.omega10;

  // H'_S in the rotating frame. The molecule collects one K''(-delta) per
  // mode; each mode is shifted once per molecule; the cross term pairs every
  // (mode, molecule).
  SpMat H(d, d);
  double w10 = dye.omega10 - frame;
  if (options.include_stage2_shifts)
    for (std::size_t nu = 0; nu < modes.size(); ++nu) w10 += rates.kpp_em[nu];

  std::vector<SpMat> sig(layout.n_molecules), phot(modes.size());
  for (int i = 0; i < layout.n_molecules; ++i) sig[i] = sigma_minus(layout, i);
  for (std::size_t nu = 0; nu < modes.size(); ++nu)
    phot[nu] = photon_annihilation(layout, static_cast<int>(nu));

  for (int i = 0; i < layout.n_molecules; ++i) {
    SpMat n_mol = SpMat(sig[i].adjoint() * sig[i]);
    H += w10 * n_mol;
  }
  for (std::size_t nu = 0; nu < modes.size(); ++nu) {
    double w_nu = modes[nu].omega_nu - frame;
    if (options.include_stage2_shifts)
      w_nu += dye.n_molecules * rates.kpp_abs[nu];
    SpMat n_ph = SpMat(phot[nu].adjoint() * phot[nu]);
    H += w_nu * n_ph;
    if (options.include_stage2_shifts) {
      const double cross = rates.kpp_em[nu] - rates.kpp_abs[nu];
      for (int i = 0; i < layout.n_molecules; ++i) {
        SpMat n_mol = SpMat(sig[i].adjoint() * sig[i]);
        H += cross * SpMat(n_ph * n_mol);
      }
    }
    if (options.jc_coupling != 0.0) {
      for (int i = 0; i < layout.n_molecules; ++i) {
        SpMat up = SpMat(phot[nu] * sig[i].adjoint());
        H += options.jc_coupling * SpMat(up + SpMat(up.adjoint()));
      }
    }
  }
  L.hamiltonian = H;

  const int photon_multiplicity =
      options.literal_photon_sum ? layout.n_molecules : 1;
  for (std::size_t nu = 0; nu < modes.size(); ++nu) {
    const double kappa_nu = rates::kappa_from_mode(modes[nu]);
    L.dissipators.push_back({photon_multiplicity * kappa_nu, phot[nu],
                             "kappa[" + std::to_string(nu) + "]"});
  }
  for (int i = 0; i < layout.n_molecules; ++i) {
    if (rates.gamma_down > 0.0)
      L.dissipators.push_back(
          {rates.gamma_down, sig[i], "gamma_down[" + std::to_string(i) + "]"});
    if (rates.gamma_up > 0.0)
      L.dissipators.push_back({rates.gamma_up, SpMat(sig[i].adjoint()),
                               "gamma_up[" + std::to_string(i) + "]"});
  }
  for (std::size_t nu = 0; nu < modes.size(); ++nu) {
    for (int i = 0; i < layout.n_molecules; ++i) {
      if (rates.gamma_abs[nu] > 0.0)
        L.dissipators.push_back({rates.gamma_abs[nu],
                                 SpMat(phot[nu] * sig[i].adjoint()),
                                 "gamma_abs[" + std::to_string(nu) + "," +
                                     std::to_string(i) + "]"});
      if (rates.gamma_em[nu] > 0.0)
        L.dissipators.push_back({rates.gamma_em[nu],
                                 SpMat(phot[nu].adjoint() * sig[i]),
                                 "gamma_em[" + std::to_string(nu) + "," +
                                     std::to_string(i) + "]"});
    }
  }

  L.compile();
  return L;
}

}  // namespace pbec::lindblad
