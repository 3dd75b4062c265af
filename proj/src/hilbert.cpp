#include "pbec/hilbert.hpp"

#include <cmath>

namespace pbec::lindblad {

SpMat kron(const SpMat& A, const SpMat& B) {
  SpMat C(A.rows() * B.rows(), A.cols() * B.cols());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()) * B.nonZeros());
  for (int i = 0; i < A.outerSize(); ++i)
    for (SpMat::InnerIterator ia(A, i); ia; ++ia)
      for (int j = 0; j < B.outerSize(); ++j)
        for (SpMat::InnerIterator ib(B, j); ib; ++ib)
          trip.emplace_back(ia.row() * B.rows() + ib.row(),
                            ia.col() * B.cols() + ib.col(),
                            ia.value() * ib.value());
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

namespace {

SpMat identity(long n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace

SpMat site_operator(const HilbertLayout& layout, int site, const SpMat& f) {
  layout.validate();
  if (site < 0 || site >= layout.n_sites())
    throw std::invalid_argument("site_operator: site out of range");
  long left = 1, right = 1;
  for (int s = 0; s < site; ++s) left *= layout.site_dim(s);
  for (int s = site + 1; s < layout.n_sites(); ++s) right *= layout.site_dim(s);
  return kron(kron(identity(left), f), identity(right));
}

SpMat sigma_minus_factor() {
  SpMat s(2, 2);
  s.insert(0, 1) = 1.0;  // |g><e|, basis {g, e}
  s.makeCompressed();
  return s;
}

SpMat annihilation_factor(int n_max) {
  SpMat a(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a.insert(n - 1, n) = std::sqrt(double(n));
  a.makeCompressed();
  return a;
}

SpMat number_factor(int dim) {
  SpMat n(dim, dim);
  for (int i = 1; i < dim; ++i) n.insert(i, i) = double(i);
  n.makeCompressed();
  return n;
}

SpMat sigma_minus(const HilbertLayout& layout, int molecule) {
  return site_operator(layout, molecule, sigma_minus_factor());
}

SpMat photon_annihilation(const HilbertLayout& layout, int mode) {
  return site_operator(layout, layout.n_molecules + mode,
                       annihilation_factor(layout.photon_cutoffs[mode]));
}

SpMat phonon_annihilation(const HilbertLayout& layout) {
  if (layout.phonon_cutoff < 0)
    throw std::invalid_argument("phonon_annihilation: layout has no phonons");
  return site_operator(layout,
                       layout.n_molecules +
                           static_cast<int>(layout.photon_cutoffs.size()),
                       annihilation_factor(layout.phonon_cutoff));
}

namespace {

// Occupation of one site across the product basis, by stride arithmetic.
std::vector<double> site_level_diagonal(const HilbertLayout& layout,
                                        int site) {
  const long dim = layout.dimension();
  long right = 1;
  for (int s = site + 1; s < layout.n_sites(); ++s) right *= layout.site_dim(s);
  const int d = layout.site_dim(site);
  std::vector<double> out(dim);
  for (long i = 0; i < dim; ++i) out[i] = double((i / right) % d);
  return out;
}

}  // namespace

std::vector<double> photon_number_diagonal(const HilbertLayout& layout,
                                           int mode) {
  return site_level_diagonal(layout, layout.n_molecules + mode);
}

std::vector<double> excitation_diagonal(const HilbertLayout& layout) {
  const long dim = layout.dimension();
  std::vector<double> out(dim, 0.0);
  for (int m = 0; m < layout.n_molecules; ++m) {
    auto d = site_level_diagonal(layout, m);
    for (long i = 0; i < dim; ++i) out[i] += d[i];
  }
  return out;
}

std::vector<double> phonon_number_diagonal(const HilbertLayout& layout) {
  if (layout.phonon_cutoff < 0)
    throw std::invalid_argument("phonon_number_diagonal: no phonons");
  return site_level_diagonal(layout, layout.n_sites() - 1);
}

std::vector<double> cutoff_indicator_diagonal(const HilbertLayout& layout,
                                              int mode) {
  auto d = site_level_diagonal(layout, layout.n_molecules + mode);
  const double top = layout.photon_cutoffs[mode];
  for (double& v : d) v = (v == top) ? 1.0 : 0.0;
  return d;
}

long basis_index(const HilbertLayout& layout,
                 const std::vector<int>& occupations) {
  if (static_cast<int>(occupations.size()) != layout.n_sites())
    throw std::invalid_argument("basis_index: one occupation per site");
  long idx = 0;
  for (int s = 0; s < layout.n_sites(); ++s) {
    const int d = layout.site_dim(s);
    if (occupations[s] < 0 || occupations[s] >= d)
      throw std::invalid_argument("basis_index: occupation out of range");
    idx = idx * d + occupations[s];
  }
  return idx;
}

}  // namespace pbec::lindblad
