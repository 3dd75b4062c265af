#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <stdexcept>
#include <vector>

// Truncated product Hilbert space: two-level molecules x photon Fock ladders
// x (optionally, for the brute-force oracle) one explicit phonon ladder.
namespace pbec::lindblad {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct HilbertLayout {
  int n_molecules = 1;
  std::vector<int> photon_cutoffs;  // n_max per mode; factor dim = n_max+1
  int phonon_cutoff = -1;           // -1: no explicit phonon ladder
  long dimension_cap = 4096;

  long dimension() const {
    long d = 1;
    for (int i = 0; i < n_molecules; ++i) d *= 2;
    for (int c : photon_cutoffs) d *= (c + 1);
    if (phonon_cutoff >= 0) d *= (phonon_cutoff + 1);
    return d;
  }

  int n_sites() const {
    return n_molecules + static_cast<int>(photon_cutoffs.size()) +
           (phonon_cutoff >= 0 ? 1 : 0);
  }

  // site order: molecules, then photon modes, then the phonon ladder
  int site_dim(int site) const {
    if (site < n_molecules) return 2;
    site -= n_molecules;
    if (site < static_cast<int>(photon_cutoffs.size()))
      return photon_cutoffs[site] + 1;
    return phonon_cutoff + 1;
  }

  void validate() const {
    if (n_molecules < 0) throw std::invalid_argument("layout: n_molecules");
    for (int c : photon_cutoffs)
      if (c < 1) throw std::invalid_argument("layout: photon cutoff must be >= 1");
    if (phonon_cutoff == 0)
      throw std::invalid_argument("layout: phonon cutoff must be >= 1");
    if (phonon_cutoff >= 0 && n_molecules != 1)
      throw std::invalid_argument(
          "layout: the explicit-phonon oracle supports exactly one molecule");
    if (dimension() > dimension_cap)
      throw std::invalid_argument("layout: dimension exceeds cap");
  }
};

// kron(A, B) for row-major complex sparse matrices.
SpMat kron(const SpMat& A, const SpMat& B);

// Identity on every site except `site`, where `f` acts.
SpMat site_operator(const HilbertLayout& layout, int site, const SpMat& f);

// Elementary factors.
SpMat sigma_minus_factor();            // |g><e|
SpMat annihilation_factor(int n_max);  // a on a (n_max+1)-dim ladder
SpMat number_factor(int dim);          // diag(0..dim-1)

// Lowering operators embedded in the full space.
SpMat sigma_minus(const HilbertLayout& layout, int molecule);
SpMat photon_annihilation(const HilbertLayout& layout, int mode);
SpMat phonon_annihilation(const HilbertLayout& layout);

// Diagonals of number-type observables over the product basis.
std::vector<double> photon_number_diagonal(const HilbertLayout& layout,
                                           int mode);
std::vector<double> excitation_diagonal(const HilbertLayout& layout);
std::vector<double> phonon_number_diagonal(const HilbertLayout& layout);

// Indicator of the top Fock level of one photon mode (truncation monitor).
std::vector<double> cutoff_indicator_diagonal(const HilbertLayout& layout,
                                              int mode);

// Product-basis index from per-site occupations (site order as above).
long basis_index(const HilbertLayout& layout,
                 const std::vector<int>& occupations);

}  // namespace pbec::lindblad
