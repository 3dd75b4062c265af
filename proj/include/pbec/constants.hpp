#pragma once

// SI constants (2019 redefinition). mu0 is derived from eps0 and c so that
// mu0*eps0*c^2 == 1 holds to machine precision; several decay-rate identities
// in the test suite rely on that exactness.
namespace pbec::constants {

inline constexpr double c0      = 299792458.0;        // m/s
inline constexpr double hbar    = 1.054571817e-34;    // J s
inline constexpr double eps0    = 8.8541878128e-12;   // F/m
inline constexpr double mu0     = 1.0 / (eps0 * c0 * c0);  // H/m
inline constexpr double k_B     = 1.380649e-23;       // J/K
inline constexpr double pi      = 3.14159265358979323846;
inline constexpr double debye   = 3.33564095198152e-30;  // C m

}  // namespace pbec::constants
