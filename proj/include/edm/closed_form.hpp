#ifndef EDM_CLOSED_FORM_HPP
#define EDM_CLOSED_FORM_HPP

#include "edm/partition.hpp"

// Elliptic Schur-type closed form: the weighted sum E over permutations (or
// equivalently a determinant of one-column factors f_x), and the full
// closed-form G that equals the lattice partition function W on generic
// parameters.  All formulas read the boundary data from a BoundarySpec and
// parameters from ModelParams, with a21 = -a12 throughout.

namespace edm {

// Thrown when two spectral parameters coincide mod the period lattice, so
// the Vandermonde-type denominators degenerate.
struct CoincidentSpectralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gap prefactor prod_{k=1..n} prod_{j=x_k..x_{k+1}-2} [a12+j+n]/[a12+j+n-k]
// with the convention x_{n+1} = m+1; empty whenever consecutive x are tight.
cplx prefactor_xm(const BoundarySpec& spec, const ModelParams& p,
                  const EllipticContext& ctx);

// One-column symbol entering the determinant,
//   f_x(u) = [-u+v_x+a12+x+n-2]/[a12+x+n-2]
//            * prod_{k<x} [1+u-v_k]/[1] * prod_{k>x} [u-v_k]/[1],
// with n the number of rows of the spec (the formula depends on it).
cplx f_x(int x, cplx u, const BoundarySpec& spec, const ModelParams& p,
         const EllipticContext& ctx);

// E as an explicit sum over permutations of the rows (reference route,
// factorial cost; intended for n <= 6).
cplx e_perm_sum(const BoundarySpec& spec, const ModelParams& p,
                const EllipticContext& ctx);

// E as prefactor * prod_{j<k} [1]/[u_j-u_k] * det f_{x_j}(u_k), the
// determinant evaluated by LU with partial pivoting.
cplx e_determinant(const BoundarySpec& spec, const ModelParams& p,
                   const EllipticContext& ctx);

// G = prod_{j<k} [1+u_k-u_j]/[1] * E (determinant route).
cplx g_closed_form(const BoundarySpec& spec, const ModelParams& p,
                   const EllipticContext& ctx);

// Single-bracket corruption sites for sensitivity checks: each variant
// recomputes G with exactly one bracket argument shifted by delta.
enum class GMutation {
  kPrefactorNumerator,   // first gap factor's numerator
  kVandermondeFactor,    // [1+u_2-u_1] in the symmetrizing prefactor
  kDetEntryPin,          // pinning bracket of det entry (j,k) = (1,1)
  kDetEntryTail,         // first trailing product bracket of entry (1,1)
};

cplx g_closed_form_mutated(const BoundarySpec& spec, const ModelParams& p,
                           const EllipticContext& ctx, GMutation site,
                           double delta);

}  // namespace edm

#endif  // EDM_CLOSED_FORM_HPP
