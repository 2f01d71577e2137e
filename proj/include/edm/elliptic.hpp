#ifndef EDM_ELLIPTIC_HPP
#define EDM_ELLIPTIC_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

// Elliptic kernel: the theta function H(u), its half-periods K1/K2 derived
// from a nome q in (0,1), and the crossing bracket [u] = H(lambda*u) that
// every weight in this library is built from.  All evaluations use infinite
// products truncated at a tolerance-controlled index, so results are
// deterministic for a fixed context.

namespace edm {

using cplx = std::complex<double>;

// Thrown when a truncated product fails to reach its tolerance within the
// configured number of terms (q too close to 1 for the requested accuracy).
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable bundle of nome-derived quantities.  Build one with make_context
// and pass it by const reference; every numeric routine in the library takes
// its precision policy from here.
struct EllipticContext {
  double q = 0.0;            // nome, 0 < q < 1
  cplx lambda{1.0, 0.0};     // crossing parameter scaling the bracket
  double trunc_eps = 1e-16;  // product truncation tolerance
  int max_terms = 256;       // hard cap on product terms
  double k1 = 0.0;           // real half-period
  double k2 = 0.0;           // imaginary half-period, K2 = -(K1/pi) log q
  cplx tau{0.0, 0.0};        // modular parameter i*K2/K1
  int h_terms = 0;           // truncation index used by theta_h
};

// Computes K1 from its defining product, truncating once the per-factor
// deviation from 1 drops below trunc_eps.  Throws std::domain_error for
// arguments outside the domain and ConvergenceError if max_terms is reached
// first.
EllipticContext make_context(double q, cplx lambda = cplx{1.0, 0.0},
                             double trunc_eps = 1e-16, int max_terms = 256);

// The odd theta function
//   H(u) = 2 q^{1/4} sin(pi u / 2K1)
//          prod_{n>=1} (1 - 2 q^{2n} cos(pi u / K1) + q^{4n}) (1 - q^{2n}),
// satisfying H(u + 2mK1) = (-1)^m H(u) and
// H(u + 2inK2) = (-1)^n q^{-n^2} exp(-i n pi u / K1) H(u).
cplx theta_h(cplx u, const EllipticContext& ctx);

// Crossing bracket [u] = H(lambda u).
cplx bracket(cplx u, const EllipticContext& ctx);

// Relative residual |a - b| / max(|a|, |b|, 1e-30); every "approximately
// equal" check in the library reports this quantity.
double rel_residual(cplx a, cplx b);

// Quasi-periodicity character of a degree-N theta polynomial in the rescaled
// variable y = lambda*v / 2K1: a holomorphic f with
//   f(y + 1)   = chi1 * f(y)
//   f(y + tau) = chitau * exp(-2 pi i N y - pi i N tau) * f(y).
struct Character {
  cplx chi1{1.0, 0.0};
  cplx chitau{1.0, 0.0};
  int degree = 0;
};

struct MembershipReport {
  double residual_one = 0.0;  // max residual of the period-1 relation
  double residual_tau = 0.0;  // max residual of the period-tau relation
  int samples = 0;
};

// Samples the two defining relations of the character at random points of a
// box well inside one period cell.  f is a function of the rescaled variable
// y; the caller decides pass/fail against its tolerance.
MembershipReport check_theta_membership(const std::function<cplx(cplx)>& f,
                                        const Character& chi,
                                        const EllipticContext& ctx,
                                        int samples, std::uint64_t seed = 0);

struct ThetaEqualityReport {
  double max_residual = 0.0;
  bool equal = false;
};

// Decides equality of two degree-N theta polynomials with common character
// from their values at N pinning points (plus a few extra random samples as
// a guard).  The points must be pairwise distinct mod the period lattice and
// the character must be generic; violations raise std::invalid_argument.
ThetaEqualityReport equal_as_theta_polynomials(
    const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& g,
    const Character& chi, const std::vector<cplx>& points,
    const EllipticContext& ctx, double tol, int extra_samples = 4,
    std::uint64_t seed = 0);

}  // namespace edm

#endif  // EDM_ELLIPTIC_HPP
