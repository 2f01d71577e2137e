#ifndef EDM_FACE_HPP
#define EDM_FACE_HPP

#include <cstdint>

#include "edm/elliptic.hpp"

// Interaction-round-a-face weights of the elliptic gl(1|1) face model of
// Deguchi and Martin.  States live on Z^2, adjacent states differ by a unit
// vector e1 or e2, and a face carries a nonzero weight for exactly three
// corner patterns (up to the choice of directions j != k).

namespace edm {

// Thrown when a weight denominator falls below the singularity floor, i.e.
// the parameters sit on (or numerically too close to) a pole.
struct SingularParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateVector {
  std::int64_t a1 = 0;
  std::int64_t a2 = 0;

  friend StateVector operator+(StateVector l, StateVector r) {
    return {l.a1 + r.a1, l.a2 + r.a2};
  }
  friend StateVector operator-(StateVector l, StateVector r) {
    return {l.a1 - r.a1, l.a2 - r.a2};
  }
  friend bool operator==(StateVector l, StateVector r) {
    return l.a1 == r.a1 && l.a2 == r.a2;
  }
};

inline constexpr StateVector kE1{1, 0};
inline constexpr StateVector kE2{0, 1};

// Model constants: the gradings eps_1 = +1, eps_2 = -1 are fixed by the
// gl(1|1) structure; omega12 = -omega21 is a free complex offset.
struct ModelConstants {
  cplx omega12{0.0, 0.0};
  static constexpr int eps1 = 1;
  static constexpr int eps2 = -1;
};

// a_jk = eps_j a_j - eps_k a_k + omega_jk for j != k in {1,2}.
cplx a_jk(const StateVector& a, const ModelConstants& consts, int j, int k);

// num / den with a pole guard: throws SingularParameterError when |den|
// falls below 1e-12 relative to unit_scale (callers pass |[1]|).
cplx guarded_ratio(cplx num, cplx den, double unit_scale);

// One face with corners a (top-left), b (top-right), c (bottom-left),
// d (bottom-right), spectral parameter u and column inhomogeneity v.
struct FaceLabel {
  StateVector a, b, c, d;
  cplx u{0.0, 0.0};
  cplx v{0.0, 0.0};
};

// Boltzmann weight of a face.  With w = u - v and writing the corner pattern
// as (b-a, c-a, d-a):
//   (e_j, e_j, 2e_j)      -> [1 + eps_j w] / [1]
//   (e_k, e_j, e_j+e_k)   -> [w] [a_jk - 1] / ([1] [a_jk])       (j != k)
//   (e_j, e_j, e_j+e_k)   -> [a_jk - w] / [a_jk]                 (j != k)
// and exactly 0 for every other pattern.  a_jk is read off the top-left
// corner.  Throws SingularParameterError when a required denominator is
// below the floor (1e-12 relative to the unit bracket).
cplx face_weight(const FaceLabel& f, const ModelConstants& consts,
                 const EllipticContext& ctx);

// Residual of the face-type Yang-Baxter equation on the hexagon with outer
// corners a..f (see check for the boundary admissibility requirement):
//   sum_g W(f,g;a,b|u1,u3) W(e,d;f,g|u2,u3) W(d,c;g,b|u2,u1)
//     = sum_g W(e,d;g,c|u1,u3) W(g,c;a,b|u2,u3) W(e,g;f,a|u2,u1),
// where each side has at most two contributing internal states g.  Returns
// the relative residual of the two sides.
double check_yang_baxter(const StateVector& a, const StateVector& b,
                         const StateVector& c, const StateVector& d,
                         const StateVector& e, const StateVector& f,
                         cplx u1, cplx u2, cplx u3,
                         const ModelConstants& consts,
                         const EllipticContext& ctx);

}  // namespace edm

#endif  // EDM_FACE_HPP
