#include "edm/face.hpp"

#include <array>
#include <cmath>

namespace edm {

namespace {

constexpr double kSingularFloor = 1e-12;

// Direction index of a unit step: 1 for e1, 2 for e2, 0 otherwise.
int unit_direction(const StateVector& s) {
  if (s == kE1) return 1;
  if (s == kE2) return 2;
  return 0;
}

}  // namespace

cplx guarded_ratio(cplx num, cplx den, double unit_scale) {
  if (std::abs(den) < kSingularFloor * std::max(unit_scale, 1e-30)) {
    throw SingularParameterError("denominator bracket below singularity floor");
  }
  return num / den;
}

cplx a_jk(const StateVector& a, const ModelConstants& consts, int j, int k) {
  if (j == k || j < 1 || j > 2 || k < 1 || k > 2) {
    throw std::invalid_argument("a_jk: need j != k in {1,2}");
  }
  const cplx omega = (j == 1) ? consts.omega12 : -consts.omega12;
  const double ej = (j == 1) ? ModelConstants::eps1 : ModelConstants::eps2;
  const double ek = (k == 1) ? ModelConstants::eps1 : ModelConstants::eps2;
  const double aj = static_cast<double>(j == 1 ? a.a1 : a.a2);
  const double ak = static_cast<double>(k == 1 ? a.a1 : a.a2);
  return ej * aj - ek * ak + omega;
}

cplx face_weight(const FaceLabel& f, const ModelConstants& consts,
                 const EllipticContext& ctx) {
  const StateVector db = f.b - f.a;
  const StateVector dc = f.c - f.a;
  const StateVector dd = f.d - f.a;
  const int jb = unit_direction(db);
  const int jc = unit_direction(dc);
  if (jb == 0 || jc == 0) return {0.0, 0.0};

  const cplx w = f.u - f.v;
  const double unit_scale = std::abs(bracket(1.0, ctx));

  if (jb == jc) {
    const int j = jb;
    if (dd == db + db) {
      // (e_j, e_j, 2e_j)
      const double eps = (j == 1) ? ModelConstants::eps1 : ModelConstants::eps2;
      return guarded_ratio(bracket(1.0 + eps * w, ctx), bracket(1.0, ctx), unit_scale);
    }
    const int k = 3 - j;
    const StateVector ek = (k == 1) ? kE1 : kE2;
    if (dd == db + ek) {
      // (e_j, e_j, e_j + e_k)
      const cplx ajk = a_jk(f.a, consts, j, k);
      return guarded_ratio(bracket(ajk - w, ctx), bracket(ajk, ctx), unit_scale);
    }
    return {0.0, 0.0};
  }

  // jb != jc: only (e_k, e_j, e_j + e_k) can be nonzero, with j the left
  // direction and k the top direction.
  if (dd == db + dc) {
    const int j = jc;
    const int k = jb;
    const cplx ajk = a_jk(f.a, consts, j, k);
    return guarded_ratio(bracket(w, ctx), bracket(1.0, ctx), unit_scale) *
           guarded_ratio(bracket(ajk - 1.0, ctx), bracket(ajk, ctx), unit_scale);
  }
  return {0.0, 0.0};
}

double check_yang_baxter(const StateVector& a, const StateVector& b,
                         const StateVector& c, const StateVector& d,
                         const StateVector& e, const StateVector& f,
                         cplx u1, cplx u2, cplx u3,
                         const ModelConstants& consts,
                         const EllipticContext& ctx) {
  // Outer boundary of the hexagon must consist of admissible unit steps.
  const std::array<StateVector, 6> edges = {f - e, a - f, b - a,
                                            d - e, c - d, b - c};
  for (const StateVector& s : edges) {
    if (unit_direction(s) == 0) {
      throw std::invalid_argument("check_yang_baxter: boundary steps must be e1 or e2");
    }
  }

  cplx lhs{0.0, 0.0};
  for (const StateVector& step : {kE1, kE2}) {
    const StateVector g = f + step;
    lhs += face_weight({f, g, a, b, u1, u3}, consts, ctx) *
           face_weight({e, d, f, g, u2, u3}, consts, ctx) *
           face_weight({d, c, g, b, u2, u1}, consts, ctx);
  }
  cplx rhs{0.0, 0.0};
  for (const StateVector& step : {kE1, kE2}) {
    const StateVector g = e + step;
    rhs += face_weight({e, d, g, c, u1, u3}, consts, ctx) *
           face_weight({g, c, a, b, u2, u3}, consts, ctx) *
           face_weight({e, g, f, a, u2, u1}, consts, ctx);
  }
  return rel_residual(lhs, rhs);
}

}  // namespace edm
