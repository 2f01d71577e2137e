#include "edm/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace edm {

namespace {

constexpr double kPi = std::numbers::pi;

// Uniform point in [re_lo,re_hi] x i[im_lo,im_hi].
cplx sample_box(std::mt19937_64& rng, double re_lo, double re_hi,
                double im_lo, double im_hi) {
  std::uniform_real_distribution<double> re(re_lo, re_hi);
  std::uniform_real_distribution<double> im(im_lo, im_hi);
  return {re(rng), im(rng)};
}

// Distance of w from the lattice Z + tau*Z (tau purely imaginary).
double lattice_distance(cplx w, cplx tau) {
  const double s = w.real();
  const double t = w.imag() / tau.imag();
  const cplx nearest = std::round(s) + std::round(t) * tau;
  return std::abs(w - nearest);
}

}  // namespace

EllipticContext make_context(double q, cplx lambda, double trunc_eps,
                             int max_terms) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("make_context: q must lie in (0,1)");
  }
  if (!(trunc_eps > 0.0)) {
    throw std::domain_error("make_context: trunc_eps must be positive");
  }
  if (max_terms < 1) {
    throw std::domain_error("make_context: max_terms must be at least 1");
  }
  if (std::abs(lambda) == 0.0) {
    throw std::domain_error("make_context: lambda must be nonzero");
  }

  EllipticContext ctx;
  ctx.q = q;
  ctx.lambda = lambda;
  ctx.trunc_eps = trunc_eps;
  ctx.max_terms = max_terms;

  // K1 = (pi/2) prod_n ((1+q^{2n-1})/(1-q^{2n-1}) * (1-q^{2n})/(1+q^{2n}))^2,
  // truncated once a factor deviates from 1 by less than trunc_eps.
  double prod = 1.0;
  bool converged = false;
  double qa = q;        // q^{2n-1}
  double qb = q * q;    // q^{2n}
  for (int n = 1; n <= max_terms; ++n) {
    const double f = ((1.0 + qa) / (1.0 - qa)) * ((1.0 - qb) / (1.0 + qb));
    const double f2 = f * f;
    prod *= f2;
    if (std::abs(f2 - 1.0) < trunc_eps) {
      converged = true;
      break;
    }
    qa *= q * q;
    qb *= q * q;
  }
  if (!converged) {
    throw ConvergenceError("make_context: K1 product did not converge within max_terms");
  }
  ctx.k1 = 0.5 * kPi * prod;
  ctx.k2 = -(ctx.k1 / kPi) * std::log(q);
  ctx.tau = cplx{0.0, ctx.k2 / ctx.k1};

  // Truncation index for theta_h: smallest n with q^{2n} < trunc_eps.
  const double n_star = std::log(trunc_eps) / (2.0 * std::log(q));
  ctx.h_terms = std::clamp(static_cast<int>(std::ceil(n_star)), 1, max_terms);
  return ctx;
}

cplx theta_h(cplx u, const EllipticContext& ctx) {
  const cplx z = kPi * u / (2.0 * ctx.k1);
  const cplx c = std::cos(2.0 * z);
  cplx h = 2.0 * std::pow(ctx.q, 0.25) * std::sin(z);
  double q2n = 1.0;
  for (int n = 1; n <= ctx.h_terms; ++n) {
    q2n *= ctx.q * ctx.q;
    h *= (1.0 - 2.0 * q2n * c + q2n * q2n) * (1.0 - q2n);
  }
  return h;
}

cplx bracket(cplx u, const EllipticContext& ctx) {
  return theta_h(ctx.lambda * u, ctx);
}

double rel_residual(cplx a, cplx b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) / scale;
}

MembershipReport check_theta_membership(const std::function<cplx(cplx)>& f,
                                        const Character& chi,
                                        const EllipticContext& ctx,
                                        int samples, std::uint64_t seed) {
  if (samples < 1) {
    throw std::invalid_argument("check_theta_membership: samples must be positive");
  }
  std::mt19937_64 rng(seed);
  const double im_half = 0.15 * ctx.tau.imag();
  MembershipReport rep;
  rep.samples = samples;
  const double n = chi.degree;
  for (int s = 0; s < samples; ++s) {
    const cplx y = sample_box(rng, -0.45, 0.45, -im_half, im_half);
    const cplx f0 = f(y);
    rep.residual_one =
        std::max(rep.residual_one, rel_residual(f(y + 1.0), chi.chi1 * f0));
    const cplx mult =
        chi.chitau * std::exp(cplx{0.0, -1.0} * (2.0 * kPi * n * y + kPi * n * ctx.tau));
    rep.residual_tau =
        std::max(rep.residual_tau, rel_residual(f(y + ctx.tau), mult * f0));
  }
  return rep;
}

ThetaEqualityReport equal_as_theta_polynomials(
    const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& g,
    const Character& chi, const std::vector<cplx>& points,
    const EllipticContext& ctx, double tol, int extra_samples,
    std::uint64_t seed) {
  const int n = chi.degree;
  if (static_cast<int>(points.size()) != n) {
    throw std::invalid_argument(
        "equal_as_theta_polynomials: need exactly degree-many points");
  }
  constexpr double kGuard = 1e-8;
  for (std::size_t j = 0; j < points.size(); ++j) {
    for (std::size_t k = j + 1; k < points.size(); ++k) {
      if (lattice_distance(points[j] - points[k], ctx.tau) < kGuard) {
        throw std::invalid_argument(
            "equal_as_theta_polynomials: points coincide mod the period lattice");
      }
    }
  }
  // The zeros of any nonzero member of the character's space sum to alpha
  // mod the lattice; evaluation at points with sum(y_k) = alpha would admit
  // a vanishing counterexample, so reject that configuration.
  const cplx sign = (n % 2 == 0) ? cplx{1.0, 0.0} : cplx{-1.0, 0.0};
  const cplx alpha = std::log(sign * chi.chitau) / cplx{0.0, 2.0 * kPi};
  cplx sum = -alpha;
  for (const cplx& y : points) sum += y;
  if (lattice_distance(sum, ctx.tau) < kGuard) {
    throw std::invalid_argument(
        "equal_as_theta_polynomials: point sum is degenerate for this character");
  }

  ThetaEqualityReport rep;
  for (const cplx& y : points) {
    rep.max_residual = std::max(rep.max_residual, rel_residual(f(y), g(y)));
  }
  std::mt19937_64 rng(seed);
  const double im_half = 0.15 * ctx.tau.imag();
  for (int s = 0; s < extra_samples; ++s) {
    const cplx y = sample_box(rng, -0.45, 0.45, -im_half, im_half);
    rep.max_residual = std::max(rep.max_residual, rel_residual(f(y), g(y)));
  }
  rep.equal = rep.max_residual <= tol;
  return rep;
}

}  // namespace edm
