#ifndef EDM_VERIFY_HPP
#define EDM_VERIFY_HPP

#include <iosfwd>
#include <string>

#include "edm/closed_form.hpp"

// Verification campaign: genericity sampling with rejection certificates,
// the property suite (quasi-periodicity character, exchange, recursions,
// initial condition - on both the lattice sum and the closed form), the
// lattice-vs-closed-form sweep, Yang-Baxter sweeps, and mutation
// sensitivity.  Every check produces one CheckRecord; reports serialize to
// JSON lines or CSV.

namespace edm {

// Thrown when rejection sampling fails to find generic parameters within
// the configured retry budget.
struct ExhaustionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Complex rectangle in units of K1/|lambda|.
struct SamplingBox {
  double re_lo = -1.0;
  double re_hi = 1.0;
  double im_lo = -0.3;
  double im_hi = 0.3;
};

struct GenericitySampler {
  std::uint64_t rng_seed = 0;
  SamplingBox u_box{};
  SamplingBox v_box{};
  SamplingBox a12_box{};
  double floor = 1e-6;    // denominator floor relative to |[1]|
  int max_retries = 200;
};

// True iff all denominator brackets reachable from (spec, p) - the unit
// bracket, [a12+t] for t = 0..m+n, and the spectral differences [u_j-u_k]
// - stay above floor * |[1]|.
bool genericity_certificate(const BoundarySpec& spec, const ModelParams& p,
                            const EllipticContext& ctx, double floor);

// Rejection-samples params until the certificate passes; deterministic for
// a fixed seed.  Throws ExhaustionError after max_retries rejections.
ModelParams sample_generic(const BoundarySpec& spec,
                           const GenericitySampler& sampler,
                           const EllipticContext& ctx);

// Quasi-periodicity character of W (and G) in the rescaled last
// inhomogeneity y = lambda*v_m / 2K1, for specs with x_n = m:
//   chi(1) = (-1)^n,  chi(tau) = (-1)^n exp(-i pi lambda C / K1),
//   C = a12 + m + n - 2 - sum_j u_j.
Character w_character(const BoundarySpec& spec, const ModelParams& p,
                      const EllipticContext& ctx);

struct Tolerances {
  double theta = 1e-10;    // theta-function identities
  double row = 1e-9;       // single-row / single-column identities
  double lattice = 1e-8;   // full-lattice comparisons
  double exact = 1e-12;    // closed bracket products, no summation
  double scale = 1.0;      // global multiplier applied by effective()
  double effective(double base) const { return base * scale; }
};

struct CheckRecord {
  std::string check_id;
  int m = 0;
  int n = 0;
  std::vector<int> x;
  std::uint64_t seed = 0;
  double residual = -1.0;  // -1 for skip/error records
  double tol = 0.0;
  std::string status;      // "pass" | "fail" | "skip" | "error"
  double ms = 0.0;
};

struct VerificationReport {
  std::vector<CheckRecord> records;

  bool all_passed() const;     // no "fail" and no "error" records
  double max_residual() const;
  std::size_t count(const std::string& status) const;
  void write_jsonl(std::ostream& os) const;
  void write_csv(std::ostream& os) const;
};

// Runs every applicable identity check on one boundary spec for `seeds`
// generic parameter draws (seed values sampler.rng_seed + 0..seeds-1).
// Inapplicable checks are recorded as skips; errors never abort the run.
VerificationReport run_property_suite(const BoundarySpec& spec,
                                      const GenericitySampler& sampler,
                                      const EllipticContext& ctx,
                                      const Tolerances& tol, int seeds = 20,
                                      double cap = kDefaultEnumCap);

// Compares brute force, transfer evaluation and both closed-form routes on
// every boundary spec with n <= min(m, n_max), m <= m_max.  Brute-force
// capacity overruns are recorded as skips; the transfer-vs-closed-form
// comparison still runs.
VerificationReport theorem_sweep(int m_max, int n_max, int seeds_per_spec,
                                 const GenericitySampler& sampler,
                                 const EllipticContext& ctx,
                                 const Tolerances& tol,
                                 double cap = kDefaultEnumCap);

// Yang-Baxter residuals on `count` random admissible hexagons.
VerificationReport yang_baxter_sweep(int count,
                                     const GenericitySampler& sampler,
                                     const EllipticContext& ctx,
                                     const Tolerances& tol);

// Fraction of seeds for which corrupting one bracket of G by delta makes
// the lattice-vs-closed-form comparison fail at the lattice tolerance.
double mutation_failure_rate(const BoundarySpec& spec,
                             const GenericitySampler& sampler,
                             const EllipticContext& ctx, GMutation site,
                             int seeds, double delta, const Tolerances& tol);

}  // namespace edm

#endif  // EDM_VERIFY_HPP
