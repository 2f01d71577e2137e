#include "edm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"

namespace edm {

namespace {

constexpr double kPi = std::numbers::pi;

// Portable uniform double in [0,1): 53 random mantissa bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

cplx draw_box(std::mt19937_64& rng, const SamplingBox& box, double unit) {
  const double re = box.re_lo + (box.re_hi - box.re_lo) * uniform01(rng);
  const double im = box.im_lo + (box.im_hi - box.im_lo) * uniform01(rng);
  return cplx{re, im} * unit;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Identity checks.  Each returns the relative residual of one relation for
// fixed generic parameters; the suite turns them into records.

template <typename Eval>
double membership_residual(const BoundarySpec& spec, const ModelParams& p,
                           const EllipticContext& ctx, Eval&& eval,
                           std::uint64_t seed) {
  auto f = [&](cplx y) {
    ModelParams q = p;
    q.v[spec.m - 1] = 2.0 * ctx.k1 * y / ctx.lambda;
    return eval(spec, q, ctx);
  };
  const MembershipReport r =
      check_theta_membership(f, w_character(spec, p, ctx), ctx, 4, seed);
  return std::max(r.residual_one, r.residual_tau);
}

template <typename Eval>
double adjacent_exchange_residual(const BoundarySpec& spec,
                                  const ModelParams& p,
                                  const EllipticContext& ctx, Eval&& eval) {
  double worst = 0.0;
  for (int j = 0; j + 1 < spec.n; ++j) {
    ModelParams q = p;
    std::swap(q.u[j], q.u[j + 1]);
    const cplx lhs = bracket(1.0 + p.u[j] - p.u[j + 1], ctx) * eval(spec, p, ctx);
    const cplx rhs = bracket(1.0 + p.u[j + 1] - p.u[j], ctx) * eval(spec, q, ctx);
    worst = std::max(worst, rel_residual(lhs, rhs));
  }
  return worst;
}

// General permuted form: prod over inversions of [1+u_{s(k)}-u_{s(j)}] times
// the unpermuted value against the mirrored product times the permuted one.
template <typename Eval>
double sigma_exchange_residual(const BoundarySpec& spec, const ModelParams& p,
                               const EllipticContext& ctx,
                               const std::vector<int>& sigma, Eval&& eval) {
  cplx lf{1.0, 0.0};
  cplx rf{1.0, 0.0};
  for (int j = 0; j < spec.n; ++j) {
    for (int k = j + 1; k < spec.n; ++k) {
      if (sigma[j] > sigma[k]) {
        lf *= bracket(1.0 + p.u[sigma[k]] - p.u[sigma[j]], ctx);
        rf *= bracket(1.0 + p.u[sigma[j]] - p.u[sigma[k]], ctx);
      }
    }
  }
  ModelParams q = p;
  for (int j = 0; j < spec.n; ++j) q.u[j] = p.u[sigma[j]];
  return rel_residual(lf * eval(spec, p, ctx), rf * eval(spec, q, ctx));
}

// Pinned recursion at v_m = u_n (requires x_n = m): the partition function
// factorizes onto the (m-1, n-1) lattice with a12 shifted by one.
template <typename Eval>
double recursion_pin_residual(const BoundarySpec& spec, const ModelParams& p,
                              const EllipticContext& ctx, Eval&& eval) {
  const cplx un = p.u[spec.n - 1];
  ModelParams pinned = p;
  pinned.v[spec.m - 1] = un;
  const cplx lhs = eval(spec, pinned, ctx);

  const double unit = std::abs(bracket(1.0, ctx));
  cplx factor{1.0, 0.0};
  for (int j = 0; j + 1 < spec.n; ++j) {
    factor *= guarded_ratio(bracket(1.0 - p.u[j] + un, ctx), bracket(1.0, ctx),
                            unit);
  }
  for (int j = 0; j + 1 < spec.m; ++j) {
    factor *= guarded_ratio(bracket(1.0 + un - p.v[j], ctx), bracket(1.0, ctx),
                            unit);
  }
  cplx reduced{1.0, 0.0};
  if (spec.n > 1) {
    const BoundarySpec rspec = make_boundary_spec(
        spec.m - 1, spec.n - 1,
        std::vector<int>(spec.x.begin(), spec.x.end() - 1));
    ModelParams rp;
    rp.u.assign(p.u.begin(), p.u.end() - 1);
    rp.v.assign(p.v.begin(), p.v.end() - 1);
    rp.a12 = p.a12 + 1.0;
    reduced = eval(rspec, rp, ctx);
  }
  return rel_residual(lhs, factor * reduced);
}

// Column-stripping recursion for x_n < m: the m-th column factors off.
template <typename Eval>
double recursion_strip_residual(const BoundarySpec& spec, const ModelParams& p,
                                const EllipticContext& ctx, Eval&& eval) {
  const cplx lhs = eval(spec, p, ctx);
  const double unit = std::abs(bracket(1.0, ctx));
  const cplx a21 = -p.a12;
  const double m = spec.m;
  const double n = spec.n;
  cplx factor = guarded_ratio(bracket(a21 - m - n + 1.0, ctx),
                              bracket(a21 - m + 1.0, ctx), unit);
  for (int j = 0; j < spec.n; ++j) {
    factor *= guarded_ratio(bracket(p.u[j] - p.v[spec.m - 1], ctx),
                            bracket(1.0, ctx), unit);
  }
  const BoundarySpec rspec = make_boundary_spec(spec.m - 1, spec.n, spec.x);
  ModelParams rp = p;
  rp.v.pop_back();
  return rel_residual(lhs, factor * eval(rspec, rp, ctx));
}

// Closed one-row formula for n = 1, x = (m).
template <typename Eval>
double initial_residual(const BoundarySpec& spec, const ModelParams& p,
                        const EllipticContext& ctx, Eval&& eval) {
  const double unit = std::abs(bracket(1.0, ctx));
  const cplx u1 = p.u[0];
  cplx expected = guarded_ratio(
      bracket(-u1 + p.v[spec.m - 1] + p.a12 + static_cast<double>(spec.m - 1), ctx),
      bracket(p.a12 + static_cast<double>(spec.m - 1), ctx), unit);
  for (int k = 0; k + 1 < spec.m; ++k) {
    expected *= guarded_ratio(bracket(1.0 + u1 - p.v[k], ctx),
                              bracket(1.0, ctx), unit);
  }
  return rel_residual(eval(spec, p, ctx), expected);
}

cplx eval_w_dp(const BoundarySpec& s, const ModelParams& p,
               const EllipticContext& c) {
  return evaluate_w_dp(s, p, c);
}

cplx eval_g(const BoundarySpec& s, const ModelParams& p,
            const EllipticContext& c) {
  return g_closed_form(s, p, c);
}

// One random admissible hexagon: both boundary paths share the same number
// of e2 steps, so they meet again after three steps.
struct Hexagon {
  StateVector a, b, c, d, e, f;
};

Hexagon draw_hexagon(std::mt19937_64& rng) {
  const auto rand_int = [&rng](int lo, int hi) {
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
  };
  const int k = rand_int(0, 3);
  const auto draw_path = [&](std::array<StateVector, 3>& path) {
    std::array<int, 3> is_e2{};
    for (int i = 0; i < k; ++i) is_e2[i] = 1;
    for (int i = 2; i > 0; --i) std::swap(is_e2[i], is_e2[rand_int(0, i)]);
    for (int i = 0; i < 3; ++i) path[i] = is_e2[i] ? kE2 : kE1;
  };
  Hexagon h;
  h.e = StateVector{rand_int(-3, 3), rand_int(-3, 3)};
  std::array<StateVector, 3> top{}, left{};
  draw_path(top);
  draw_path(left);
  h.d = h.e + top[0];
  h.c = h.d + top[1];
  h.b = h.c + top[2];
  h.f = h.e + left[0];
  h.a = h.f + left[1];
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------

bool genericity_certificate(const BoundarySpec& spec, const ModelParams& p,
                            const EllipticContext& ctx, double floor) {
  const double unit = std::abs(bracket(1.0, ctx));
  if (unit < 1e-30) return false;
  for (int t = 0; t <= spec.m + spec.n; ++t) {
    if (std::abs(bracket(p.a12 + static_cast<double>(t), ctx)) < floor * unit) {
      return false;
    }
  }
  for (std::size_t j = 0; j < p.u.size(); ++j) {
    for (std::size_t k = j + 1; k < p.u.size(); ++k) {
      if (std::abs(bracket(p.u[j] - p.u[k], ctx)) < floor * unit) return false;
    }
  }
  return true;
}

ModelParams sample_generic(const BoundarySpec& spec,
                           const GenericitySampler& sampler,
                           const EllipticContext& ctx) {
  std::mt19937_64 rng(sampler.rng_seed);
  const double unit = ctx.k1 / std::abs(ctx.lambda);
  for (int attempt = 0; attempt < sampler.max_retries; ++attempt) {
    ModelParams p;
    p.u.reserve(spec.n);
    p.v.reserve(spec.m);
    for (int j = 0; j < spec.n; ++j) p.u.push_back(draw_box(rng, sampler.u_box, unit));
    for (int k = 0; k < spec.m; ++k) p.v.push_back(draw_box(rng, sampler.v_box, unit));
    p.a12 = draw_box(rng, sampler.a12_box, unit);
    if (genericity_certificate(spec, p, ctx, sampler.floor)) return p;
  }
  throw ExhaustionError("sample_generic: no generic draw within max_retries");
}

Character w_character(const BoundarySpec& spec, const ModelParams& p,
                      const EllipticContext& ctx) {
  cplx sum_u{0.0, 0.0};
  for (const cplx& u : p.u) sum_u += u;
  const cplx c = p.a12 + static_cast<double>(spec.m + spec.n - 2) - sum_u;
  const cplx sign = (spec.n % 2 == 0) ? cplx{1.0, 0.0} : cplx{-1.0, 0.0};
  Character chi;
  chi.chi1 = sign;
  chi.chitau = sign * std::exp(cplx{0.0, -1.0} * kPi * ctx.lambda * c / ctx.k1);
  chi.degree = spec.n;
  return chi;
}

bool VerificationReport::all_passed() const {
  return std::none_of(records.begin(), records.end(), [](const CheckRecord& r) {
    return r.status == "fail" || r.status == "error";
  });
}

double VerificationReport::max_residual() const {
  double worst = 0.0;
  for (const CheckRecord& r : records) {
    if (r.status == "pass" || r.status == "fail") {
      worst = std::max(worst, r.residual);
    }
  }
  return worst;
}

std::size_t VerificationReport::count(const std::string& status) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(),
                    [&](const CheckRecord& r) { return r.status == status; }));
}

void VerificationReport::write_jsonl(std::ostream& os) const {
  for (const CheckRecord& r : records) {
    const nlohmann::json j = {{"check_id", r.check_id}, {"M", r.m},
                              {"N", r.n},               {"x", r.x},
                              {"seed", r.seed},         {"residual", r.residual},
                              {"tol", r.tol},           {"status", r.status},
                              {"ms", r.ms}};
    os << j.dump() << "\n";
  }
}

void VerificationReport::write_csv(std::ostream& os) const {
  os << "check_id,M,N,x,seed,residual,tol,status,ms\n";
  for (const CheckRecord& r : records) {
    os << r.check_id << ',' << r.m << ',' << r.n << ',';
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      if (i) os << ';';
      os << r.x[i];
    }
    os << ',' << r.seed << ',' << fmt17(r.residual) << ',' << fmt17(r.tol)
       << ',' << r.status << ',' << fmt17(r.ms) << "\n";
  }
}

namespace {

// Shared record factory: runs one residual computation, times it, and files
// pass/fail/skip/error.  CapacityError counts as a skip (the check did not
// apply at this scale); other failures are errors and never abort the run.
template <typename Fn>
void push_record(VerificationReport& rep, const BoundarySpec& spec,
                 std::uint64_t seed, const std::string& id, double tol,
                 bool applicable, Fn&& fn) {
  CheckRecord rec;
  rec.check_id = id;
  rec.m = spec.m;
  rec.n = spec.n;
  rec.x = spec.x;
  rec.seed = seed;
  rec.tol = tol;
  if (!applicable) {
    rec.status = "skip";
    rep.records.push_back(std::move(rec));
    return;
  }
  const auto t0 = Clock::now();
  try {
    rec.residual = fn();
    rec.status = (rec.residual <= tol) ? "pass" : "fail";
  } catch (const CapacityError&) {
    rec.residual = -1.0;
    rec.status = "skip";
  } catch (const std::exception&) {
    rec.residual = -1.0;
    rec.status = "error";
  }
  rec.ms = elapsed_ms(t0);
  rep.records.push_back(std::move(rec));
}

}  // namespace

VerificationReport run_property_suite(const BoundarySpec& spec,
                                      const GenericitySampler& sampler,
                                      const EllipticContext& ctx,
                                      const Tolerances& tol, int seeds,
                                      double cap) {
  VerificationReport rep;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = sampler.rng_seed + static_cast<std::uint64_t>(s);
    GenericitySampler smp = sampler;
    smp.rng_seed = seed;
    ModelParams p;
    try {
      p = sample_generic(spec, smp, ctx);
    } catch (const std::exception&) {
      push_record(rep, spec, seed, "sample.generic", 0.0, true,
                  []() -> double { throw ExhaustionError("resampled"); });
      continue;
    }
    const bool pinned = spec.x.back() == spec.m;
    const bool single = spec.n == 1;

    push_record(rep, spec, seed, "w.qp.character", tol.effective(tol.lattice),
                pinned, [&] {
                  return membership_residual(spec, p, ctx, eval_w_dp, seed);
                });
    push_record(rep, spec, seed, "w.exchange", tol.effective(tol.row),
                spec.n >= 2, [&] {
                  return adjacent_exchange_residual(spec, p, ctx, eval_w_dp);
                });
    push_record(rep, spec, seed, "w.recursion.pin", tol.effective(tol.row),
                pinned, [&] {
                  return recursion_pin_residual(spec, p, ctx, eval_w_dp);
                });
    push_record(rep, spec, seed, "w.recursion.strip", tol.effective(tol.row),
                !pinned, [&] {
                  return recursion_strip_residual(spec, p, ctx, eval_w_dp);
                });
    push_record(rep, spec, seed, "w.initial", tol.effective(tol.exact),
                single && pinned, [&] {
                  return initial_residual(spec, p, ctx, eval_w_dp);
                });
    push_record(rep, spec, seed, "w.decomposition", tol.effective(tol.row),
                pinned, [&] { return decompose_check(spec, p, ctx, cap); });

    push_record(rep, spec, seed, "g.qp.character", tol.effective(tol.lattice),
                pinned, [&] {
                  return membership_residual(spec, p, ctx, eval_g, seed);
                });
    push_record(rep, spec, seed, "g.exchange", tol.effective(tol.row),
                spec.n >= 2, [&] {
                  double worst = adjacent_exchange_residual(spec, p, ctx, eval_g);
                  std::mt19937_64 rng(seed ^ 0x5167ull);
                  std::vector<int> sigma(spec.n);
                  std::iota(sigma.begin(), sigma.end(), 0);
                  for (int j = spec.n - 1; j > 0; --j) {
                    const int i = static_cast<int>(uniform01(rng) * (j + 1));
                    std::swap(sigma[j], sigma[i]);
                  }
                  worst = std::max(
                      worst, sigma_exchange_residual(spec, p, ctx, sigma, eval_g));
                  return worst;
                });
    push_record(rep, spec, seed, "g.recursion.pin", tol.effective(tol.row),
                pinned, [&] {
                  return recursion_pin_residual(spec, p, ctx, eval_g);
                });
    push_record(rep, spec, seed, "g.recursion.strip", tol.effective(tol.row),
                !pinned, [&] {
                  return recursion_strip_residual(spec, p, ctx, eval_g);
                });
    push_record(rep, spec, seed, "g.initial", tol.effective(tol.exact),
                single && pinned, [&] {
                  return initial_residual(spec, p, ctx, eval_g);
                });

    push_record(rep, spec, seed, "theorem.wbf_vs_wdp",
                tol.effective(tol.theta), true, [&] {
                  return rel_residual(evaluate_w_bruteforce(spec, p, ctx, cap),
                                      evaluate_w_dp(spec, p, ctx));
                });
    push_record(rep, spec, seed, "theorem.wdp_vs_gdet",
                tol.effective(tol.lattice), true, [&] {
                  return rel_residual(evaluate_w_dp(spec, p, ctx),
                                      g_closed_form(spec, p, ctx));
                });
    push_record(rep, spec, seed, "theorem.gdet_vs_gperm",
                tol.effective(tol.row), spec.n <= 6, [&] {
                  return rel_residual(e_determinant(spec, p, ctx),
                                      e_perm_sum(spec, p, ctx));
                });

    push_record(rep, spec, seed, "ybr.sweep", tol.effective(tol.lattice), true,
                [&] {
                  GenericitySampler hx = sampler;
                  hx.rng_seed = seed ^ 0x9e3779b97f4a7c15ull;
                  const VerificationReport r =
                      yang_baxter_sweep(8, hx, ctx, tol);
                  if (r.count("error") > 0) {
                    throw ExhaustionError("hexagon sampling exhausted");
                  }
                  return r.max_residual();
                });
  }
  return rep;
}

VerificationReport theorem_sweep(int m_max, int n_max, int seeds_per_spec,
                                 const GenericitySampler& sampler,
                                 const EllipticContext& ctx,
                                 const Tolerances& tol, double cap) {
  if (m_max < 1 || n_max < 1 || seeds_per_spec < 1) {
    throw std::invalid_argument("theorem_sweep: bounds and seed count must be positive");
  }
  VerificationReport rep;
  for (int m = 1; m <= m_max; ++m) {
    for (int n = 1; n <= std::min(n_max, m); ++n) {
      std::vector<int> x(n);
      std::iota(x.begin(), x.end(), 1);
      while (true) {
        const BoundarySpec spec = make_boundary_spec(m, n, x);
        for (int s = 0; s < seeds_per_spec; ++s) {
          const std::uint64_t seed =
              sampler.rng_seed + static_cast<std::uint64_t>(s);
          GenericitySampler smp = sampler;
          smp.rng_seed = seed;
          ModelParams p;
          try {
            p = sample_generic(spec, smp, ctx);
          } catch (const std::exception&) {
            push_record(rep, spec, seed, "sample.generic", 0.0, true,
                        []() -> double { throw ExhaustionError("resampled"); });
            continue;
          }
          const cplx w_dp = evaluate_w_dp(spec, p, ctx);
          push_record(rep, spec, seed, "theorem.wbf_vs_wdp",
                      tol.effective(tol.theta), true, [&] {
                        return rel_residual(
                            evaluate_w_bruteforce(spec, p, ctx, cap), w_dp);
                      });
          push_record(rep, spec, seed, "theorem.wdp_vs_gdet",
                      tol.effective(tol.lattice), true, [&] {
                        return rel_residual(w_dp, g_closed_form(spec, p, ctx));
                      });
          push_record(rep, spec, seed, "theorem.gdet_vs_gperm",
                      tol.effective(tol.row), n <= 6, [&] {
                        return rel_residual(e_determinant(spec, p, ctx),
                                            e_perm_sum(spec, p, ctx));
                      });
        }
        // Next strictly increasing x in [1, m].
        int i = n - 1;
        while (i >= 0 && x[i] == m - (n - 1 - i)) --i;
        if (i < 0) break;
        ++x[i];
        for (int k = i + 1; k < n; ++k) x[k] = x[k - 1] + 1;
      }
    }
  }
  return rep;
}

VerificationReport yang_baxter_sweep(int count,
                                     const GenericitySampler& sampler,
                                     const EllipticContext& ctx,
                                     const Tolerances& tol) {
  VerificationReport rep;
  std::mt19937_64 rng(sampler.rng_seed);
  const double unit = ctx.k1 / std::abs(ctx.lambda);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = sampler.rng_seed + static_cast<std::uint64_t>(i);
    CheckRecord rec;
    rec.check_id = "ybr.hexagon";
    rec.seed = seed;
    rec.tol = tol.effective(tol.lattice);
    const auto t0 = Clock::now();
    double residual = -1.0;
    bool done = false;
    for (int attempt = 0; attempt < sampler.max_retries && !done; ++attempt) {
      const Hexagon h = draw_hexagon(rng);
      const ModelConstants consts{draw_box(rng, sampler.a12_box, unit)};
      const cplx u1 = draw_box(rng, sampler.u_box, unit);
      const cplx u2 = draw_box(rng, sampler.u_box, unit);
      const cplx u3 = draw_box(rng, sampler.u_box, unit);
      try {
        residual = check_yang_baxter(h.a, h.b, h.c, h.d, h.e, h.f, u1, u2, u3,
                                     consts, ctx);
        done = true;
      } catch (const SingularParameterError&) {
        continue;  // resample the hexagon
      }
    }
    rec.residual = residual;
    rec.status = !done ? "error" : (residual <= rec.tol ? "pass" : "fail");
    rec.ms = elapsed_ms(t0);
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

double mutation_failure_rate(const BoundarySpec& spec,
                             const GenericitySampler& sampler,
                             const EllipticContext& ctx, GMutation site,
                             int seeds, double delta, const Tolerances& tol) {
  if (seeds < 1) {
    throw std::invalid_argument("mutation_failure_rate: need at least one seed");
  }
  int failed = 0;
  for (int s = 0; s < seeds; ++s) {
    GenericitySampler smp = sampler;
    smp.rng_seed = sampler.rng_seed + static_cast<std::uint64_t>(s);
    const ModelParams p = sample_generic(spec, smp, ctx);
    const cplx w = evaluate_w_dp(spec, p, ctx);
    const cplx g = g_closed_form_mutated(spec, p, ctx, site, delta);
    if (rel_residual(w, g) > tol.effective(tol.lattice)) ++failed;
  }
  return static_cast<double>(failed) / static_cast<double>(seeds);
}

}  // namespace edm
