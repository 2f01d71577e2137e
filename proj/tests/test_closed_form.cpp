#include "edm/closed_form.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace edm {
namespace {

struct ClosedFormFixture : ::testing::Test {
  EllipticContext ctx = make_context(0.3);

  ModelParams params_for(const BoundarySpec& spec) const {
    static const std::vector<cplx> u_pool = {
        {0.23, 0.11}, {-0.17, 0.19}, {0.41, -0.13}, {0.09, 0.27}};
    static const std::vector<cplx> v_pool = {
        {-0.05, 0.03}, {0.13, -0.07}, {0.29, 0.09}, {-0.31, -0.11}, {0.07, 0.21}};
    ModelParams p;
    p.u.assign(u_pool.begin(), u_pool.begin() + spec.n);
    p.v.assign(v_pool.begin(), v_pool.begin() + spec.m);
    p.a12 = cplx{0.40, 0.20};
    return p;
  }

  cplx br(cplx x) const { return bracket(x, ctx); }
};

// Recursive Laplace cofactor expansion, the independent determinant oracle.
cplx det_laplace(const std::vector<cplx>& a, int n) {
  if (n == 1) return a[0];
  cplx det{0.0, 0.0};
  double sign = 1.0;
  for (int j = 0; j < n; ++j) {
    std::vector<cplx> minor;
    minor.reserve(static_cast<std::size_t>(n - 1) * (n - 1));
    for (int r = 1; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (c != j) minor.push_back(a[static_cast<std::size_t>(r) * n + c]);
      }
    }
    det += sign * a[static_cast<std::size_t>(j)] * det_laplace(minor, n - 1);
    sign = -sign;
  }
  return det;
}

TEST_F(ClosedFormFixture, PrefactorTelescopesForSingleRow) {
  // x = (1): the gap runs over j = 1..m-1 and the ratio chain telescopes.
  const BoundarySpec spec = make_boundary_spec(4, 1, {1});
  const ModelParams p = params_for(spec);
  const cplx expected = br(p.a12 + 4.0) / br(p.a12 + 1.0);
  EXPECT_LT(rel_residual(prefactor_xm(spec, p, ctx), expected), 1e-13);
}

TEST_F(ClosedFormFixture, PrefactorSingleGapExample) {
  const BoundarySpec spec = make_boundary_spec(3, 2, {1, 3});
  const ModelParams p = params_for(spec);
  const cplx expected = br(p.a12 + 3.0) / br(p.a12 + 2.0);
  EXPECT_LT(rel_residual(prefactor_xm(spec, p, ctx), expected), 1e-13);
}

TEST_F(ClosedFormFixture, PrefactorIsOneWhenTight) {
  // x = (m-n+1, ..., m) leaves no gaps, so every inner product is empty.
  for (auto [m, n] : {std::pair{4, 2}, std::pair{5, 3}, std::pair{3, 1}}) {
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = m - n + 1 + i;
    const BoundarySpec spec = make_boundary_spec(m, n, x);
    EXPECT_EQ(prefactor_xm(spec, params_for(spec), ctx), (cplx{1.0, 0.0}));
  }
}

TEST_F(ClosedFormFixture, FxMatchesItsDefinition) {
  const BoundarySpec spec = make_boundary_spec(4, 2, {2, 4});
  const ModelParams p = params_for(spec);
  const cplx u{0.33, -0.21};

  for (int x : {1, 2, 3, 4}) {
    const double shift = x + spec.n - 2;
    cplx expected = br(-u + p.v[x - 1] + p.a12 + shift) / br(p.a12 + shift);
    for (int k = 1; k < x; ++k) expected *= br(1.0 + u - p.v[k - 1]) / br(1.0);
    for (int k = x + 1; k <= spec.m; ++k) expected *= br(u - p.v[k - 1]) / br(1.0);
    EXPECT_LT(rel_residual(f_x(x, u, spec, p, ctx), expected), 1e-13) << "x=" << x;
  }
  EXPECT_THROW(f_x(0, u, spec, p, ctx), std::invalid_argument);
  EXPECT_THROW(f_x(5, u, spec, p, ctx), std::invalid_argument);
}

TEST_F(ClosedFormFixture, PermutationSumMatchesDeterminant) {
  const std::vector<BoundarySpec> specs = {
      make_boundary_spec(2, 1, {1}),
      make_boundary_spec(3, 2, {1, 3}),
      make_boundary_spec(4, 3, {1, 2, 4}),
      make_boundary_spec(5, 3, {2, 3, 5}),
      make_boundary_spec(5, 4, {1, 2, 4, 5}),
  };
  for (const BoundarySpec& spec : specs) {
    const ModelParams p = params_for(spec);
    EXPECT_LT(rel_residual(e_perm_sum(spec, p, ctx), e_determinant(spec, p, ctx)),
              1e-10)
        << "spec (" << spec.m << "," << spec.n << ")";
  }
}

TEST_F(ClosedFormFixture, DeterminantMatchesLaplaceOracle) {
  const BoundarySpec spec = make_boundary_spec(5, 3, {1, 3, 5});
  const ModelParams p = params_for(spec);
  const int n = spec.n;

  std::vector<cplx> a(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      a[static_cast<std::size_t>(j) * n + k] = f_x(spec.x[j], p.u[k], spec, p, ctx);
    }
  }
  cplx expected = prefactor_xm(spec, p, ctx) * det_laplace(a, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      expected *= br(1.0) / br(p.u[j] - p.u[k]);
    }
  }
  EXPECT_LT(rel_residual(e_determinant(spec, p, ctx), expected), 1e-12);
}

TEST_F(ClosedFormFixture, EIsSymmetricInSpectralParameters) {
  const BoundarySpec spec = make_boundary_spec(4, 3, {1, 3, 4});
  const ModelParams p = params_for(spec);
  const cplx base = e_determinant(spec, p, ctx);
  for (auto [j, k] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    ModelParams q = p;
    std::swap(q.u[j], q.u[k]);
    EXPECT_LT(rel_residual(e_determinant(spec, q, ctx), base), 1e-10);
    EXPECT_LT(rel_residual(e_perm_sum(spec, q, ctx), base), 1e-10);
  }
}

TEST_F(ClosedFormFixture, GIsVandermondeTimesE) {
  const BoundarySpec spec = make_boundary_spec(4, 2, {2, 4});
  const ModelParams p = params_for(spec);
  cplx expected = e_determinant(spec, p, ctx);
  for (int j = 0; j < spec.n; ++j) {
    for (int k = j + 1; k < spec.n; ++k) {
      expected *= br(1.0 + p.u[k] - p.u[j]) / br(1.0);
    }
  }
  EXPECT_LT(rel_residual(g_closed_form(spec, p, ctx), expected), 1e-14);
}

TEST_F(ClosedFormFixture, GMatchesLatticeSumOnExamples) {
  const std::vector<BoundarySpec> specs = {
      make_boundary_spec(3, 2, {1, 3}),
      make_boundary_spec(4, 2, {1, 4}),
      make_boundary_spec(4, 3, {2, 3, 4}),
  };
  for (const BoundarySpec& spec : specs) {
    const ModelParams p = params_for(spec);
    EXPECT_LT(
        rel_residual(evaluate_w_dp(spec, p, ctx), g_closed_form(spec, p, ctx)),
        1e-9)
        << "spec (" << spec.m << "," << spec.n << ")";
  }
}

TEST_F(ClosedFormFixture, CoincidentSpectralParametersThrow) {
  const BoundarySpec spec = make_boundary_spec(3, 2, {1, 3});
  ModelParams p = params_for(spec);
  p.u[1] = p.u[0];
  EXPECT_THROW(e_determinant(spec, p, ctx), CoincidentSpectralError);
  EXPECT_THROW(e_perm_sum(spec, p, ctx), CoincidentSpectralError);
  EXPECT_THROW(g_closed_form(spec, p, ctx), CoincidentSpectralError);

  // Coincidence mod the period lattice counts too: [u1 - u2] vanishes when
  // the difference is a bracket period.
  ModelParams q = params_for(spec);
  q.u[1] = q.u[0] + 2.0 * ctx.k1 / ctx.lambda;
  EXPECT_THROW(e_determinant(spec, q, ctx), CoincidentSpectralError);
}

TEST_F(ClosedFormFixture, MutationsShiftTheValue) {
  const BoundarySpec spec = make_boundary_spec(3, 2, {1, 3});
  const ModelParams p = params_for(spec);
  const cplx base = g_closed_form(spec, p, ctx);
  for (GMutation site :
       {GMutation::kPrefactorNumerator, GMutation::kVandermondeFactor,
        GMutation::kDetEntryPin, GMutation::kDetEntryTail}) {
    const cplx mutated = g_closed_form_mutated(spec, p, ctx, site, 1e-3);
    EXPECT_GT(rel_residual(mutated, base), 1e-6);
    EXPECT_EQ(g_closed_form_mutated(spec, p, ctx, site, 0.0), base);
  }
}

TEST_F(ClosedFormFixture, MutationSiteAvailabilityIsChecked) {
  // Tight spec: no gap prefactor to corrupt.
  const BoundarySpec tight = make_boundary_spec(4, 2, {3, 4});
  EXPECT_THROW(g_closed_form_mutated(tight, params_for(tight), ctx,
                                     GMutation::kPrefactorNumerator, 1e-3),
               std::invalid_argument);
  // Single row: no Vandermonde pair.
  const BoundarySpec single = make_boundary_spec(3, 1, {2});
  EXPECT_THROW(g_closed_form_mutated(single, params_for(single), ctx,
                                     GMutation::kVandermondeFactor, 1e-3),
               std::invalid_argument);
  // x_1 = m: det entry (1,1) has an empty trailing product.
  const BoundarySpec last = make_boundary_spec(2, 1, {2});
  EXPECT_THROW(g_closed_form_mutated(last, params_for(last), ctx,
                                     GMutation::kDetEntryTail, 1e-3),
               std::invalid_argument);
}

}  // namespace
}  // namespace edm
