#include "edm/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace edm {

namespace {

struct Mutation {
  GMutation site;
  double delta;
};

// Determinant by LU decomposition with partial pivoting; a is row-major and
// consumed in place.
cplx det_lu(std::vector<cplx>& a, int n) {
  cplx det{1.0, 0.0};
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::abs(a[r * n + col]);
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (best == 0.0) return {0.0, 0.0};
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      det = -det;
    }
    const cplx pivot = a[col * n + col];
    det *= pivot;
    for (int r = col + 1; r < n; ++r) {
      const cplx f = a[r * n + col] / pivot;
      for (int c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return det;
}

void require_distinct_u(const ModelParams& p, const EllipticContext& ctx,
                        double unit) {
  for (std::size_t j = 0; j < p.u.size(); ++j) {
    for (std::size_t k = j + 1; k < p.u.size(); ++k) {
      if (std::abs(bracket(p.u[j] - p.u[k], ctx)) < 1e-12 * unit) {
        throw CoincidentSpectralError(
            "spectral parameters coincide mod the period lattice");
      }
    }
  }
}

cplx prefactor_impl(const BoundarySpec& spec, const ModelParams& p,
                    const EllipticContext& ctx,
                    const std::optional<Mutation>& mut) {
  const double unit = std::abs(bracket(1.0, ctx));
  const double n = spec.n;
  bool first_site = true;
  cplx w{1.0, 0.0};
  for (int k = 1; k <= spec.n; ++k) {
    const int next = (k == spec.n) ? spec.m + 1 : spec.x[k];
    for (int j = spec.x[k - 1]; j <= next - 2; ++j) {
      cplx num_arg = p.a12 + static_cast<double>(j) + n;
      if (first_site && mut && mut->site == GMutation::kPrefactorNumerator) {
        num_arg += mut->delta;
      }
      first_site = false;
      w *= guarded_ratio(bracket(num_arg, ctx),
                         bracket(p.a12 + static_cast<double>(j - k) + n, ctx),
                         unit);
    }
  }
  return w;
}

cplx f_x_impl(int x, cplx u, const BoundarySpec& spec, const ModelParams& p,
              const EllipticContext& ctx, double delta_pin,
              double delta_tail) {
  const double unit = std::abs(bracket(1.0, ctx));
  const double shift = static_cast<double>(x + spec.n - 2);
  cplx w = guarded_ratio(
      bracket(-u + p.v[x - 1] + p.a12 + shift + delta_pin, ctx),
      bracket(p.a12 + shift, ctx), unit);
  for (int k = 1; k < x; ++k) {
    w *= guarded_ratio(bracket(1.0 + u - p.v[k - 1], ctx), bracket(1.0, ctx),
                       unit);
  }
  bool first_tail = true;
  for (int k = x + 1; k <= spec.m; ++k) {
    cplx arg = u - p.v[k - 1];
    if (first_tail) {
      arg += delta_tail;
      first_tail = false;
    }
    w *= guarded_ratio(bracket(arg, ctx), bracket(1.0, ctx), unit);
  }
  return w;
}

cplx e_det_impl(const BoundarySpec& spec, const ModelParams& p,
                const EllipticContext& ctx,
                const std::optional<Mutation>& mut) {
  const double unit = std::abs(bracket(1.0, ctx));
  require_distinct_u(p, ctx, unit);
  const int n = spec.n;

  cplx pref = prefactor_impl(spec, p, ctx, mut);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      pref *= guarded_ratio(bracket(1.0, ctx),
                            bracket(p.u[j] - p.u[k], ctx), unit);
    }
  }

  std::vector<cplx> a(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double dpin = 0.0, dtail = 0.0;
      if (j == 0 && k == 0 && mut) {
        if (mut->site == GMutation::kDetEntryPin) dpin = mut->delta;
        if (mut->site == GMutation::kDetEntryTail) dtail = mut->delta;
      }
      a[static_cast<std::size_t>(j) * n + k] =
          f_x_impl(spec.x[j], p.u[k], spec, p, ctx, dpin, dtail);
    }
  }
  return pref * det_lu(a, n);
}

cplx g_impl(const BoundarySpec& spec, const ModelParams& p,
            const EllipticContext& ctx, const std::optional<Mutation>& mut) {
  const double unit = std::abs(bracket(1.0, ctx));
  cplx w = e_det_impl(spec, p, ctx, mut);
  bool first_pair = true;
  for (int j = 0; j < spec.n; ++j) {
    for (int k = j + 1; k < spec.n; ++k) {
      cplx arg = 1.0 + p.u[k] - p.u[j];
      if (first_pair && mut && mut->site == GMutation::kVandermondeFactor) {
        arg += mut->delta;
      }
      first_pair = false;
      w *= guarded_ratio(bracket(arg, ctx), bracket(1.0, ctx), unit);
    }
  }
  return w;
}

}  // namespace

cplx prefactor_xm(const BoundarySpec& spec, const ModelParams& p,
                  const EllipticContext& ctx) {
  return prefactor_impl(spec, p, ctx, std::nullopt);
}

cplx f_x(int x, cplx u, const BoundarySpec& spec, const ModelParams& p,
         const EllipticContext& ctx) {
  if (x < 1 || x > spec.m) {
    throw std::invalid_argument("f_x: x must lie in [1, m]");
  }
  return f_x_impl(x, u, spec, p, ctx, 0.0, 0.0);
}

cplx e_perm_sum(const BoundarySpec& spec, const ModelParams& p,
                const EllipticContext& ctx) {
  const double unit = std::abs(bracket(1.0, ctx));
  require_distinct_u(p, ctx, unit);
  const int n = spec.n;
  const cplx unit_bracket = bracket(1.0, ctx);

  // The n! terms cancel heavily (they expand a determinant), so the products
  // and the running sum are accumulated in extended precision.
  const auto widen = [](cplx z) {
    return std::complex<long double>{z.real(), z.imag()};
  };
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::complex<long double> sum{0.0L, 0.0L};
  do {
    std::complex<long double> term{1.0L, 0.0L};
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        term *= widen(guarded_ratio(
            unit_bracket, bracket(p.u[perm[j]] - p.u[perm[k]], ctx), unit));
      }
    }
    for (int j = 0; j < n; ++j) {
      const cplx uj = p.u[perm[j]];
      const int xj = spec.x[j];
      const double shift = static_cast<double>(xj + n - 2);
      term *= widen(guarded_ratio(
          bracket(-uj + p.v[xj - 1] + p.a12 + shift, ctx),
          bracket(p.a12 + shift, ctx), unit));
      for (int k = xj + 1; k <= spec.m; ++k) {
        term *= widen(
            guarded_ratio(bracket(uj - p.v[k - 1], ctx), unit_bracket, unit));
      }
      for (int k = 1; k < xj; ++k) {
        term *= widen(guarded_ratio(bracket(1.0 + uj - p.v[k - 1], ctx),
                                    unit_bracket, unit));
      }
    }
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  const cplx narrowed{static_cast<double>(sum.real()),
                      static_cast<double>(sum.imag())};
  return prefactor_xm(spec, p, ctx) * narrowed;
}

cplx e_determinant(const BoundarySpec& spec, const ModelParams& p,
                   const EllipticContext& ctx) {
  return e_det_impl(spec, p, ctx, std::nullopt);
}

cplx g_closed_form(const BoundarySpec& spec, const ModelParams& p,
                   const EllipticContext& ctx) {
  return g_impl(spec, p, ctx, std::nullopt);
}

cplx g_closed_form_mutated(const BoundarySpec& spec, const ModelParams& p,
                           const EllipticContext& ctx, GMutation site,
                           double delta) {
  if (site == GMutation::kPrefactorNumerator) {
    bool has_gap = false;
    for (int k = 1; k <= spec.n; ++k) {
      const int next = (k == spec.n) ? spec.m + 1 : spec.x[k];
      if (next - 2 >= spec.x[k - 1]) has_gap = true;
    }
    if (!has_gap) {
      throw std::invalid_argument("g_closed_form_mutated: spec has no gap prefactor site");
    }
  }
  if (site == GMutation::kVandermondeFactor && spec.n < 2) {
    throw std::invalid_argument("g_closed_form_mutated: need n >= 2 for a Vandermonde site");
  }
  if (site == GMutation::kDetEntryTail && spec.x[0] == spec.m) {
    throw std::invalid_argument("g_closed_form_mutated: entry (1,1) has no trailing product");
  }
  return g_impl(spec, p, ctx, Mutation{site, delta});
}

}  // namespace edm
