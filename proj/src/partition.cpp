#include "edm/partition.hpp"

#include <algorithm>
#include <cmath>

namespace edm {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

// All masks over `columns` bits with the given popcount, ascending.
std::vector<std::uint32_t> masks_with_popcount(int columns, int count) {
  std::vector<std::uint32_t> out;
  if (count == 0) {
    out.push_back(0);
    return out;
  }
  if (count > columns) return out;
  std::uint32_t mask = (1u << count) - 1u;
  const std::uint32_t limit = 1u << columns;
  while (mask < limit) {
    out.push_back(mask);
    // Gosper's hack: next mask with the same popcount.
    const std::uint32_t c = mask & (~mask + 1u);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return out;
}

void validate_params(const BoundarySpec& spec, const ModelParams& p) {
  if (static_cast<int>(p.u.size()) != spec.n ||
      static_cast<int>(p.v.size()) != spec.m) {
    throw std::invalid_argument("ModelParams: u must have n entries and v m entries");
  }
}

std::uint32_t bottom_mask(const BoundarySpec& spec) {
  std::uint32_t mask = 0;
  for (int c : spec.x) mask |= 1u << (c - 1);
  return mask;
}

// Row spectral parameters top to bottom: row r carries u_{n-r} (1-based).
std::vector<cplx> rows_top_to_bottom(const std::vector<cplx>& u) {
  return {u.rbegin(), u.rend()};
}

// Recursively extends the chain of inner lines below row k-1; a vanishing
// partial weight prunes the subtree (zero-weight skipping only).
template <typename Sink>
void extend_chain(std::vector<LineState>& lines,
                  const std::vector<std::vector<std::uint32_t>>& inner_masks,
                  std::span<const cplx> u_by_row, std::span<const cplx> v,
                  int columns, const ModelConstants& consts,
                  const EllipticContext& ctx, std::size_t k, cplx partial,
                  Sink& sink) {
  const std::size_t last = lines.size() - 1;
  if (k == last) {
    const cplx w = partial * row_weight(lines[k - 1], lines[k], columns,
                                        u_by_row[k - 1], v, consts, ctx);
    if (w != cplx{0.0, 0.0}) sink(lines, w);
    return;
  }
  for (std::uint32_t mask : inner_masks[k]) {
    lines[k].mask = mask;
    const cplx w = partial * row_weight(lines[k - 1], lines[k], columns,
                                        u_by_row[k - 1], v, consts, ctx);
    if (w == cplx{0.0, 0.0}) continue;
    extend_chain(lines, inner_masks, u_by_row, v, columns, consts, ctx, k + 1,
                 w, sink);
  }
}

// Enumerates all line chains for a generic occupancy profile.  sizes[k] is
// the occupancy of line k (k = 0..rows); lines 0 and rows are pinned to
// first_mask/last_mask.  Throws CapacityError if prod_k C(columns, sizes[k])
// over the inner lines exceeds cap.
template <typename Sink>
void enumerate_chains(int columns, const std::vector<int>& sizes,
                      std::uint32_t first_mask, std::uint32_t last_mask,
                      std::span<const cplx> u_by_row, std::span<const cplx> v,
                      const ModelConstants& consts, const EllipticContext& ctx,
                      double cap, Sink sink) {
  const std::size_t rows = sizes.size() - 1;
  std::vector<std::vector<std::uint32_t>> inner_masks(rows);
  double chains = 1.0;
  for (std::size_t k = 1; k < rows; ++k) {
    chains *= binomial(columns, sizes[k]);
    inner_masks[k] = masks_with_popcount(columns, sizes[k]);
  }
  if (chains > cap) {
    throw CapacityError("enumeration would exceed the configured chain cap");
  }

  std::vector<LineState> lines(rows + 1);
  for (std::size_t k = 0; k <= rows; ++k) lines[k].level = static_cast<int>(k);
  lines[0].mask = first_mask;
  lines[rows].mask = last_mask;
  extend_chain(lines, inner_masks, u_by_row, v, columns, consts, ctx, 1,
               cplx{1.0, 0.0}, sink);
}

}  // namespace

BoundarySpec make_boundary_spec(int m, int n, std::vector<int> x) {
  if (m < 1 || m > kMaxColumns) {
    throw std::invalid_argument("BoundarySpec: m must lie in [1, 30]");
  }
  if (n < 1 || n > m) {
    throw std::invalid_argument("BoundarySpec: n must lie in [1, m]");
  }
  if (static_cast<int>(x.size()) != n) {
    throw std::invalid_argument("BoundarySpec: x must have n entries");
  }
  for (int i = 0; i < n; ++i) {
    if (x[i] < 1 || x[i] > m || (i > 0 && x[i] <= x[i - 1])) {
      throw std::invalid_argument("BoundarySpec: x must be strictly increasing within [1, m]");
    }
  }
  return BoundarySpec{m, n, std::move(x)};
}

std::vector<StateVector> line_vertices(const LineState& s, int columns,
                                       const StateVector& base) {
  std::vector<StateVector> verts;
  verts.reserve(columns + 1);
  StateVector cur = base;
  for (int i = 0; i < s.level; ++i) cur = cur + kE1;
  verts.push_back(cur);
  for (int c = 0; c < columns; ++c) {
    cur = cur + ((s.mask >> c) & 1u ? kE2 : kE1);
    verts.push_back(cur);
  }
  return verts;
}

cplx row_weight(const LineState& top, const LineState& bottom, int columns,
                cplx u, std::span<const cplx> v, const ModelConstants& consts,
                const EllipticContext& ctx) {
  if (static_cast<int>(v.size()) != columns) {
    throw std::invalid_argument("row_weight: need one inhomogeneity per column");
  }
  StateVector tl{};  // top-left corner of the current face
  for (int i = 0; i < top.level; ++i) tl = tl + kE1;
  StateVector bl{};  // bottom-left corner
  for (int i = 0; i < bottom.level; ++i) bl = bl + kE1;

  cplx w{1.0, 0.0};
  for (int col = 0; col < columns; ++col) {
    const StateVector tr = tl + ((top.mask >> col) & 1u ? kE2 : kE1);
    const StateVector br = bl + ((bottom.mask >> col) & 1u ? kE2 : kE1);
    w *= face_weight({tl, tr, bl, br, u, v[col]}, consts, ctx);
    if (w == cplx{0.0, 0.0}) return w;
    tl = tr;
    bl = br;
  }
  return w;
}

std::vector<WConfiguration> enumerate_w_configurations(
    const BoundarySpec& spec, const ModelParams& p, const EllipticContext& ctx,
    double cap) {
  validate_params(spec, p);
  const ModelConstants consts{p.a12};
  std::vector<int> sizes(spec.n + 1);
  for (int k = 0; k <= spec.n; ++k) sizes[k] = k;
  const std::vector<cplx> u_rows = rows_top_to_bottom(p.u);
  std::vector<WConfiguration> out;
  enumerate_chains(spec.m, sizes, 0u, bottom_mask(spec), u_rows, p.v, consts,
                   ctx, cap,
                   [&out](const std::vector<LineState>& lines, cplx w) {
                     out.push_back({lines, w});
                   });
  return out;
}

cplx evaluate_w_bruteforce(const BoundarySpec& spec, const ModelParams& p,
                           const EllipticContext& ctx, double cap) {
  validate_params(spec, p);
  const ModelConstants consts{p.a12};
  std::vector<int> sizes(spec.n + 1);
  for (int k = 0; k <= spec.n; ++k) sizes[k] = k;
  const std::vector<cplx> u_rows = rows_top_to_bottom(p.u);
  cplx sum{0.0, 0.0};
  enumerate_chains(spec.m, sizes, 0u, bottom_mask(spec), u_rows, p.v, consts,
                   ctx, cap,
                   [&sum](const std::vector<LineState>&, cplx w) { sum += w; });
  return sum;
}

cplx evaluate_w_dp(const BoundarySpec& spec, const ModelParams& p,
                   const EllipticContext& ctx) {
  validate_params(spec, p);
  const ModelConstants consts{p.a12};
  const std::vector<cplx> u_rows = rows_top_to_bottom(p.u);

  std::vector<std::uint32_t> cur_masks = {0u};
  std::vector<cplx> cur_amp = {cplx{1.0, 0.0}};
  for (int level = 1; level <= spec.n; ++level) {
    const std::vector<std::uint32_t> next_masks =
        (level == spec.n) ? std::vector<std::uint32_t>{bottom_mask(spec)}
                          : masks_with_popcount(spec.m, level);
    std::vector<cplx> next_amp(next_masks.size(), cplx{0.0, 0.0});
    for (std::size_t bi = 0; bi < next_masks.size(); ++bi) {
      const LineState bot{next_masks[bi], level};
      cplx acc{0.0, 0.0};
      for (std::size_t ti = 0; ti < cur_masks.size(); ++ti) {
        if (cur_amp[ti] == cplx{0.0, 0.0}) continue;
        const LineState top{cur_masks[ti], level - 1};
        const cplx w =
            row_weight(top, bot, spec.m, u_rows[level - 1], p.v, consts, ctx);
        if (w != cplx{0.0, 0.0}) acc += cur_amp[ti] * w;
      }
      next_amp[bi] = acc;
    }
    cur_masks = next_masks;
    cur_amp = std::move(next_amp);
  }
  return cur_amp[0];
}

cplx one_column_w(int j, const ModelParams& p, int m,
                  const EllipticContext& ctx) {
  const int n = static_cast<int>(p.u.size());
  if (j < 0 || j >= n) {
    throw std::invalid_argument("one_column_w: j must lie in [0, n)");
  }
  if (static_cast<int>(p.v.size()) != m || m < 1) {
    throw std::invalid_argument("one_column_w: v must have m entries");
  }
  const cplx vm = p.v[m - 1];
  const cplx a12 = p.a12;
  const cplx a21 = -a12;
  const double unit = std::abs(bracket(1.0, ctx));

  cplx w = guarded_ratio(
      bracket(a12 + static_cast<double>(m - 1 + j) - p.u[n - j - 1] + vm, ctx),
      bracket(a12 + static_cast<double>(m - 1 + j), ctx), unit);
  for (int k = n - j + 1; k <= n; ++k) {
    w *= guarded_ratio(bracket(p.u[k - 1] - vm, ctx), bracket(1.0, ctx), unit);
    w *= guarded_ratio(bracket(a21 - static_cast<double>(m + n - k), ctx),
                       bracket(a21 - static_cast<double>(m + n - k - 1), ctx),
                       unit);
  }
  for (int k = 1; k <= n - j - 1; ++k) {
    w *= guarded_ratio(bracket(1.0 - p.u[k - 1] + vm, ctx), bracket(1.0, ctx),
                       unit);
  }
  return w;
}

double decompose_check(const BoundarySpec& spec, const ModelParams& p,
                       const EllipticContext& ctx, double cap) {
  validate_params(spec, p);
  if (spec.x.back() != spec.m) {
    throw std::invalid_argument("decompose_check: requires x_n = m");
  }
  const cplx w = evaluate_w_dp(spec, p, ctx);

  const ModelConstants consts{p.a12};
  const std::vector<cplx> u_rows = rows_top_to_bottom(p.u);
  const int cols = spec.m - 1;
  std::uint32_t last_mask = 0;
  for (int i = 0; i + 1 < spec.n; ++i) last_mask |= 1u << (spec.x[i] - 1);
  const std::span<const cplx> v_sub(p.v.data(), cols);

  cplx sum{0.0, 0.0};
  for (int j = 0; j < spec.n; ++j) {
    std::vector<int> sizes(spec.n + 1);
    for (int k = 0; k <= spec.n; ++k) sizes[k] = (k <= j) ? k : k - 1;
    cplx pj{0.0, 0.0};
    enumerate_chains(cols, sizes, 0u, last_mask, u_rows, v_sub, consts, ctx,
                     cap,
                     [&pj](const std::vector<LineState>&, cplx w_) { pj += w_; });
    sum += pj * one_column_w(j, p, spec.m, ctx);
  }
  return rel_residual(w, sum);
}

}  // namespace edm
