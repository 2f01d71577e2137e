#ifndef EDM_PARTITION_HPP
#define EDM_PARTITION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "edm/face.hpp"

// Lattice partition functions W_{M,N} on the M-column, N-row domain-wall
// geometry: row j (counted from the top, 0-based) carries spectral parameter
// u_{N-j}, column c carries inhomogeneity v_c, the top boundary line is
// empty and the bottom line occupies the strictly increasing columns
// x_1 < ... < x_N.  Horizontal lines between rows are encoded as LineState
// bitmasks; inner lines are summed over.

namespace edm {

// Thrown when a requested enumeration exceeds the configured cap.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxColumns = 30;            // LineState masks are 32-bit
inline constexpr double kDefaultEnumCap = 1e7;    // brute-force chain budget

struct BoundarySpec {
  int m = 0;                // columns
  int n = 0;                // rows, 1 <= n <= m
  std::vector<int> x;       // strictly increasing occupied columns, in [1, m]
};

// Validating constructor; throws std::invalid_argument on a malformed spec.
BoundarySpec make_boundary_spec(int m, int n, std::vector<int> x);

struct ModelParams {
  std::vector<cplx> u;      // size n, row spectral parameters
  std::vector<cplx> v;      // size m, column inhomogeneities
  cplx a12{0.0, 0.0};       // dynamical offset at the lattice base point
};

// Horizontal line: bit (c-1) of mask set iff column c is occupied; a line
// between row levels carries level many occupied columns on the main
// lattice, but the two numbers are independent here so the same machinery
// serves the one-column-deleted sublattices of the decomposition check.
struct LineState {
  std::uint32_t mask = 0;
  int level = 0;
};

// State vectors along a horizontal line with the given column count: entry c
// (0-based, c in [0, columns]) is the state left of column c+1.  The walk
// starts at base + level*e1 and each column adds e2 if occupied, e1 if not.
std::vector<StateVector> line_vertices(const LineState& s, int columns,
                                       const StateVector& base);

// Product of the face weights of one lattice row with the given top and
// bottom lines, spectral parameter u and inhomogeneities v (one per column).
// Returns exactly 0 as soon as a face pattern is inadmissible.
cplx row_weight(const LineState& top, const LineState& bottom, int columns,
                cplx u, std::span<const cplx> v, const ModelConstants& consts,
                const EllipticContext& ctx);

// One inner-line configuration together with its weight.  lines[k] is the
// horizontal line above row k+1, so lines.front() is the (empty) top
// boundary, lines[1..n-1] are the summed inner lines and lines.back() is
// the bottom boundary.
struct WConfiguration {
  std::vector<LineState> lines;
  cplx weight{0.0, 0.0};
};

// Exhaustive enumeration of inner-line configurations with nonzero weight.
// Visits every candidate chain exactly once; throws CapacityError if the
// chain count prod_j C(m, j) exceeds cap.
std::vector<WConfiguration> enumerate_w_configurations(
    const BoundarySpec& spec, const ModelParams& p, const EllipticContext& ctx,
    double cap = kDefaultEnumCap);

// Partition function by exhaustive enumeration (the reference evaluator).
cplx evaluate_w_bruteforce(const BoundarySpec& spec, const ModelParams& p,
                           const EllipticContext& ctx,
                           double cap = kDefaultEnumCap);

// Partition function by level-indexed transfer (sum over one line at a
// time); agrees with the brute force to near machine precision and is the
// default evaluator elsewhere in the library.
cplx evaluate_w_dp(const BoundarySpec& spec, const ModelParams& p,
                   const EllipticContext& ctx);

// Closed bracket product for the one-column partition function with a
// single e2 step at height j (0-based from the top) of an M-th column whose
// inhomogeneity is v_M = p.v[m-1]:
//   [a12+M-1+j - u_{N-j} + v_M] / [a12+M-1+j]
//   * prod_{k=N-j+1..N} [u_k - v_M][a21-M+k-N] / ([1][a21-M+1+k-N])
//   * prod_{k=1..N-j-1} [1 - u_k + v_M] / [1],          a21 = -a12.
cplx one_column_w(int j, const ModelParams& p, int m,
                  const EllipticContext& ctx);

// For a spec with x_n = m, checks the column decomposition
//   W = sum_{j=0..n-1} P_j * Wtilde_j,
// where P_j is evaluated by brute force on the (m-1)-column sublattice in
// which line k carries k occupied columns for k <= j and k-1 for k > j.
// Returns the relative residual.
double decompose_check(const BoundarySpec& spec, const ModelParams& p,
                       const EllipticContext& ctx,
                       double cap = kDefaultEnumCap);

}  // namespace edm

#endif  // EDM_PARTITION_HPP
