#pragma once

#include <Eigen/Dense>
#include <complex>

namespace fdsec {

/// Dense complex matrix used throughout the library. Zero-row and zero-column
/// shapes are valid values; every operation below accepts them and returns
/// structurally consistent (possibly empty) results.
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Thin full SVD a = u * sigma.asDiagonal() * v.adjoint() padded to square
/// factors: u is rows x rows, v is cols x cols, sigma holds min(rows, cols)
/// non-negative values sorted descending.
struct SvdResult {
  CMatrix u;      ///< Left singular vectors (unitary, rows x rows).
  RVector sigma;  ///< Singular values, descending.
  CMatrix v;      ///< Right singular vectors (unitary, cols x cols).
};

/// Joint decomposition of a matrix pair (a: N x M, b: N x K) sharing the row
/// space C^N. Splits the domains of a and b into blocks adapted to the
/// geometry of span(a) and span(b):
///
///   a * psi1 = [0 | x2 * diag(lambda1) | x3],  block widths (M-s-r, s, r)
///   b * psi2 = [x1 | x2 * diag(lambda2) | 0],  block widths (p, s, K-s-p)
///
/// where x = [x1 x2 x3] has full column rank k, the shared block x2 spans
/// span(a) .. span(b) (the intersection), x3 spans the part of span(a) outside
/// span(b), x1 the part of span(b) outside span(a), and
/// lambda1^2 + lambda2^2 = 1 elementwise.
struct GsvdDims {
  int k = 0;  ///< dim(span(a) + span(b)).
  int p = 0;  ///< dim of span(b)'s exclusive part.
  int r = 0;  ///< dim of span(a)'s exclusive part.
  int s = 0;  ///< dim of the intersection.
};

struct GsvdResult {
  CMatrix psi1;     ///< Unitary M x M domain basis for a.
  CMatrix psi2;     ///< Unitary K x K domain basis for b.
  RVector lambda1;  ///< Positive diagonal entries (s), paired with psi1's middle block.
  RVector lambda2;  ///< Positive diagonal entries (s), paired with psi2's middle block.
  CMatrix x;        ///< N x k, full column rank, columns ordered [x1 | x2 | x3].
  GsvdDims dims;

  /// Middle (shared-direction) block of psi1: M x s.
  CMatrix psi12() const { return psi1.middleCols(psi1.cols() - dims.s - dims.r, dims.s); }
  /// Middle (shared-direction) block of psi2: K x s.
  CMatrix psi22() const { return psi2.middleCols(dims.p, dims.s); }
  /// Leading block of psi1 (null-space of a): M x (M-s-r).
  CMatrix psi11() const { return psi1.leftCols(psi1.cols() - dims.s - dims.r); }
  /// Trailing block of psi1 (a-exclusive directions): M x r.
  CMatrix psi13() const { return psi1.rightCols(dims.r); }
  /// Leading block of psi2 (b-exclusive directions): K x p.
  CMatrix psi21() const { return psi2.leftCols(dims.p); }
  /// Trailing block of psi2 (null-space of b): K x (K-s-p).
  CMatrix psi23() const { return psi2.rightCols(psi2.cols() - dims.p - dims.s); }
  /// Shared image block x2: N x s.
  CMatrix x2() const { return x.middleCols(dims.p, dims.s); }
};

/// Full SVD; handles degenerate (zero-row/zero-column) shapes.
SvdResult svd(const CMatrix& a);

/// Rank-revealing tolerance: max(rows, cols) * eps * sigma_max.
double rank_tolerance(const CMatrix& a, double sigma_max);

/// Number of singular values above rank_tolerance. Zero or empty matrices
/// have rank 0.
int numeric_rank(const CMatrix& a);

/// Number of singular values strictly above an absolute threshold. Lets
/// several related matrices be ranked against one shared scale, so a
/// structurally-zero product (entries at the other matrices' rounding floor)
/// cannot report phantom rank against its own tiny scale.
int numeric_rank_at(const CMatrix& a, double tolerance);

/// Orthonormal basis of the null space {x : a*x = 0}; cols(a) - rank columns.
CMatrix null_basis(const CMatrix& a);

/// Orthonormal basis of the orthogonal complement of span(a) within C^rows(a)
/// (equivalently the null space of a's adjoint); rows(a) - rank columns.
CMatrix perp_basis(const CMatrix& a);

/// Orthonormal basis of the row space of a (the complement of the null space
/// within the domain C^cols(a)); rank columns.
CMatrix row_basis(const CMatrix& a);

/// Orthonormal basis of span(a) (the column space); rank columns.
CMatrix range_basis(const CMatrix& a);

/// Columns of a and b stacked side by side; both must share the row count.
CMatrix hstack(const CMatrix& a, const CMatrix& b);

/// dim(span([a b])) - dim(span(b)): the number of dimensions a contributes
/// outside span(b). Both ranks are evaluated at the stacked pair's scale, so
/// a block that is zero up to rounding contributes nothing regardless of how
/// its own noise floor would rank. Throws DimensionMismatch on differing row
/// counts.
int dim_diff(const CMatrix& a, const CMatrix& b);

/// Joint subspace decomposition of (a, b) described at GsvdResult. Inputs may
/// be rank-deficient or empty; the dims are computed from actual numeric
/// ranks, so generic full-rank inputs reproduce the closed-form dimension
/// arithmetic k = min(M+K, N), p = k - min(M,N), r = k - min(K,N),
/// s = k - p - r. Throws DimensionMismatch on differing row counts.
GsvdResult gsvd(const CMatrix& a, const CMatrix& b);

}  // namespace fdsec
