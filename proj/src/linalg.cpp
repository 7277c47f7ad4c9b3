#include "fdsec/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fdsec/errors.hpp"

namespace fdsec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

int rank_from_singular_values(const RVector& sigma, Eigen::Index rows, Eigen::Index cols) {
  if (sigma.size() == 0) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) * kEps * sigma(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol) ++rank;
  }
  return rank;
}

/// Minimum-norm solution columns y with a*y = rhs (projected onto a's row
/// space), via the rank-truncated SVD of a.
CMatrix min_norm_solve(const CMatrix& a, const CMatrix& rhs) {
  const SvdResult f = svd(a);
  const int rank = rank_from_singular_values(f.sigma, a.rows(), a.cols());
  if (rank == 0) return CMatrix::Zero(a.cols(), rhs.cols());
  const CMatrix coeff = f.u.leftCols(rank).adjoint() * rhs;
  return f.v.leftCols(rank) * f.sigma.head(rank).cwiseInverse().asDiagonal() * coeff;
}

/// Exactly `count` orthonormal columns whose leading span contains span(y)
/// (Householder QR, no pivoting; y is expected to have full column rank).
CMatrix orthonormal_columns(const CMatrix& y, Eigen::Index count) {
  if (count == 0) return CMatrix(y.rows(), 0);
  Eigen::HouseholderQR<CMatrix> qr(y);
  return qr.householderQ() * CMatrix::Identity(y.rows(), count);
}

}  // namespace

SvdResult svd(const CMatrix& a) {
  SvdResult out;
  if (a.rows() == 0 || a.cols() == 0) {
    out.u = CMatrix::Identity(a.rows(), a.rows());
    out.sigma = RVector::Zero(std::min(a.rows(), a.cols()));
    out.v = CMatrix::Identity(a.cols(), a.cols());
    return out;
  }
  Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = solver.matrixU();
  out.sigma = solver.singularValues();
  out.v = solver.matrixV();
  return out;
}

double rank_tolerance(const CMatrix& a, double sigma_max) {
  return static_cast<double>(std::max(a.rows(), a.cols())) * kEps * sigma_max;
}

int numeric_rank(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> solver(a);
  return rank_from_singular_values(solver.singularValues(), a.rows(), a.cols());
}

int numeric_rank_at(const CMatrix& a, double tolerance) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> solver(a);
  int rank = 0;
  for (Eigen::Index i = 0; i < solver.singularValues().size(); ++i) {
    if (solver.singularValues()(i) > tolerance) ++rank;
  }
  return rank;
}

CMatrix null_basis(const CMatrix& a) {
  const SvdResult f = svd(a);
  const int rank = rank_from_singular_values(f.sigma, a.rows(), a.cols());
  return f.v.rightCols(a.cols() - rank);
}

CMatrix perp_basis(const CMatrix& a) {
  const SvdResult f = svd(a);
  const int rank = rank_from_singular_values(f.sigma, a.rows(), a.cols());
  return f.u.rightCols(a.rows() - rank);
}

CMatrix row_basis(const CMatrix& a) {
  const SvdResult f = svd(a);
  const int rank = rank_from_singular_values(f.sigma, a.rows(), a.cols());
  return f.v.leftCols(rank);
}

CMatrix range_basis(const CMatrix& a) {
  const SvdResult f = svd(a);
  const int rank = rank_from_singular_values(f.sigma, a.rows(), a.cols());
  return f.u.leftCols(rank);
}

CMatrix hstack(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("hstack: row counts differ (" + std::to_string(a.rows()) + " vs " +
                            std::to_string(b.rows()) + ")");
  }
  CMatrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

int dim_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("dim_diff: row counts differ (" + std::to_string(a.rows()) + " vs " +
                            std::to_string(b.rows()) + ")");
  }
  const CMatrix joint = hstack(a, b);
  if (joint.rows() == 0 || joint.cols() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> solver(joint);
  const double tol = rank_tolerance(joint, solver.singularValues()(0));
  int rank_joint = 0;
  for (Eigen::Index i = 0; i < solver.singularValues().size(); ++i) {
    if (solver.singularValues()(i) > tol) ++rank_joint;
  }
  return rank_joint - numeric_rank_at(b, tol);
}

GsvdResult gsvd(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("gsvd: row counts differ (" + std::to_string(a.rows()) + " vs " +
                            std::to_string(b.rows()) + ")");
  }
  const Eigen::Index m = a.cols();
  const Eigen::Index kc = b.cols();

  const int ra = numeric_rank(a);
  const int rb = numeric_rank(b);
  const int k = numeric_rank(hstack(a, b));
  const int s = ra + rb - k;
  const int p = k - ra;
  const int r = k - rb;

  GsvdResult out;
  out.dims = GsvdDims{k, p, r, s};
  out.lambda1 = RVector(s);
  out.lambda2 = RVector(s);

  const CMatrix psi11 = null_basis(a);  // m x (m - ra)
  const CMatrix psi23 = null_basis(b);  // kc x (kc - rb)

  CMatrix psi12(m, 0), psi22(kc, 0), x2(a.rows(), 0);
  if (s > 0) {
    // Intersection of span(a) and span(b): principal directions with unit
    // cosines between the two range bases. The top-s left singular vectors of
    // qa^H*qb, mapped back through qa, span it.
    const CMatrix qa = range_basis(a);
    const CMatrix qb = range_basis(b);
    const SvdResult angles = svd(qa.adjoint() * qb);
    const CMatrix w = qa * angles.u.leftCols(s);

    // Minimum-norm preimages of the intersection (they lie in the row spaces,
    // hence orthogonal to psi11/psi23), orthonormalized.
    psi12 = orthonormal_columns(min_norm_solve(a, w), s);
    psi22 = orthonormal_columns(min_norm_solve(b, w), s);

    // Coordinates of the preimage images in the w basis; both s x s and
    // invertible for generic inputs.
    const CMatrix ca = w.adjoint() * (a * psi12);
    const CMatrix cb = w.adjoint() * (b * psi22);

    // Diagonalize the mixing ratio cb^{-1}*ca = s2 * diag(d) * s1^H so that a
    // and b see the same image directions with reciprocal-normalized gains.
    const CMatrix ratio = cb.completeOrthogonalDecomposition().solve(ca);
    const SvdResult rsvd = svd(ratio);
    for (int i = 0; i < s; ++i) {
      const double d = rsvd.sigma(i);
      const double scale = std::sqrt(1.0 + d * d);
      out.lambda1(i) = d / scale;
      out.lambda2(i) = 1.0 / scale;
    }
    psi12 = psi12 * rsvd.v;
    psi22 = psi22 * rsvd.u;
    x2 = w * (cb * rsvd.u * out.lambda2.cwiseInverse().asDiagonal());
  }

  // Complete the domain bases: exclusive directions fill what remains.
  const CMatrix psi13 = perp_basis(hstack(psi11, psi12));  // m x r
  const CMatrix psi21 = perp_basis(hstack(psi22, psi23));  // kc x p
  if (psi13.cols() != r || psi21.cols() != p) {
    throw InternalInconsistency("gsvd: complement block widths disagree with rank arithmetic");
  }

  out.psi1 = hstack(hstack(psi11, psi12), psi13);
  out.psi2 = hstack(hstack(psi21, psi22), psi23);
  out.x = hstack(hstack(b * psi21, x2), a * psi13);
  return out;
}

}  // namespace fdsec
