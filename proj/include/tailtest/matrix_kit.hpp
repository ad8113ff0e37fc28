#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace tailtest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance under which a matrix is accepted as symmetric.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Eigenvalues below this fraction of the largest one are treated as zero.
inline constexpr double kEigenvalueFloor = 1e-12;

/// k(k+1)/2, the length of vech of a k x k matrix.
[[nodiscard]] constexpr Index vech_size(Index k) { return k * (k + 1) / 2; }

/// Column-stacking vectorization: vec(A)[i + k*j] = A(i, j).
[[nodiscard]] Vector vec(const Matrix& a);

/// Inverse of vec for a k x k matrix.
[[nodiscard]] Matrix unvec(const Vector& v, Index k);

/**
 * Half-vectorization of a symmetric matrix.
 *
 * Entries are the upper triangle read column by column:
 * (a00, a01, a11, a02, a12, a22, ...). This is the subvector of vec(A)
 * holding the entries A(i, j) with i <= j, and it is the ordering that
 * duplication_matrix() is built against.
 *
 * Throws std::invalid_argument when A is not square or not symmetric to
 * kSymmetryTolerance.
 */
[[nodiscard]] Vector vech(const Matrix& a);

/// Rebuild the symmetric matrix whose vech is v. Throws if |v| is not triangular.
[[nodiscard]] Matrix unvech(const Vector& v);

/// Position of entry (i, j) (either triangle) inside vech.
[[nodiscard]] Index vech_index(Index i, Index j);

/// The q x k^2 matrix P_k with P_k' vech(A) = vec(A) for symmetric A (0/1 entries).
[[nodiscard]] Matrix duplication_matrix(Index k);

/// The k^2 x k^2 commutation matrix: K_k vec(A) = vec(A').
[[nodiscard]] Matrix commutation_matrix(Index k);

/// J_k = vec(I_k) vec(I_k)', so that J_k vec(A) = tr(A) vec(I_k).
[[nodiscard]] Matrix j_matrix(Index k);

[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

[[nodiscard]] bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryTolerance);

/// (A + A') / 2.
[[nodiscard]] Matrix symmetrize(const Matrix& a);

/// Symmetric square root of an SPD matrix together with its inverse.
struct SymRoot {
  Matrix root;
  Matrix inv_root;
  Vector eigenvalues;  // ascending
  double log_det = 0.0;
};

/**
 * Symmetric square root via eigendecomposition.
 *
 * Throws std::domain_error when the smallest eigenvalue is below
 * kEigenvalueFloor times the largest one (or the largest is not positive).
 */
[[nodiscard]] SymRoot sym_sqrt(const Matrix& a);

/// Solve A x = b for SPD A, failing on near-singular A with std::domain_error.
[[nodiscard]] Matrix spd_solve(const Matrix& a, const Matrix& b);

[[nodiscard]] Matrix spd_inverse(const Matrix& a);

/// log|A| for SPD A; std::domain_error when A is not positive definite.
[[nodiscard]] double spd_log_det(const Matrix& a);

}  // namespace tailtest
