#include "tailtest/matrix_kit.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace tailtest {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": expected a non-empty square matrix");
  }
}

Index triangular_root(Index len) {
  // Smallest k with k(k+1)/2 == len, or -1.
  const auto k = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
  return vech_size(k) == len ? k : -1;
}

// Eigenvalue screen shared by every SPD entry point.
Eigen::SelfAdjointEigenSolver<Matrix> checked_eigen(const Matrix& a, const char* what) {
  require_square(a, what);
  if (!a.allFinite()) {
    throw std::domain_error(std::string(what) + ": non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a));
  if (eig.info() != Eigen::Success) {
    throw std::domain_error(std::string(what) + ": eigendecomposition failed");
  }
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= kEigenvalueFloor * top) {
    throw std::domain_error(std::string(what) + ": matrix is not positive definite");
  }
  return eig;
}

}  // namespace

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Index k) {
  if (v.size() != k * k) {
    throw std::invalid_argument("unvec: length is not k^2");
  }
  return Eigen::Map<const Matrix>(v.data(), k, k);
}

Index vech_index(Index i, Index j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

Vector vech(const Matrix& a) {
  require_square(a, "vech");
  if (!is_symmetric(a)) {
    throw std::invalid_argument("vech: matrix is not symmetric");
  }
  const Index k = a.rows();
  Vector out(vech_size(k));
  Index pos = 0;
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i <= j; ++i) {
      out(pos++) = a(i, j);
    }
  }
  return out;
}

Matrix unvech(const Vector& v) {
  const Index k = triangular_root(v.size());
  if (k <= 0) {
    throw std::invalid_argument("unvech: length is not triangular");
  }
  Matrix out(k, k);
  Index pos = 0;
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i <= j; ++i) {
      out(i, j) = v(pos);
      out(j, i) = v(pos);
      ++pos;
    }
  }
  return out;
}

Matrix duplication_matrix(Index k) {
  if (k < 1) throw std::invalid_argument("duplication_matrix: k must be >= 1");
  Matrix p = Matrix::Zero(vech_size(k), k * k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < k; ++i) {
      p(vech_index(i, j), i + k * j) = 1.0;
    }
  }
  return p;
}

Matrix commutation_matrix(Index k) {
  if (k < 1) throw std::invalid_argument("commutation_matrix: k must be >= 1");
  Matrix out = Matrix::Zero(k * k, k * k);
  // (e_i e_j') (x) (e_j e_i') summed over i, j.
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      out(i * k + j, j * k + i) = 1.0;
    }
  }
  return out;
}

Matrix j_matrix(Index k) {
  if (k < 1) throw std::invalid_argument("j_matrix: k must be >= 1");
  const Vector vi = vec(Matrix::Identity(k, k));
  return vi * vi.transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix symmetrize(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

SymRoot sym_sqrt(const Matrix& a) {
  const auto eig = checked_eigen(a, "sym_sqrt");
  const Vector& ev = eig.eigenvalues();
  const Matrix& q = eig.eigenvectors();
  SymRoot out;
  out.eigenvalues = ev;
  out.root = symmetrize(q * ev.cwiseSqrt().asDiagonal() * q.transpose());
  out.inv_root = symmetrize(q * ev.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose());
  out.log_det = ev.array().log().sum();
  return out;
}

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  checked_eigen(a, "spd_solve");
  Eigen::LLT<Matrix> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("spd_solve: Cholesky factorization failed");
  }
  return llt.solve(b);
}

Matrix spd_inverse(const Matrix& a) {
  return symmetrize(spd_solve(a, Matrix::Identity(a.rows(), a.cols())));
}

double spd_log_det(const Matrix& a) {
  return checked_eigen(a, "spd_log_det").eigenvalues().array().log().sum();
}

}  // namespace tailtest
