#include "ccare/care.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace ccare {
namespace {

using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

void require_same_dim(const CareInstance& inst) {
  const Eigen::Index n = inst.A.rows();
  if (inst.A.cols() != n || inst.S.dim() != n || inst.Q.dim() != n) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "CARE coefficients must all be " + std::to_string(n) +
                         "x" + std::to_string(n));
  }
}

int numerical_rank(const ComplexMatrix& m, double tol) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold =
      tol * sv(0) * static_cast<double>(std::max(m.rows(), m.cols()));
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > threshold) ++rank;
  }
  return rank;
}

// Swaps the adjacent diagonal entries k, k+1 of the upper-triangular T with a
// Givens rotation, updating the Schur vectors U so that H = U T U^* holds.
void swap_schur_pair(ComplexMatrix& T, ComplexMatrix& U, Eigen::Index k) {
  const Complex a = T(k, k);
  const Complex b = T(k + 1, k + 1);
  const Complex x = T(k, k + 1);
  const Complex d = b - a;
  const double r = std::hypot(std::abs(x), std::abs(d));
  if (r == 0.0) return;
  // First column spans the eigenvector of the 2x2 block for eigenvalue b.
  const Complex c = x / r;
  const Complex s = d / r;
  Eigen::Matrix2cd G;
  G << c, -std::conj(s), s, std::conj(c);

  T.middleCols(k, 2) = T.middleCols(k, 2) * G;
  T.middleRows(k, 2) = G.adjoint() * T.middleRows(k, 2);
  U.middleCols(k, 2) = U.middleCols(k, 2) * G;
  T(k + 1, k) = 0.0;
}

}  // namespace

bool pbh_stabilizable(const Matrix& A, const SymMatrix& S, double tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || S.dim() != n) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "pbh_stabilizable needs square A and S of equal size");
  }
  for (const Complex& lambda : eigvals_general(A)) {
    if (lambda.real() < -kPbhImagAxisBand) continue;
    ComplexMatrix block(n, 2 * n);
    block.leftCols(n) = A.cast<Complex>();
    block.leftCols(n).diagonal().array() -= lambda;
    block.rightCols(n) = S.mat().cast<Complex>();
    if (numerical_rank(block, tol) < n) return false;
  }
  return true;
}

bool pbh_detectable(const Matrix& A, const SymMatrix& Q, double tol) {
  return pbh_stabilizable(A.transpose(),
                          SymMatrix::symmetrize(Q.mat().transpose()), tol);
}

SymMatrix solve_lyapunov(const Matrix& A, const SymMatrix& C) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || C.dim() != n) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "solve_lyapunov needs square A and C of equal size");
  }
  require_finite(A, "Lyapunov coefficient");
  if (!is_stable(A)) {
    throw CcareError(ErrorKind::kUnstableCoefficient,
                     "Lyapunov coefficient is not stable (abscissa " +
                         std::to_string(spectral_abscissa(A)) + ")");
  }
  // vec(A^T X + X A) = (I (x) A^T + A^T (x) I) vec(X), column-major vec.
  const Matrix I = Matrix::Identity(n, n);
  const Matrix At = A.transpose();
  Matrix K(n * n, n * n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      K.block(p * n, q * n, n, n) = I(p, q) * At + At(p, q) * I;
    }
  }
  Eigen::PartialPivLU<Matrix> lu(K);
  if (!(lu.rcond() > 1e-14)) {
    throw CcareError(ErrorKind::kSingularSystem,
                     "vectorized Lyapunov system is numerically singular");
  }
  const Eigen::VectorXd rhs =
      -Eigen::Map<const Eigen::VectorXd>(C.mat().data(), n * n);
  const Eigen::VectorXd v = lu.solve(rhs);
  return SymMatrix::symmetrize(Eigen::Map<const Matrix>(v.data(), n, n));
}

SymMatrix care_residual(const CareInstance& inst, const SymMatrix& X) {
  require_same_dim(inst);
  if (X.dim() != inst.dim()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "CARE residual: X has the wrong size");
  }
  const Matrix& x = X.mat();
  return SymMatrix::symmetrize(inst.A.transpose() * x + x * inst.A -
                               x * inst.S.mat() * x + inst.Q.mat());
}

double care_res_tol(const CareInstance& inst, const SymMatrix& X) {
  const double xf = fro_norm(X);
  return 1e-9 * (1.0 + fro_norm(inst.Q) + xf * xf * fro_norm(inst.S));
}

CareSolution solve_care(const CareInstance& inst) {
  require_same_dim(inst);
  require_finite(inst.A, "CARE matrix A");
  if (!pbh_stabilizable(inst.A, inst.S)) {
    throw CcareError(ErrorKind::kNotStabilizable, "(A, S) is not stabilizable");
  }
  if (!pbh_detectable(inst.A, inst.Q)) {
    throw CcareError(ErrorKind::kNotDetectable, "(A, Q) is not detectable");
  }

  const Eigen::Index n = inst.dim();
  Matrix H(2 * n, 2 * n);
  H << inst.A, -inst.S.mat(), -inst.Q.mat(), -inst.A.transpose();

  Eigen::ComplexSchur<ComplexMatrix> schur(H.cast<Complex>());
  if (schur.info() != Eigen::Success) {
    throw CcareError(ErrorKind::kEigenFailure,
                     "Schur decomposition of the Hamiltonian did not converge");
  }
  ComplexMatrix T = schur.matrixT();
  ComplexMatrix U = schur.matrixU();

  // Bubble each stable eigenvalue up to the next free leading slot.
  Eigen::Index next = 0;
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    if (T(j, j).real() < 0.0) {
      for (Eigen::Index k = j; k > next; --k) swap_schur_pair(T, U, k - 1);
      ++next;
    }
  }
  if (next != n) {
    throw CcareError(ErrorKind::kSubspaceFailure,
                     "Hamiltonian has " + std::to_string(next) +
                         " stable eigenvalues, expected " + std::to_string(n));
  }

  const ComplexMatrix U1 = U.topLeftCorner(n, n);
  const ComplexMatrix U2 = U.bottomLeftCorner(n, n);
  // X = U2 U1^{-1}, i.e. U1^T X^T = U2^T.
  Eigen::PartialPivLU<ComplexMatrix> lu(U1.transpose());
  if (!(lu.rcond() > 1e-13)) {
    throw CcareError(ErrorKind::kSubspaceFailure,
                     "leading block of the stable subspace basis is singular");
  }
  const ComplexMatrix Xc = lu.solve(U2.transpose()).transpose();
  if (Xc.imag().cwiseAbs().maxCoeff() > 1e-8 * (1.0 + Xc.real().norm())) {
    throw CcareError(ErrorKind::kSubspaceFailure,
                     "stable subspace produced a non-real solution");
  }

  CareSolution sol;
  sol.X = SymMatrix::symmetrize(Xc.real());
  sol.residual_fro = fro_norm(care_residual(inst, sol.X));
  sol.closed_loop_abscissa =
      spectral_abscissa(inst.A - inst.S.mat() * sol.X.mat());
  if (!(sol.residual_fro <= care_res_tol(inst, sol.X))) {
    throw CcareError(ErrorKind::kSubspaceFailure,
                     "solution residual " + std::to_string(sol.residual_fro) +
                         " exceeds tolerance");
  }
  if (!(sol.closed_loop_abscissa < 0.0)) {
    throw CcareError(ErrorKind::kSubspaceFailure,
                     "solution is not stabilizing");
  }
  return sol;
}

SymMatrix newton_care_oracle(const CareInstance& inst, const SymMatrix& X0) {
  require_same_dim(inst);
  if (X0.dim() != inst.dim()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "Newton oracle: X0 has the wrong size");
  }
  constexpr int kMaxSweeps = 200;
  SymMatrix X = X0;
  double prev_step = std::numeric_limits<double>::infinity();
  for (int m = 0; m < kMaxSweeps; ++m) {
    const Matrix closed_loop = inst.A - inst.S.mat() * X.mat();
    if (!is_stable(closed_loop)) {
      throw CcareError(ErrorKind::kUnstableCoefficient,
                       "Newton iterate " + std::to_string(m) +
                           " lost closed-loop stability");
    }
    // Newton step in correction form: (A - SX)^T D + D (A - SX) + R(X) = 0.
    const SymMatrix correction =
        solve_lyapunov(closed_loop, care_residual(inst, X));
    const double step = fro_norm(correction);
    const double scale = fro_norm(X);
    X = X + correction;
    if (step < 1e-12 * (1.0 + scale)) return X;
    // Past the quadratic phase the steps shrink monotonically; a step that
    // stops shrinking is rounding noise.
    if (m > 1 && step >= prev_step && step < 1e-6 * (1.0 + scale)) return X;
    prev_step = step;
  }
  throw CcareError(ErrorKind::kNoConvergence,
                   "Newton oracle did not converge in 200 sweeps");
}

}  // namespace ccare
