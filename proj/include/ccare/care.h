#pragma once

#include "ccare/matcore.h"

namespace ccare {

inline constexpr double kDefaultPbhTol = 1e-10;
// Eigenvalues with Re(lambda) above -kPbhImagAxisBand count as closed
// right-half-plane in the PBH tests.
inline constexpr double kPbhImagAxisBand = 1e-10;

/// A single continuous algebraic Riccati equation
///   A^T X + X A - X S X + Q = 0.
struct CareInstance {
  Matrix A;
  SymMatrix S;
  SymMatrix Q;

  Eigen::Index dim() const { return A.rows(); }
};

struct CareSolution {
  SymMatrix X;
  double closed_loop_abscissa = 0.0;
  double residual_fro = 0.0;
};

/// PBH test: (A, S) is stabilizable iff [A - lambda I | S] has full row rank
/// for every eigenvalue lambda of A with Re(lambda) >= 0.
bool pbh_stabilizable(const Matrix& A, const SymMatrix& S,
                      double tol = kDefaultPbhTol);

/// (A, Q) is detectable iff (A^T, Q^T) is stabilizable.
bool pbh_detectable(const Matrix& A, const SymMatrix& Q,
                    double tol = kDefaultPbhTol);

/// Solves A^T X + X A + C = 0 through the vectorized n^2 x n^2 system.
/// Requires A stable.
SymMatrix solve_lyapunov(const Matrix& A, const SymMatrix& C);

/// Left-hand side of the CARE evaluated at X, symmetrized.
SymMatrix care_residual(const CareInstance& inst, const SymMatrix& X);

/// Acceptance bound on ||care_residual||_F for a computed solution:
/// 1e-9 * (1 + ||Q||_F + ||X||_F^2 ||S||_F).
double care_res_tol(const CareInstance& inst, const SymMatrix& X);

/// Unique positive semidefinite stabilizing solution.
///
/// Computes an ordered complex Schur form of the Hamiltonian
///   H = [[A, -S], [-Q, -A^T]]
/// with the n stable eigenvalues leading, and returns U2 * U1^{-1} from the
/// spanning basis [U1; U2] of the stable invariant subspace.
///
/// Throws kNotStabilizable / kNotDetectable when the PBH preconditions fail,
/// and kSubspaceFailure when the stable subspace cannot be separated, U1 is
/// singular, or the result fails its residual check.
CareSolution solve_care(const CareInstance& inst);

/// Newton-Kleinman iteration from a stabilizing initial guess X0. Kept
/// independent of solve_care so the two can cross-check each other.
SymMatrix newton_care_oracle(const CareInstance& inst, const SymMatrix& X0);

}  // namespace ccare
