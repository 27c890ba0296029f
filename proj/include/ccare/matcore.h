#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ccare/errors.h"

namespace ccare {

/// General dense real matrix. Entries are checked for finiteness wherever a
/// matrix crosses into the library (see require_finite).
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultSymTol = 1e-6;
inline constexpr double kDefaultOrderTol = 1e-8;
inline constexpr double kDefaultPsdTol = 1e-8;
inline constexpr double kDefaultStableTol = 1e-12;

/// Throws kNonFinite if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Square real symmetric matrix. Construction symmetrizes the input as
/// (M + M^T) / 2 after checking that the asymmetry is at most
/// sym_tol * (1 + ||M||_F).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m, double sym_tol = kDefaultSymTol);

  static SymMatrix zero(Eigen::Index n);
  static SymMatrix identity(Eigen::Index n, double scale = 1.0);
  /// Symmetrizes without the asymmetry check. Use only where the input is
  /// symmetric up to rounding by construction.
  static SymMatrix symmetrize(const Matrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  struct Trusted {};
  SymMatrix(Trusted, Matrix m) : m_(std::move(m)) {}

  Matrix m_;
};

inline SymMatrix operator*(double s, const SymMatrix& x) { return x * s; }

enum class Relation { kGreaterEqual, kLessEqual, kEqual, kIncomparable };

const char* to_string(Relation r);

/// Loewner classification of X - Y by its extreme eigenvalues.
struct OrderResult {
  Relation relation = Relation::kIncomparable;
  double min_eig_diff = 0.0;
  double max_eig_diff = 0.0;
  /// Effective (scaled) tolerance the classification used.
  double tolerance = 0.0;
};

/// All eigenvalues of a symmetric matrix, ascending.
std::vector<double> sym_eigvals(const SymMatrix& x);

/// Eigenvalues of a square matrix with multiplicity; conjugate pairs are
/// both reported.
std::vector<std::complex<double>> eigvals_general(const Matrix& m);

double spectral_abscissa(const Matrix& m);

/// True iff every eigenvalue satisfies Re(lambda) < -tol.
bool is_stable(const Matrix& m, double tol = kDefaultStableTol);

/// True iff lambda_min(X) >= -tol * (1 + ||X||_2).
bool is_psd(const SymMatrix& x, double tol = kDefaultPsdTol);

/// Classifies X - Y with the effective tolerance
/// tol * (1 + max(||X||_2, ||Y||_2)).
OrderResult loewner_compare(const SymMatrix& x, const SymMatrix& y,
                            double tol = kDefaultOrderTol);

double fro_norm(const Matrix& m);
inline double fro_norm(const SymMatrix& x) { return fro_norm(x.mat()); }

}  // namespace ccare
