#include "ccare/matcore.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ccare {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEigenFailure: return "EigenFailure";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNotSymmetric: return "NotSymmetric";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kUnstableCoefficient: return "UnstableCoefficient";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kNotStabilizable: return "NotStabilizable";
    case ErrorKind::kNotDetectable: return "NotDetectable";
    case ErrorKind::kSubspaceFailure: return "SubspaceFailure";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kInvariantViolation: return "InvariantViolation";
    case ErrorKind::kPreconditionFailed: return "PreconditionFailed";
    case ErrorKind::kSubmoduleError: return "SubmoduleError";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kUnknownExample: return "UnknownExample";
  }
  return "Unknown";
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::kGreaterEqual: return "GreaterEqual";
    case Relation::kLessEqual: return "LessEqual";
    case Relation::kEqual: return "Equal";
    case Relation::kIncomparable: return "Incomparable";
  }
  return "Unknown";
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw CcareError(ErrorKind::kNonFinite,
                     std::string(what) + " has non-finite entries");
  }
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     std::string(what) + " must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

// Largest absolute eigenvalue, i.e. the spectral norm of a symmetric matrix.
double spectral_radius(const std::vector<double>& eig) {
  double r = 0.0;
  for (double v : eig) r = std::max(r, std::abs(v));
  return r;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m, double sym_tol) {
  require_square(m, "symmetric matrix");
  require_finite(m, "symmetric matrix");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol * (1.0 + m.norm())) {
    throw CcareError(ErrorKind::kNotSymmetric,
                     "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Eigen::Index n) {
  return SymMatrix(Trusted{}, Matrix::Zero(n, n));
}

SymMatrix SymMatrix::identity(Eigen::Index n, double scale) {
  return SymMatrix(Trusted{}, scale * Matrix::Identity(n, n));
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  require_square(m, "symmetric matrix");
  return SymMatrix(Trusted{}, 0.5 * (m + m.transpose()));
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim() != o.dim()) {
    throw CcareError(ErrorKind::kDimensionMismatch, "SymMatrix sum");
  }
  return SymMatrix(Trusted{}, m_ + o.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim() != o.dim()) {
    throw CcareError(ErrorKind::kDimensionMismatch, "SymMatrix difference");
  }
  return SymMatrix(Trusted{}, m_ - o.m_);
}

SymMatrix SymMatrix::operator*(double s) const {
  return SymMatrix(Trusted{}, s * m_);
}

std::vector<double> sym_eigvals(const SymMatrix& x) {
  // Householder tridiagonalization followed by implicit symmetric QL/QR.
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw CcareError(ErrorKind::kEigenFailure,
                     "symmetric eigensolver did not converge");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<std::complex<double>> eigvals_general(const Matrix& m) {
  require_square(m, "matrix");
  require_finite(m, "matrix");
  // Hessenberg reduction followed by the shifted real-Schur QR iteration.
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw CcareError(ErrorKind::kEigenFailure,
                     "general eigensolver did not converge");
  }
  const Eigen::VectorXcd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_abscissa(const Matrix& m) {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& l : eigvals_general(m)) a = std::max(a, l.real());
  return a;
}

bool is_stable(const Matrix& m, double tol) {
  return spectral_abscissa(m) < -tol;
}

bool is_psd(const SymMatrix& x, double tol) {
  const std::vector<double> eig = sym_eigvals(x);
  return eig.front() >= -tol * (1.0 + spectral_radius(eig));
}

OrderResult loewner_compare(const SymMatrix& x, const SymMatrix& y,
                            double tol) {
  if (x.dim() != y.dim()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "loewner_compare operands differ in size");
  }
  const std::vector<double> diff = sym_eigvals(x - y);
  const double scale =
      std::max(spectral_radius(sym_eigvals(x)), spectral_radius(sym_eigvals(y)));

  OrderResult r;
  r.min_eig_diff = diff.front();
  r.max_eig_diff = diff.back();
  r.tolerance = tol * (1.0 + scale);
  const bool ge = r.min_eig_diff >= -r.tolerance;
  const bool le = r.max_eig_diff <= r.tolerance;
  if (ge && le) {
    r.relation = Relation::kEqual;
  } else if (ge) {
    r.relation = Relation::kGreaterEqual;
  } else if (le) {
    r.relation = Relation::kLessEqual;
  } else {
    r.relation = Relation::kIncomparable;
  }
  return r;
}

double fro_norm(const Matrix& m) { return m.norm(); }

}  // namespace ccare
