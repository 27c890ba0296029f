#include "ccare/model.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccare {
namespace {

std::string mode_name(int i) { return "mode " + std::to_string(i + 1); }

void check_mode_index(const CcareProblem& p, int i) {
  if (i < 0 || i >= p.modes()) {
    throw CcareError(ErrorKind::kIndexOutOfRange,
                     "mode index " + std::to_string(i) + " outside [0, " +
                         std::to_string(p.modes()) + ")");
  }
}

void check_iterates(const CcareProblem& p, std::span<const SymMatrix> X,
                    const char* what) {
  if (static_cast<int>(X.size()) != p.modes()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     std::string(what) + ": expected " +
                         std::to_string(p.modes()) + " components, got " +
                         std::to_string(X.size()));
  }
  for (const SymMatrix& x : X) {
    if (x.dim() != p.n) {
      throw CcareError(ErrorKind::kDimensionMismatch,
                       std::string(what) + ": component has wrong size");
    }
  }
}

}  // namespace

ShiftVector::ShiftVector(std::vector<double> rho) : rho_(std::move(rho)) {
  for (double r : rho_) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw CcareError(ErrorKind::kInvalidArgument,
                       "shifts must be finite and nonnegative");
    }
  }
}

ShiftVector ShiftVector::uniform(int modes, double rho) {
  return ShiftVector(std::vector<double>(static_cast<size_t>(modes), rho));
}

std::vector<Violation> validate(const CcareProblem& p) {
  std::vector<Violation> out;
  auto add = [&out](std::string rule, std::optional<int> mode,
                    std::optional<int> col, std::string msg,
                    Severity sev = Severity::kError) {
    out.push_back({sev, std::move(rule), mode, col, std::move(msg)});
  };

  const int N = p.modes();
  if (N < 1) {
    add("mode count", std::nullopt, std::nullopt, "problem has no modes");
    return out;
  }
  if (p.n < 1) {
    add("state dimension", std::nullopt, std::nullopt,
        "state dimension must be positive");
    return out;
  }
  if (static_cast<int>(p.S.size()) != N || static_cast<int>(p.Q.size()) != N) {
    add("mode count", std::nullopt, std::nullopt,
        "A, S and Q must list the same number of modes");
    return out;
  }
  if (p.delta.rows() != N || p.delta.cols() != N) {
    add("coupling shape", std::nullopt, std::nullopt,
        "delta must be " + std::to_string(N) + "x" + std::to_string(N));
    return out;
  }

  for (int i = 0; i < N; ++i) {
    const auto ui = static_cast<size_t>(i);
    if (p.A[ui].rows() != p.n || p.A[ui].cols() != p.n ||
        p.S[ui].dim() != p.n || p.Q[ui].dim() != p.n) {
      add("matrix size", i, std::nullopt,
          mode_name(i) + ": A, S, Q must be " + std::to_string(p.n) + "x" +
              std::to_string(p.n));
      continue;
    }
    if (!p.A[ui].allFinite()) {
      add("finite entries", i, std::nullopt, mode_name(i) + ": A is not finite");
      continue;
    }
    if (!is_psd(p.S[ui])) {
      add("S positive semidefinite", i, std::nullopt,
          mode_name(i) + ": S is not positive semidefinite");
    }
    if (!is_psd(p.Q[ui])) {
      add("Q positive semidefinite", i, std::nullopt,
          mode_name(i) + ": Q is not positive semidefinite");
    }
  }

  if (!p.delta.allFinite()) {
    add("finite entries", std::nullopt, std::nullopt, "delta is not finite");
    return out;
  }
  for (int i = 0; i < N; ++i) {
    bool row_has_negative = false;
    double row_sum = 0.0;
    for (int j = 0; j < N; ++j) {
      const double d = p.delta(i, j);
      const std::string entry = "delta[" + std::to_string(i + 1) + "][" +
                                std::to_string(j + 1) + "]";
      if (i == j) {
        if (d != 0.0) {
          add("zero diagonal coupling", i, j, entry + " must be 0");
        }
        continue;
      }
      if (d < 0.0) {
        row_has_negative = true;
        add("negative coupling", i, j,
            entry + " = " + std::to_string(d) + " is negative coupling");
      }
      row_sum += d;
    }
    // A row already flagged for a negative entry is not reported twice.
    if (N >= 2 && !row_has_negative && !(row_sum > 0.0)) {
      add("zero row sum", i, std::nullopt,
          "coupling row " + std::to_string(i + 1) +
              " has zero row sum (needs sum_{j != i} delta[i][j] > 0)");
    }
  }
  if (N == 1) {
    add("single mode", std::nullopt, std::nullopt,
        "N = 1: problem reduces to a single uncoupled CARE",
        Severity::kNote);
  }
  return out;
}

bool is_valid(const CcareProblem& p) {
  const auto v = validate(p);
  return std::none_of(v.begin(), v.end(), [](const Violation& x) {
    return x.severity == Severity::kError;
  });
}

SymMatrix ccare_residual(const CcareProblem& p, std::span<const SymMatrix> X,
                         int i) {
  check_mode_index(p, i);
  check_iterates(p, X, "ccare_residual");
  const auto ui = static_cast<size_t>(i);
  const Matrix& A = p.A[ui];
  const Matrix& x = X[ui].mat();
  Matrix r = A.transpose() * x + x * A - x * p.S[ui].mat() * x + p.Q[ui].mat();
  for (int j = 0; j < p.modes(); ++j) {
    if (j != i) r += p.delta(i, j) * X[static_cast<size_t>(j)].mat();
  }
  return SymMatrix::symmetrize(r);
}

double residual_max_fro(const CcareProblem& p, std::span<const SymMatrix> X) {
  double m = 0.0;
  for (int i = 0; i < p.modes(); ++i) {
    m = std::max(m, fro_norm(ccare_residual(p, X, i)));
  }
  return m;
}

ShiftVector auto_shifts(const CcareProblem& p, double margin) {
  if (!(margin > 0.0)) {
    throw CcareError(ErrorKind::kInvalidArgument, "shift margin must be > 0");
  }
  std::vector<double> rho;
  rho.reserve(static_cast<size_t>(p.modes()));
  for (const Matrix& A : p.A) {
    rho.push_back(std::max(0.0, spectral_abscissa(A) + margin));
  }
  return ShiftVector(std::move(rho));
}

CareInstance assemble_step_care(const CcareProblem& p, const ShiftVector& rho,
                                int i, std::span<const SymMatrix> updated,
                                std::span<const SymMatrix> previous) {
  check_mode_index(p, i);
  check_iterates(p, previous, "assemble_step_care");
  if (rho.size() != p.modes()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "shift vector length differs from mode count");
  }
  if (!updated.empty() && static_cast<int>(updated.size()) != i) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "accelerated assembly for mode " + std::to_string(i) +
                         " needs exactly " + std::to_string(i) +
                         " updated components");
  }
  for (const SymMatrix& x : updated) {
    if (x.dim() != p.n) {
      throw CcareError(ErrorKind::kDimensionMismatch,
                       "assemble_step_care: updated component has wrong size");
    }
  }

  const auto ui = static_cast<size_t>(i);
  const double r = rho[i];
  Matrix q = p.Q[ui].mat() + 2.0 * r * previous[ui].mat();
  for (int j = 0; j < p.modes(); ++j) {
    if (j == i) continue;
    const auto uj = static_cast<size_t>(j);
    const SymMatrix& xj =
        (!updated.empty() && j < i) ? updated[uj] : previous[uj];
    q += p.delta(i, j) * xj.mat();
  }

  CareInstance inst{
      p.A[ui] - r * Matrix::Identity(p.n, p.n), p.S[ui],
      SymMatrix::symmetrize(q)};
  if (!is_psd(inst.Q)) {
    throw CcareError(ErrorKind::kInvariantViolation,
                     mode_name(i) + ": assembled Q' is not positive "
                                    "semidefinite (are the iterates PSD?)");
  }
  return inst;
}

CareInstance mode_care(const CcareProblem& p, int i) {
  check_mode_index(p, i);
  const auto ui = static_cast<size_t>(i);
  return {p.A[ui], p.S[ui], p.Q[ui]};
}

}  // namespace ccare
