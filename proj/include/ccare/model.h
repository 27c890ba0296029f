#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccare/care.h"
#include "ccare/matcore.h"

namespace ccare {

/// Continuous coupled algebraic Riccati equation with N modes:
///   A_i^T X_i + X_i A_i - X_i S_i X_i + sum_{j != i} delta(i, j) X_j + Q_i = 0.
///
/// Mode indices are zero-based throughout the API; human-readable messages
/// print them one-based.
struct CcareProblem {
  Eigen::Index n = 0;
  std::vector<Matrix> A;
  std::vector<SymMatrix> S;
  std::vector<SymMatrix> Q;
  Matrix delta;

  int modes() const { return static_cast<int>(A.size()); }
};

/// Per-mode nonnegative shifts rho_i.
class ShiftVector {
 public:
  ShiftVector() = default;
  explicit ShiftVector(std::vector<double> rho);
  static ShiftVector uniform(int modes, double rho);

  const std::vector<double>& values() const { return rho_; }
  double operator[](int i) const { return rho_[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(rho_.size()); }

  bool operator==(const ShiftVector&) const = default;

 private:
  std::vector<double> rho_;
};

enum class Severity { kError, kNote };

struct Violation {
  Severity severity = Severity::kError;
  std::string rule;
  /// Zero-based mode (row) index the rule refers to, if any.
  std::optional<int> mode;
  /// Zero-based column for entry-level rules on delta.
  std::optional<int> column;
  std::string message;
};

/// All invariant violations of the problem; empty iff the problem is valid.
/// A single-mode problem yields one kNote entry and no errors.
std::vector<Violation> validate(const CcareProblem& p);

/// True iff validate() reports no kError entries.
bool is_valid(const CcareProblem& p);

/// R_i(X_1, ..., X_N), symmetrized.
SymMatrix ccare_residual(const CcareProblem& p, std::span<const SymMatrix> X,
                         int i);

/// max_i ||R_i(X)||_F.
double residual_max_fro(const CcareProblem& p, std::span<const SymMatrix> X);

/// rho_i = max(0, abscissa(A_i) + margin).
ShiftVector auto_shifts(const CcareProblem& p, double margin = 0.01);

/// Builds the CARE solved for mode i in one sweep:
///   A' = A_i - rho_i I,  S' = S_i,
///   Q' = Q_i + sum_{j<i} delta(i,j) X_j^new + sum_{j>i} delta(i,j) X_j^old
///        + 2 rho_i X_i^old.
/// `updated` holds the already-computed components j < i (accelerated sweep,
/// size i) or is empty (regular sweep: every j != i comes from `previous`).
/// Throws kInvariantViolation if the assembled Q' is not PSD.
CareInstance assemble_step_care(const CcareProblem& p, const ShiftVector& rho,
                                int i, std::span<const SymMatrix> updated,
                                std::span<const SymMatrix> previous);

/// Mode-i data as a plain CARE (no coupling, no shift).
CareInstance mode_care(const CcareProblem& p, int i);

}  // namespace ccare
