#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccare/model.h"

namespace ccare {

/// Regular sweeps solve every mode from the previous sweep's iterates.
/// Accelerated sweeps run i = 1..N in order and feed each freshly computed
/// X_j (j < i) into the later modes of the same sweep.
enum class Variant { kRegular, kAccelerated };

const char* to_string(Variant v);

struct AutoShift {
  double margin = 0.01;
};
using ShiftSpec = std::variant<AutoShift, ShiftVector>;

struct ZeroInit {};
struct ScaledIdentityInit {
  double c = 0.0;
};
struct ExplicitInit {
  std::vector<SymMatrix> X;
};
using InitSpec = std::variant<ZeroInit, ScaledIdentityInit, ExplicitInit>;

struct IterationConfig {
  Variant variant = Variant::kAccelerated;
  /// Stop once max_i ||X_i^(k) - X_i^(k-1)||_F < tol.
  double tol = 1e-8;
  int max_iter = 500;
  ShiftSpec shifts = AutoShift{};
  InitSpec initial = ZeroInit{};
  /// Flag sweeps whose consecutive iterates are not Loewner-comparable.
  bool check_monotone = true;
  /// Flag sweeps with a non-stable closed loop A_i - rho_i I - S_i X_i^(k).
  bool check_closed_loop = true;
  /// Tolerance of the per-sweep Loewner comparisons.
  double order_tol = kDefaultOrderTol;
  /// Opt-in: additionally require residual_max_fro < residual_tol to stop.
  std::optional<double> residual_tol;
  /// Solve the mode CAREs of a regular sweep on separate threads.
  bool parallel = false;
};

/// One sweep k -> k+1 of the trace. All per-mode vectors have length N.
struct SweepRecord {
  int sweep = 0;
  double delta = 0.0;
  double residual = 0.0;
  std::vector<SymMatrix> X;
  std::vector<std::vector<double>> eigvals;
  /// loewner_compare(X_i^(k), X_i^(k-1)).
  std::vector<OrderResult> step_order;
  std::vector<bool> monotone_up;
  std::vector<bool> monotone_down;
  std::vector<double> closed_loop_abscissa;
};

struct IterationTrace {
  std::vector<SweepRecord> records;
};

enum class Direction { kIncreasing, kDecreasing, kMixed, kStationary };

const char* to_string(Direction d);

struct SolveReport {
  Variant variant = Variant::kAccelerated;
  bool converged = false;
  int iterations = 0;
  std::vector<SymMatrix> initial;
  std::vector<SymMatrix> solution;
  double final_residual = 0.0;
  IterationTrace trace;
  ShiftVector shifts_used;
  Direction monotone_direction = Direction::kStationary;
  /// "diverging" when the run was cut off by the growth guard.
  std::string annotation;
  /// Invariant breaches spotted by check_monotone / check_closed_loop.
  std::vector<std::string> warnings;
};

/// Resolves the configured shifts against the problem.
ShiftVector resolve_shifts(const CcareProblem& p, const ShiftSpec& spec);

/// Resolves the configured initial iterates (validated: N PSD n x n).
std::vector<SymMatrix> resolve_initial(const CcareProblem& p,
                                       const InitSpec& spec);

/// One sweep of either variant from `previous`. Throws SubmoduleError if an
/// inner CARE solve fails.
std::vector<SymMatrix> sweep_once(const CcareProblem& p, const ShiftVector& rho,
                                  Variant variant,
                                  const std::vector<SymMatrix>& previous,
                                  int sweep_index = 1, bool parallel = false);

/// Runs the configured variant to convergence or max_iter sweeps.
///
/// Throws kPreconditionFailed when the problem is invalid or a shifted pair
/// fails its PBH test. Non-convergence is reported through
/// SolveReport::converged rather than thrown.
SolveReport run(const CcareProblem& p, const IterationConfig& cfg);

/// Which monotone regime the initial iterates put a run in.
enum class Regime { kIncreasing, kDecreasing, kUndetermined };

const char* to_string(Regime r);

struct RegimeClass {
  Regime regime = Regime::kUndetermined;
  /// True when the regime follows from the sign of R_i(X^(0)) in every mode
  /// (R >= 0: increasing, R <= 0: decreasing). Otherwise the regime is the
  /// observed direction of the first accelerated sweep from X^(0).
  bool from_residual_sign = false;
};

RegimeClass classify_regime(const CcareProblem& p, const ShiftVector& rho,
                            const std::vector<SymMatrix>& initial,
                            double tol = kDefaultOrderTol);

/// Relation a comparison is expected to satisfy in a given regime;
/// Equal always conforms.
bool conforms(Relation actual, Relation expected);

struct PairComparison {
  int sweep = 0;
  int mode = 0;
  /// loewner_compare(accelerated X_i^(k), regular Y_i^(k)).
  OrderResult order;
};

struct CompareResult {
  SolveReport regular;
  SolveReport accelerated;
  RegimeClass regime;
  Relation expected = Relation::kEqual;
  std::vector<PairComparison> comparisons;

  /// True iff every comparison conforms to `expected` (vacuously true when
  /// the regime is undetermined).
  bool all_conform() const;
};

/// Runs both variants from the same initial iterates and shifts and compares
/// them sweep by sweep. Increasing regime expects accelerated >= regular,
/// decreasing regime expects accelerated <= regular.
CompareResult compare_run(const CcareProblem& p, const IterationConfig& cfg);

struct SweepRow {
  ShiftVector shift;
  Variant variant = Variant::kRegular;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::optional<std::string> error;
};

/// One run per (shift, variant); cfg.shifts and cfg.variant are overridden.
/// Rows are ordered by decreasing shift (lexicographic), regular before
/// accelerated. A failing row records its error and the sweep continues.
std::vector<SweepRow> shift_sweep(const CcareProblem& p,
                                  const IterationConfig& cfg,
                                  const std::vector<ShiftVector>& shift_values);

struct AugmentedStepResult {
  RegimeClass regime;
  Relation expected = Relation::kEqual;
  /// loewner_compare(X_i^(1) under rho, Y_i^(1) under rho + delta_rho).
  std::vector<OrderResult> per_mode;
};

/// One accelerated sweep under rho and under rho + delta_rho from the same
/// initial iterates.
AugmentedStepResult augmented_first_step(const CcareProblem& p,
                                         const IterationConfig& cfg,
                                         const std::vector<double>& delta_rho);

}  // namespace ccare
