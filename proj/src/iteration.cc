#include "ccare/iteration.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace ccare {
namespace {

// Growth guard: a sweep delta beyond this multiple of the initial size marks
// the run as diverging.
constexpr double kDivergenceFactor = 1e12;

std::string mode_name(int i) { return "mode " + std::to_string(i + 1); }

SymMatrix solve_mode(const CcareProblem& p, const ShiftVector& rho, int i,
                     std::span<const SymMatrix> updated,
                     std::span<const SymMatrix> previous, int sweep_index) {
  try {
    const CareInstance inst = assemble_step_care(p, rho, i, updated, previous);
    // Re-symmetrized by construction of CareSolution::X.
    return solve_care(inst).X;
  } catch (const SubmoduleError&) {
    throw;
  } catch (const CcareError& e) {
    throw SubmoduleError(sweep_index, i, e);
  }
}

Direction classify_direction(const IterationTrace& trace) {
  bool any_ge = false, any_le = false, any_incomparable = false;
  for (const SweepRecord& r : trace.records) {
    for (const OrderResult& o : r.step_order) {
      switch (o.relation) {
        case Relation::kGreaterEqual: any_ge = true; break;
        case Relation::kLessEqual: any_le = true; break;
        case Relation::kIncomparable: any_incomparable = true; break;
        case Relation::kEqual: break;
      }
    }
  }
  if (any_incomparable || (any_ge && any_le)) return Direction::kMixed;
  if (any_ge) return Direction::kIncreasing;
  if (any_le) return Direction::kDecreasing;
  return Direction::kStationary;
}

void check_preconditions(const CcareProblem& p, const ShiftVector& rho) {
  std::ostringstream errs;
  for (const Violation& v : validate(p)) {
    if (v.severity == Severity::kError) errs << v.message << "; ";
  }
  if (!errs.str().empty()) {
    throw CcareError(ErrorKind::kPreconditionFailed,
                     "invalid problem: " + errs.str());
  }
  if (rho.size() != p.modes()) {
    throw CcareError(ErrorKind::kPreconditionFailed,
                     "expected " + std::to_string(p.modes()) + " shifts, got " +
                         std::to_string(rho.size()));
  }
  for (int i = 0; i < p.modes(); ++i) {
    const auto ui = static_cast<size_t>(i);
    const Matrix shifted = p.A[ui] - rho[i] * Matrix::Identity(p.n, p.n);
    if (!pbh_stabilizable(shifted, p.S[ui])) {
      throw CcareError(ErrorKind::kPreconditionFailed,
                       mode_name(i) + ": (A - rho I, S) fails the PBH "
                                      "stabilizability test");
    }
    if (!pbh_detectable(shifted, p.Q[ui])) {
      throw CcareError(ErrorKind::kPreconditionFailed,
                       mode_name(i) + ": (A - rho I, Q) fails the PBH "
                                      "detectability test");
    }
  }
}

}  // namespace

const char* to_string(Variant v) {
  return v == Variant::kRegular ? "regular" : "accelerated";
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kIncreasing: return "increasing";
    case Direction::kDecreasing: return "decreasing";
    case Direction::kMixed: return "mixed";
    case Direction::kStationary: return "stationary";
  }
  return "unknown";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kIncreasing: return "increasing";
    case Regime::kDecreasing: return "decreasing";
    case Regime::kUndetermined: return "undetermined";
  }
  return "unknown";
}

ShiftVector resolve_shifts(const CcareProblem& p, const ShiftSpec& spec) {
  if (const auto* a = std::get_if<AutoShift>(&spec)) {
    return auto_shifts(p, a->margin);
  }
  const ShiftVector& rho = std::get<ShiftVector>(spec);
  if (rho.size() != p.modes()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "expected " + std::to_string(p.modes()) + " shifts, got " +
                         std::to_string(rho.size()));
  }
  return rho;
}

std::vector<SymMatrix> resolve_initial(const CcareProblem& p,
                                       const InitSpec& spec) {
  const auto N = static_cast<size_t>(p.modes());
  if (std::holds_alternative<ZeroInit>(spec)) {
    return std::vector<SymMatrix>(N, SymMatrix::zero(p.n));
  }
  if (const auto* s = std::get_if<ScaledIdentityInit>(&spec)) {
    if (!(s->c >= 0.0) || !std::isfinite(s->c)) {
      throw CcareError(ErrorKind::kInvalidArgument,
                       "scaled-identity initial iterate needs c >= 0");
    }
    return std::vector<SymMatrix>(N, SymMatrix::identity(p.n, s->c));
  }
  const auto& X = std::get<ExplicitInit>(spec).X;
  if (X.size() != N) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "initial iterates: expected " + std::to_string(N) +
                         " matrices, got " + std::to_string(X.size()));
  }
  for (size_t i = 0; i < N; ++i) {
    if (X[i].dim() != p.n) {
      throw CcareError(ErrorKind::kDimensionMismatch,
                       "initial iterate " + std::to_string(i + 1) +
                           " must be " + std::to_string(p.n) + "x" +
                           std::to_string(p.n));
    }
    if (!is_psd(X[i])) {
      throw CcareError(ErrorKind::kInvalidArgument,
                       "initial iterate " + std::to_string(i + 1) +
                           " is not positive semidefinite");
    }
  }
  return X;
}

std::vector<SymMatrix> sweep_once(const CcareProblem& p, const ShiftVector& rho,
                                  Variant variant,
                                  const std::vector<SymMatrix>& previous,
                                  int sweep_index, bool parallel) {
  const int N = p.modes();
  std::vector<SymMatrix> next;
  next.reserve(static_cast<size_t>(N));

  if (variant == Variant::kAccelerated) {
    for (int i = 0; i < N; ++i) {
      next.push_back(solve_mode(p, rho, i, std::span(next.data(), next.size()),
                                previous, sweep_index));
    }
    return next;
  }

  if (parallel && N > 1) {
    std::vector<std::future<SymMatrix>> jobs;
    jobs.reserve(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return solve_mode(p, rho, i, {}, previous, sweep_index);
      }));
    }
    for (auto& j : jobs) next.push_back(j.get());
    return next;
  }
  for (int i = 0; i < N; ++i) {
    next.push_back(solve_mode(p, rho, i, {}, previous, sweep_index));
  }
  return next;
}

SolveReport run(const CcareProblem& p, const IterationConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) {
    throw CcareError(ErrorKind::kInvalidArgument,
                     "tol must be > 0 and max_iter >= 1");
  }
  SolveReport rep;
  rep.variant = cfg.variant;
  rep.shifts_used = resolve_shifts(p, cfg.shifts);
  check_preconditions(p, rep.shifts_used);
  rep.initial = resolve_initial(p, cfg.initial);

  const int N = p.modes();
  double initial_size = 0.0;
  for (const SymMatrix& x : rep.initial) initial_size += fro_norm(x);
  const double guard = kDivergenceFactor * (1.0 + initial_size);

  std::vector<SymMatrix> current = rep.initial;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    std::vector<SymMatrix> next =
        sweep_once(p, rep.shifts_used, cfg.variant, current, k, cfg.parallel);

    SweepRecord rec;
    rec.sweep = k;
    for (int i = 0; i < N; ++i) {
      const auto ui = static_cast<size_t>(i);
      rec.delta = std::max(rec.delta, fro_norm(next[ui] - current[ui]));
    }
    if (!std::isfinite(rec.delta) || rec.delta > guard) {
      rep.annotation = "diverging";
      rep.iterations = k - 1;
      break;
    }
    rec.residual = residual_max_fro(p, next);
    for (int i = 0; i < N; ++i) {
      const auto ui = static_cast<size_t>(i);
      rec.eigvals.push_back(sym_eigvals(next[ui]));
      const OrderResult o = loewner_compare(next[ui], current[ui], cfg.order_tol);
      rec.step_order.push_back(o);
      rec.monotone_up.push_back(o.relation == Relation::kGreaterEqual ||
                                o.relation == Relation::kEqual);
      rec.monotone_down.push_back(o.relation == Relation::kLessEqual ||
                                  o.relation == Relation::kEqual);
      const double abscissa = spectral_abscissa(
          p.A[ui] - rep.shifts_used[i] * Matrix::Identity(p.n, p.n) -
          p.S[ui].mat() * next[ui].mat());
      rec.closed_loop_abscissa.push_back(abscissa);

      if (cfg.check_monotone && o.relation == Relation::kIncomparable) {
        rep.warnings.push_back("sweep " + std::to_string(k) + ", " +
                               mode_name(i) +
                               ": consecutive iterates are not comparable");
      }
      if (cfg.check_closed_loop && !(abscissa < 0.0)) {
        rep.warnings.push_back("sweep " + std::to_string(k) + ", " +
                               mode_name(i) + ": closed loop is not stable");
      }
    }
    rec.X = next;
    const bool small_step = rec.delta < cfg.tol;
    const bool small_residual =
        !cfg.residual_tol || rec.residual < *cfg.residual_tol;
    rep.trace.records.push_back(std::move(rec));
    current = std::move(next);
    rep.iterations = k;
    if (small_step && small_residual) {
      rep.converged = true;
      break;
    }
  }

  rep.solution = current;
  rep.final_residual = residual_max_fro(p, current);
  rep.monotone_direction = classify_direction(rep.trace);
  if (cfg.check_monotone && rep.monotone_direction == Direction::kMixed &&
      rep.warnings.empty()) {
    rep.warnings.push_back("iterates are not monotone across sweeps");
  }
  return rep;
}

RegimeClass classify_regime(const CcareProblem& p, const ShiftVector& rho,
                            const std::vector<SymMatrix>& initial,
                            double tol) {
  bool all_pos = true, all_neg = true;
  for (int i = 0; i < p.modes(); ++i) {
    const SymMatrix r = ccare_residual(p, initial, i);
    all_pos = all_pos && is_psd(r, tol);
    all_neg = all_neg && is_psd(-1.0 * r, tol);
  }
  if (all_pos) return {Regime::kIncreasing, true};
  if (all_neg) return {Regime::kDecreasing, true};

  const auto first = sweep_once(p, rho, Variant::kAccelerated, initial);
  bool up = true, down = true;
  for (int i = 0; i < p.modes(); ++i) {
    const auto ui = static_cast<size_t>(i);
    const Relation rel = loewner_compare(first[ui], initial[ui], tol).relation;
    up = up && conforms(rel, Relation::kGreaterEqual);
    down = down && conforms(rel, Relation::kLessEqual);
  }
  if (up && !down) return {Regime::kIncreasing, false};
  if (down && !up) return {Regime::kDecreasing, false};
  return {Regime::kUndetermined, false};
}

bool conforms(Relation actual, Relation expected) {
  return actual == expected || actual == Relation::kEqual;
}

namespace {

Relation expected_for(Regime r) {
  switch (r) {
    case Regime::kIncreasing: return Relation::kGreaterEqual;
    case Regime::kDecreasing: return Relation::kLessEqual;
    case Regime::kUndetermined: break;
  }
  return Relation::kEqual;
}

}  // namespace

bool CompareResult::all_conform() const {
  if (regime.regime == Regime::kUndetermined) return true;
  return std::all_of(comparisons.begin(), comparisons.end(),
                     [this](const PairComparison& c) {
                       return conforms(c.order.relation, expected);
                     });
}

CompareResult compare_run(const CcareProblem& p, const IterationConfig& cfg) {
  CompareResult out;
  IterationConfig c = cfg;
  // Pin shifts and initial iterates so both runs start identically.
  c.shifts = resolve_shifts(p, cfg.shifts);
  c.initial = ExplicitInit{resolve_initial(p, cfg.initial)};

  c.variant = Variant::kRegular;
  out.regular = run(p, c);
  c.variant = Variant::kAccelerated;
  out.accelerated = run(p, c);

  out.regime = classify_regime(p, out.accelerated.shifts_used,
                               out.accelerated.initial, cfg.order_tol);
  out.expected = expected_for(out.regime.regime);

  const size_t common = std::min(out.regular.trace.records.size(),
                                 out.accelerated.trace.records.size());
  for (size_t k = 0; k < common; ++k) {
    const SweepRecord& xr = out.accelerated.trace.records[k];
    const SweepRecord& yr = out.regular.trace.records[k];
    for (int i = 0; i < p.modes(); ++i) {
      const auto ui = static_cast<size_t>(i);
      out.comparisons.push_back(
          {xr.sweep, i, loewner_compare(xr.X[ui], yr.X[ui], cfg.order_tol)});
    }
  }
  return out;
}

std::vector<SweepRow> shift_sweep(const CcareProblem& p,
                                  const IterationConfig& cfg,
                                  const std::vector<ShiftVector>& shift_values) {
  std::vector<ShiftVector> shifts = shift_values;
  std::stable_sort(shifts.begin(), shifts.end(),
                   [](const ShiftVector& a, const ShiftVector& b) {
                     return a.values() > b.values();
                   });
  std::vector<SweepRow> rows;
  for (const ShiftVector& rho : shifts) {
    for (Variant v : {Variant::kRegular, Variant::kAccelerated}) {
      SweepRow row;
      row.shift = rho;
      row.variant = v;
      IterationConfig c = cfg;
      c.variant = v;
      c.shifts = rho;
      try {
        const SolveReport rep = run(p, c);
        row.iterations = rep.iterations;
        row.final_residual = rep.final_residual;
        row.converged = rep.converged;
      } catch (const CcareError& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

AugmentedStepResult augmented_first_step(const CcareProblem& p,
                                         const IterationConfig& cfg,
                                         const std::vector<double>& delta_rho) {
  const ShiftVector rho = resolve_shifts(p, cfg.shifts);
  if (static_cast<int>(delta_rho.size()) != p.modes()) {
    throw CcareError(ErrorKind::kDimensionMismatch,
                     "delta_rho must have one entry per mode");
  }
  std::vector<double> bumped = rho.values();
  for (size_t i = 0; i < bumped.size(); ++i) {
    if (!(delta_rho[i] >= 0.0)) {
      throw CcareError(ErrorKind::kInvalidArgument,
                       "shift augmentation must be nonnegative");
    }
    bumped[i] += delta_rho[i];
  }
  const ShiftVector rho_aug(std::move(bumped));
  check_preconditions(p, rho);
  check_preconditions(p, rho_aug);

  const std::vector<SymMatrix> X0 = resolve_initial(p, cfg.initial);
  const auto X1 = sweep_once(p, rho, Variant::kAccelerated, X0);
  const auto Y1 = sweep_once(p, rho_aug, Variant::kAccelerated, X0);

  AugmentedStepResult out;
  out.regime = classify_regime(p, rho, X0, cfg.order_tol);
  out.expected = expected_for(out.regime.regime);
  for (int i = 0; i < p.modes(); ++i) {
    const auto ui = static_cast<size_t>(i);
    out.per_mode.push_back(loewner_compare(X1[ui], Y1[ui], cfg.order_tol));
  }
  return out;
}

}  // namespace ccare
