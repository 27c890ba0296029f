#include "ccare/cli.h"

#include <charconv>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ccare/problem_io.h"
#include "ccare/report_io.h"

namespace ccare::cli {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void bad_input(const std::string& msg) {
  throw CcareError(ErrorKind::kParseError, msg);
}

double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    bad_input(what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

CcareProblem load(const std::string& source) {
  if (fs::is_regular_file(source)) return load_problem(source);
  try {
    return builtin_example(source);
  } catch (const CcareError&) {
    bad_input("'" + source + "' is neither a readable file nor a built-in "
              "example");
  }
}

struct RunOptions {
  std::string problem;
  std::string variant = "accelerated";
  std::string init = "zero";
  std::string rho = "auto:0.01";
  double tol = 1e-8;
  int max_iter = 500;
  std::string out_dir = ".";
};

IterationConfig make_config(const RunOptions& o, const CcareProblem& p) {
  IterationConfig cfg;
  if (o.variant == "regular") {
    cfg.variant = Variant::kRegular;
  } else if (o.variant == "accelerated") {
    cfg.variant = Variant::kAccelerated;
  } else {
    bad_input("--variant must be 'regular' or 'accelerated'");
  }
  if (!(o.tol > 0.0)) bad_input("--tol must be positive");
  if (o.max_iter < 1) bad_input("--max-iter must be at least 1");
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.initial = parse_init_spec(o.init);
  // Shifts are resolved up front so reports echo the concrete values.
  cfg.shifts = resolve_shifts(p, parse_rho_spec(o.rho, p.modes()));
  return cfg;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool with_variant) {
  cmd->add_option("problem", o.problem,
                  "Problem file, or a built-in example name")
      ->required();
  if (with_variant) {
    cmd->add_option("--variant", o.variant, "regular | accelerated");
  }
  cmd->add_option("--init", o.init, "zero | identity:<c> | file:<path>");
  cmd->add_option("--tol", o.tol, "Stopping tolerance on the sweep delta");
  cmd->add_option("--max-iter", o.max_iter, "Sweep cap");
  cmd->add_option("--out", o.out_dir, "Output directory");
}

int cmd_validate(const RunOptions& o, std::ostream& out) {
  const CcareProblem p = load(o.problem);
  bool ok = true;
  for (const Violation& v : validate(p)) {
    if (v.severity == Severity::kNote) {
      out << "note: " << v.message << '\n';
    } else {
      out << "violation [" << v.rule << "]: " << v.message << '\n';
      ok = false;
    }
  }
  if (!ok) return kValidationFailed;

  const ShiftVector rho = resolve_shifts(p, parse_rho_spec(o.rho, p.modes()));
  for (int i = 0; i < p.modes(); ++i) {
    const auto ui = static_cast<size_t>(i);
    const Matrix shifted = p.A[ui] - rho[i] * Matrix::Identity(p.n, p.n);
    if (!pbh_stabilizable(shifted, p.S[ui])) {
      out << "violation [stabilizable]: mode " << (i + 1)
          << ": (A - rho I, S) fails the PBH test at rho = " << rho[i] << '\n';
      ok = false;
    }
    if (!pbh_detectable(shifted, p.Q[ui])) {
      out << "violation [detectable]: mode " << (i + 1)
          << ": (A - rho I, Q) fails the PBH test at rho = " << rho[i] << '\n';
      ok = false;
    }
  }
  if (!ok) return kValidationFailed;
  out << "ok: " << p.modes() << " modes, n = " << p.n << ", shifts";
  for (double r : rho.values()) out << ' ' << r;
  out << '\n';
  return kOk;
}

int cmd_solve(const RunOptions& o, std::ostream& out) {
  const CcareProblem p = load(o.problem);
  const IterationConfig cfg = make_config(o, p);
  const SolveReport rep = run(p, cfg);
  const fs::path dir = prepare_out_dir(o.out_dir);
  write_file_atomic(dir / "report.txt", report_text(rep));
  write_file_atomic(dir / "trace.csv", trace_csv(rep));
  out << to_string(rep.variant) << ": "
      << (rep.converged ? "converged" : "did not converge") << " after "
      << rep.iterations << " sweeps, residual " << rep.final_residual << '\n';
  return rep.converged ? kOk : kNotConverged;
}

int cmd_compare(const RunOptions& o, std::ostream& out) {
  const CcareProblem p = load(o.problem);
  const IterationConfig cfg = make_config(o, p);
  const CompareResult cmp = compare_run(p, cfg);
  const fs::path dir = prepare_out_dir(o.out_dir);
  write_file_atomic(dir / "report_regular.txt", report_text(cmp.regular));
  write_file_atomic(dir / "report_accelerated.txt",
                    report_text(cmp.accelerated));
  write_file_atomic(dir / "trace_regular.csv", trace_csv(cmp.regular));
  write_file_atomic(dir / "trace_accelerated.csv", trace_csv(cmp.accelerated));
  write_file_atomic(dir / "ordering.csv", ordering_csv(cmp));
  out << "regular: " << cmp.regular.iterations << " sweeps, accelerated: "
      << cmp.accelerated.iterations << " sweeps, regime "
      << to_string(cmp.regime.regime)
      << (cmp.regime.from_residual_sign ? "" : " (observed)") << ", ordering "
      << (cmp.all_conform() ? "conforms" : "VIOLATED") << '\n';
  return cmp.regular.converged && cmp.accelerated.converged ? kOk
                                                            : kNotConverged;
}

int cmd_sweep(const RunOptions& o, std::ostream& out) {
  const CcareProblem p = load(o.problem);
  std::vector<ShiftVector> shifts;
  for (const std::string& item : split(o.rho, ';')) {
    if (item.empty()) continue;
    shifts.push_back(resolve_shifts(p, parse_rho_spec(item, p.modes())));
  }
  if (shifts.empty()) bad_input("--rho needs at least one shift value");
  RunOptions base = o;
  base.rho = "auto";
  const IterationConfig cfg = make_config(base, p);
  const std::vector<SweepRow> rows = shift_sweep(p, cfg, shifts);
  const fs::path dir = prepare_out_dir(o.out_dir);
  const std::string csv = sweep_csv(rows);
  write_file_atomic(dir / "sweep.csv", csv);
  out << csv;
  bool any_error = false, all_converged = true;
  for (const SweepRow& r : rows) {
    any_error = any_error || r.error.has_value();
    all_converged = all_converged && r.converged;
  }
  if (any_error) return kSolverFailure;
  return all_converged ? kOk : kNotConverged;
}

int cmd_example(const std::string& name, const std::string& out_dir,
                std::ostream& out) {
  const CcareProblem p = builtin_example(name);
  const fs::path dir = prepare_out_dir(out_dir);
  const fs::path path = dir / (name + ".json");
  write_file_atomic(path, serialize_problem(p));
  out << path.string() << '\n';
  return kOk;
}

int exit_code_for(const CcareError& e) {
  switch (e.kind()) {
    case ErrorKind::kParseError:
    case ErrorKind::kUnknownExample:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kNotSymmetric:
    case ErrorKind::kNonFinite:
    case ErrorKind::kDimensionMismatch:
      return kBadInput;
    case ErrorKind::kPreconditionFailed:
      return kPrecondition;
    default:
      return kSolverFailure;
  }
}

}  // namespace

ShiftSpec parse_rho_spec(const std::string& text, int modes) {
  if (text == "auto") return AutoShift{};
  if (text.rfind("auto:", 0) == 0) {
    const double m = parse_double(std::string_view(text).substr(5), "--rho");
    if (!(m > 0.0)) bad_input("--rho auto margin must be positive");
    return AutoShift{m};
  }
  const std::vector<std::string> parts = split(text, ',');
  std::vector<double> vals;
  for (const std::string& s : parts) vals.push_back(parse_double(s, "--rho"));
  if (vals.size() == 1) vals.assign(static_cast<size_t>(modes), vals.front());
  if (static_cast<int>(vals.size()) != modes) {
    bad_input("--rho lists " + std::to_string(vals.size()) +
              " values for " + std::to_string(modes) + " modes");
  }
  for (double v : vals) {
    if (!(v >= 0.0)) bad_input("--rho values must be nonnegative");
  }
  return ShiftVector(std::move(vals));
}

InitSpec parse_init_spec(const std::string& text) {
  if (text == "zero") return ZeroInit{};
  if (text.rfind("identity:", 0) == 0) {
    const double c = parse_double(std::string_view(text).substr(9), "--init");
    if (!(c >= 0.0)) bad_input("--init identity scale must be >= 0");
    return ScaledIdentityInit{c};
  }
  if (text.rfind("file:", 0) == 0) {
    return ExplicitInit{load_iterates(text.substr(5))};
  }
  bad_input("--init must be zero, identity:<c> or file:<path>");
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Coupled algebraic Riccati equation solver", "ccare"};
  app.require_subcommand(1, 1);

  RunOptions solve_opts, compare_opts, sweep_opts, validate_opts;
  std::string example_name, example_out = ".";

  auto* solve = app.add_subcommand("solve", "Run one iteration variant");
  add_run_options(solve, solve_opts, true);
  solve->add_option("--rho", solve_opts.rho,
                    "auto[:margin] | value | v1,v2,...");

  auto* compare = app.add_subcommand(
      "compare", "Run both variants and compare iterates sweep by sweep");
  add_run_options(compare, compare_opts, false);
  compare->add_option("--rho", compare_opts.rho,
                      "auto[:margin] | value | v1,v2,...");

  auto* sweep =
      app.add_subcommand("sweep", "Tabulate both variants over several shifts");
  add_run_options(sweep, sweep_opts, false);
  sweep_opts.rho.clear();
  sweep->add_option("--rho", sweep_opts.rho,
                    "Semicolon-separated shift specs, e.g. 1.5;1.1;1.01")
      ->required();

  auto* validate_cmd = app.add_subcommand(
      "validate", "Check problem invariants and PBH conditions");
  validate_cmd->add_option("problem", validate_opts.problem)->required();
  validate_cmd->add_option("--rho", validate_opts.rho,
                           "Shifts used for the PBH checks");

  auto* example =
      app.add_subcommand("example", "Write a built-in problem file");
  example->add_option("name", example_name, "ivanov_example1")->required();
  example->add_option("--out", example_out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, out);
    if (*compare) return cmd_compare(compare_opts, out);
    if (*sweep) return cmd_sweep(sweep_opts, out);
    if (*validate_cmd) return cmd_validate(validate_opts, out);
    if (*example) return cmd_example(example_name, example_out, out);
  } catch (const CcareError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kBadInput;
}

}  // namespace ccare::cli
