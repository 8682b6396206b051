#include "gvp/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "gvp/csv.hpp"
#include "gvp/exhaust.hpp"
#include "gvp/report.hpp"

namespace gvp::cli {

using nlohmann::ordered_json;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::schema_error:
    case Errc::validation_error:
    case Errc::infeasible:
    case Errc::step_infeasible:
    case Errc::condenser_mismatch:
    case Errc::domain_error:
    case Errc::not_symmetric:
    case Errc::coincident_nodes:
    case Errc::unresolved_diagonal:
    case Errc::degenerate_gram:
    case Errc::all_infinite:
    case Errc::zero_restricted_mass:
    case Errc::empty_step:
      return 2;
    case Errc::io_error:
    case Errc::missing_data:
    case Errc::negative_radicand:
    case Errc::internal_error:
      return 3;
  }
  return 3;
}

namespace {

ordered_json problem_echo(const std::string& command, const ProblemFile& pf,
                          const Flags& flags) {
  ordered_json j;
  j["tool"] = ordered_json{{"name", "gvp"}, {"version", "1.0.0"}};
  j["command"] = command;
  ordered_json prob;
  prob["hash"] = problem_hash(pf);
  prob["schema_version"] = pf.schema_version;
  prob["plates"] = pf.condenser.plates.size();
  std::size_t nodes = 0;
  for (const auto& p : pf.condenser.plates) nodes += p.nodes.size();
  prob["nodes"] = nodes;
  prob["seed"] = flags.seed.value_or(pf.seed);
  prob["solver"] = serialize_problem(pf)["solver"];
  j["problem"] = std::move(prob);
  return j;
}

void emit_csvs(const Flags& flags, const System& sys, const FieldValues& f,
               const EquilibriumReport* eq, const ExhaustionReport* exh) {
  for (const auto& [kind_name, path] : flags.csv) {
    const CsvKind kind = csv_kind_from_name(kind_name);
    switch (kind) {
      case CsvKind::potentials:
        if (!eq) fail(Errc::missing_data, "potentials csv needs a solve result");
        write_potentials_csv(sys, f, *eq, path);
        break;
      case CsvKind::exhaustion_trace:
        if (!exh) fail(Errc::missing_data, "exhaustion csv needs an exhaust run");
        write_exhaustion_csv(*exh, path);
        break;
      case CsvKind::iterates:
        if (!eq) fail(Errc::missing_data, "iterates csv needs a solve result");
        write_iterates_csv(*eq, path);
        break;
    }
  }
}

RunResult run_checked(const std::string& command, const ProblemFile& pf,
                      const Flags& flags) {
  RunResult out;
  out.report = problem_echo(command, pf, flags);

  if (command == "validate") {
    const ValidationResult vr = validate_condenser(pf.condenser);
    out.report["validation"] = to_json(vr);
    // Local finiteness is automatic for a finite plate family.
    out.report["validation"]["local_finiteness"] = "satisfied (finite family)";
    if (!vr.ok) {
      out.exit_code = 2;
      return out;
    }
    const System sys(pf.kernel, pf.condenser);
    const FieldValues f = field_values(sys, pf.field);
    ordered_json psd;
    psd["ok"] = sys.psd().psd;
    psd["strict"] = sys.psd().strict;
    out.report["psd"] = std::move(psd);
    const CrossSupResult cross = check_cross_sup(pf.condenser, pf.kernel);
    ordered_json cj;
    cj["sup_cross"] = cross.sup_cross == -kInf ? ordered_json("-inf")
                                               : ordered_json(cross.sup_cross);
    cj["finite"] = cross.finite;
    out.report["cross_sup"] = std::move(cj);
    out.report["feasibility"] = to_json(check_feasibility(sys, f));
    out.exit_code = sys.psd().psd ? 0 : 2;
    return out;
  }

  if (command == "solve") {
    const System sys(pf.kernel, pf.condenser);
    const FieldValues f = field_values(sys, pf.field);
    SolverConfig cfg = pf.solver;
    cfg.trace = flags.trace;
    const EquilibriumReport eq = solve(sys, f, cfg);
    const CertificateResult cert =
        certify_equilibrium(sys, f, eq.lambda, flags.tol, cfg.support_threshold);
    out.report["equilibrium"] = to_json(eq);
    out.report["certificate"] = to_json(cert);
    out.report["measure"] = serialize_measure(eq.lambda);
    emit_csvs(flags, sys, f, &eq, nullptr);
    out.exit_code = cert.all_ok() && eq.converged ? 0 : 1;
    return out;
  }

  if (command == "certify") {
    if (flags.measure_path.empty())
      fail(Errc::missing_data, "certify needs --measure <file>");
    const System sys(pf.kernel, pf.condenser);
    const FieldValues f = field_values(sys, pf.field);
    const DiscreteVectorMeasure mu = parse_measure(flags.measure_path);
    CertificateResult cert =
        certify_equilibrium(sys, f, mu, flags.tol, pf.solver.support_threshold);
    cert.eta = flags.eta;  // echoed when supplied
    out.report["certificate"] = to_json(cert);
    bool ok = cert.all_ok();
    if (!flags.eta.empty()) {
      const double bound = flags.value_bound.value_or(-kInf);
      const EtaCertificate eta = check_eta_certificate(
          sys, f, mu, flags.eta, bound, flags.tol, pf.solver.support_threshold);
      out.report["eta_certificate"] = to_json(eta);
      ok = ok && eta.certified;
    }
    out.exit_code = ok ? 0 : 1;
    return out;
  }

  if (command == "exhaust") {
    const System sys(pf.kernel, pf.condenser);
    const FieldValues f = field_values(sys, pf.field);
    ExhaustionSpec spec = pf.exhaustion.value_or(ExhaustionSpec{4, ExhaustionOrder::by_index});
    const ExhaustionSchedule schedule =
        make_exhaustion(pf.condenser, spec.steps, spec.order);
    SolverConfig cfg = pf.solver;
    cfg.trace = false;
    const ExhaustionReport exh = run_exhaustion(sys, f, schedule, cfg, flags.tol);
    out.report["exhaustion"] = to_json(exh);
    emit_csvs(flags, sys, f, &exh.full, &exh);
    out.exit_code = exh.monotone_ok && exh.converged ? 0 : 1;
    return out;
  }

  if (command == "capacity") {
    if (flags.plate < 0 ||
        static_cast<std::size_t>(flags.plate) >= pf.condenser.plates.size())
      fail(Errc::validation_error, "capacity: --plate index out of range");
    const CapacityResult cap = scalar_equilibrium(
        pf.kernel, pf.condenser.plates[flags.plate].nodes, flags.tol);
    out.report["capacity"] = to_json(cap);
    out.exit_code = cap.invariants_ok ? 0 : 1;
    return out;
  }

  fail(Errc::schema_error, "unknown command: " + command);
}

}  // namespace

RunResult run(const std::string& command, const ProblemFile& pf, const Flags& flags) {
  const auto started = std::chrono::steady_clock::now();
  RunResult out;
  try {
    out = run_checked(command, pf, flags);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.code());
    out.report["error"] =
        ordered_json{{"kind", errc_name(e.code())}, {"what", e.what()}};
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.report["error"] = ordered_json{{"kind", "InternalError"}, {"what", e.what()}};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  out.report["timing"] = ordered_json{{"seconds", seconds}};
  return out;
}

int run_main(int argc, char** argv) {
  CLI::App app{"equilibrium measures on signed condensers: solve and certify"};
  app.require_subcommand(1);

  std::string problem_path;
  Flags flags;
  std::vector<std::string> csv_args;
  unsigned long seed_arg = 0;
  bool seed_set = false;
  double value_bound_arg = 0.0;
  bool value_bound_set = false;

  auto add_common = [&](CLI::App* sub, bool with_measure) {
    sub->add_option("problem", problem_path, "problem file (JSON)")->required();
    sub->add_option("--out", flags.out_path, "write the report to this file");
    sub->add_option("--csv", csv_args, "emit CSV output, kind=path")
        ->expected(-1);
    sub->add_option("--tol", flags.tol, "certification tolerance");
    sub->add_option("--seed", seed_arg, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_flag("--trace", flags.trace, "record per-iteration trace");
    if (with_measure) {
      sub->add_option("--measure", flags.measure_path, "measure file to certify");
      sub->add_option("--eta", flags.eta, "per-plate eta values")->expected(-1);
      sub->add_option("--value-bound", value_bound_arg,
                      "known optimal value for the eta check")
          ->each([&](const std::string&) { value_bound_set = true; });
    }
  };

  CLI::App* validate = app.add_subcommand("validate", "structural checks only");
  add_common(validate, false);
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve and certify");
  add_common(solve_cmd, false);
  CLI::App* certify_cmd = app.add_subcommand("certify", "certify a supplied measure");
  add_common(certify_cmd, true);
  CLI::App* exhaust_cmd = app.add_subcommand("exhaust", "nested sub-condenser runs");
  add_common(exhaust_cmd, false);
  CLI::App* capacity_cmd = app.add_subcommand("capacity", "interior equilibrium measure");
  add_common(capacity_cmd, false);
  capacity_cmd->add_option("--plate", flags.plate, "plate whose nodes to use");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (const std::string& spec : csv_args) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--csv expects kind=path, got: " << spec << '\n';
      return 2;
    }
    flags.csv.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
  }
  if (seed_set) flags.seed = seed_arg;
  if (value_bound_set) flags.value_bound = value_bound_arg;

  const std::string command = app.get_subcommands().front()->get_name();

  ProblemFile pf;
  try {
    pf = parse_problem(problem_path);
  } catch (const Error& e) {
    ordered_json err = {{"error", {{"kind", errc_name(e.code())}, {"what", e.what()}}}};
    std::cerr << err.dump(2) << '\n';
    return exit_code_for(e.code());
  }
  if (flags.seed) pf.seed = *flags.seed;

  const RunResult result = run(command, pf, flags);
  const std::string text = result.report.dump(2);
  if (flags.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(flags.out_path);
    if (!out) {
      std::cerr << "cannot write report to " << flags.out_path << '\n';
      return 3;
    }
    out << text << '\n';
  }
  return result.exit_code;
}

}  // namespace gvp::cli
