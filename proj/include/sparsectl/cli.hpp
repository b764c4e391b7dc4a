#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsectl/gensys.hpp"
#include "sparsectl/io.hpp"
#include "sparsectl/sparsectl.hpp"

namespace sparsectl::cli {

using io::json;
using io::Report;
using io::Status;

struct Options {
  std::string a_file;
  std::string b_file;
  bool kalman_only = false;
  bool pbh_only = false;
  bool both = false;
  std::string support_list;
  std::optional<double> element_bound;
  std::optional<double> frobenius_bound;
  std::uint64_t seed = 0;
  std::string variant = "vector";
  int p = 1;
  std::string method = "exact";
  bool observability = false;
  std::optional<int> budget;
  std::string to;
  int n = 0;
  std::string family_file;
  double density = 0.5;
  std::string out_file;
};

namespace detail {

inline IndexSet parse_support(const std::string& list, int n) {
  std::vector<int> members;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      members.push_back(std::stoi(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidInput, "bad support index '" + item + "'");
    }
  }
  return IndexSet(n, std::move(members));
}

inline ConstraintSpec constraint_from(const Options& o) {
  if (o.element_bound && o.frobenius_bound) {
    throw Error(ErrorCode::kInvalidInput, "choose one of --element-bound and --frobenius-bound");
  }
  if (o.element_bound) return ConstraintSpec::element_bound(*o.element_bound);
  if (o.frobenius_bound) return ConstraintSpec::frobenius_bound(*o.frobenius_bound);
  return ConstraintSpec::unconstrained();
}

inline InputVariant variant_from(const std::string& s) {
  const auto v = io::parse_variant(s);
  if (!v) throw Error(ErrorCode::kInvalidInput, "unknown variant '" + s + "'");
  return *v;
}

struct Context {
  Report report;
  Tolerances tol;
  io::Digest digest;

  io::MatrixFile load(const std::string& path) {
    io::MatrixFile file = io::read_matrix_file(path);
    digest.update(file.raw);
    return file;
  }
  SystemMatrix load_system(const std::string& path) {
    return SystemMatrix(load(path).rows, path);
  }
};

inline void cmd_eig(Context& ctx, const Options& o) {
  const SystemMatrix a = ctx.load_system(o.a_file);
  const EigenStructure eig = eig_left(a, ctx.tol);
  ctx.report.result = io::to_json(eig);
  if (!eig.distinct) ctx.report.warnings.push_back("repeated eigenvalues: supports are not canonical");
}

inline void cmd_check(Context& ctx, const Options& o) {
  const SystemMatrix a = ctx.load_system(o.a_file);
  const SparseInput b = io::sparse_input_from(ctx.load(o.b_file), ctx.tol.support);
  const bool want_pbh = !o.kalman_only;
  const bool want_kalman = !o.pbh_only;
  std::optional<Verdict> pbh;
  std::optional<Verdict> kalman;
  if (want_pbh) {
    const EigenStructure eig = eig_left(a, ctx.tol);
    if (eig.distinct) {
      pbh = pbh_controllable(a, b, eig, ctx.tol);
    } else if (!want_kalman) {
      throw Error(ErrorCode::kRepeatedEigenvalues, "eigenvector test needs distinct eigenvalues");
    } else {
      ctx.report.warnings.push_back("repeated eigenvalues: eigenvector test skipped");
    }
  }
  if (want_kalman) kalman = kalman_controllable(a, b);
  json result = {{"pbh", pbh ? io::to_json(*pbh) : json(nullptr)},
                 {"kalman", kalman ? io::to_json(*kalman) : json(nullptr)}};
  if (pbh && kalman && pbh->controllable != kalman->controllable) {
    ctx.report.warnings.push_back("oracles disagree: tolerance pathology");
    result["controllable"] = nullptr;
    ctx.report.result = result;
    ctx.report.status = Status::kNumericalFailure;
    return;
  }
  const bool controllable = pbh ? pbh->controllable : kalman->controllable;
  result["controllable"] = controllable;
  ctx.report.result = result;
  ctx.report.status = controllable ? Status::kOk : Status::kNegative;
}

inline void cmd_feasible(Context& ctx, const Options& o) {
  const SystemMatrix a = ctx.load_system(o.a_file);
  const EigenStructure eig = eig_left(a, ctx.tol);
  const SupportFamily family = support_family(eig);
  const IndexSet sv = parse_support(o.support_list, a.n());
  const FeasibilityReport rep = feasible_support(eig, family, sv);
  json supports = json::array();
  for (const auto& s : family.supports) supports.push_back(io::to_json(s));
  ctx.report.result = {{"feasible", rep.feasible},
                       {"support", io::to_json(sv)},
                       {"witness", rep.witness ? json(*rep.witness) : json(nullptr)},
                       {"chosen_hits", rep.chosen_hits},
                       {"eigenvector_supports", supports}};
  ctx.report.status = rep.feasible ? Status::kOk : Status::kNegative;
}

inline void cmd_construct(Context& ctx, const Options& o) {
  const SystemMatrix a = ctx.load_system(o.a_file);
  const EigenStructure eig = eig_left(a, ctx.tol);
  const SupportFamily family = support_family(eig);
  const IndexSet sv = parse_support(o.support_list, a.n());
  const ConstraintSpec constraint = constraint_from(o);
  const ConstructResult built = construct_vector(eig, family, sv, constraint, o.seed, ctx.tol);
  const Verdict pbh = pbh_controllable(a, built.b, eig, ctx.tol);
  const Verdict kalman = kalman_controllable(a, built.b);
  ctx.report.result = {{"b", io::to_json(built.b)},
                       {"nnz", SparseInput::vector(built.b, ctx.tol.support).nnz()},
                       {"support", io::to_json(sv)},
                       {"constraint", io::to_json(constraint)},
                       {"seed", o.seed},
                       {"trace", io::to_json(built.trace)},
                       {"pbh", io::to_json(pbh)},
                       {"kalman", io::to_json(kalman)}};
  if (!pbh.controllable || !kalman.controllable) {
    ctx.report.warnings.push_back("constructed vector rejected by an oracle");
    ctx.report.status = Status::kNumericalFailure;
  }
}

inline McpSolution solve_variant(const SystemMatrix& a, const Options& o, const Tolerances& tol) {
  const InputVariant variant = variant_from(o.variant);
  const ConstraintSpec constraint = constraint_from(o);
  if (o.method == "exact") return solve_mcp(a, variant, o.p, constraint, o.seed, tol);
  if (o.method != "greedy") throw Error(ErrorCode::kInvalidInput, "unknown method '" + o.method + "'");
  McpSolution sol = greedy_rank(a, o.budget.value_or(a.n()), tol);
  if (variant == InputVariant::kVector) return sol;
  sol.realization = variant == InputVariant::kDiagonal ? vector_to_diagonal(sol.realization).output
                                                       : vector_to_full(sol.realization, o.p).output;
  sol.variant = variant;
  sol.kalman = kalman_controllable(a, sol.realization);
  if (sol.pbh) sol.pbh = pbh_controllable(a, sol.realization, eig_left(a, tol), tol);
  return sol;
}

inline void cmd_solve(Context& ctx, const Options& o) {
  const SystemMatrix a = ctx.load_system(o.a_file);
  McpSolution sol;
  try {
    if (!o.observability) {
      sol = solve_variant(a, o, ctx.tol);
    } else if (o.method == "exact" && o.variant == "vector") {
      sol = solve_min_observability(a, constraint_from(o), o.seed, ctx.tol);
    } else {
      sol = solve_variant(a.transposed(), o, ctx.tol);
      sol.observability = true;
      sol.output_matrix = sol.realization.matrix().transpose();
      sol.kalman = observable(a, *sol.output_matrix, VerdictMethod::kKalman, ctx.tol);
      if (sol.pbh) sol.pbh = observable(a, *sol.output_matrix, VerdictMethod::kPbh, ctx.tol);
    }
  } catch (const BudgetExhausted& e) {
    ctx.report.result = io::to_json(e.best());
    ctx.report.warnings.push_back(e.what());
    ctx.report.status = Status::kNegative;
    return;
  }
  ctx.report.result = io::to_json(sol);
  if (!sol.certified()) {
    ctx.report.warnings.push_back("solution rejected by an oracle");
    ctx.report.status = Status::kNumericalFailure;
  }
}

inline void cmd_convert(Context& ctx, const Options& o) {
  const SystemMatrix a = ctx.load_system(o.a_file);
  const SparseInput input = io::sparse_input_from(ctx.load(o.b_file), ctx.tol.support);
  const InputVariant target = variant_from(o.to);
  const ConstraintSpec constraint = constraint_from(o);

  std::optional<EigenStructure> eig;
  std::optional<SupportFamily> family;
  auto structure = [&]() {
    if (!eig) {
      eig = eig_left(a, ctx.tol);
      family = support_family(*eig);
    }
  };
  auto to_vector = [&](const SparseInput& in) {
    structure();
    return in.variant() == InputVariant::kDiagonal
               ? diagonal_to_vector(a, *eig, *family, in, constraint, o.seed, ctx.tol)
               : full_to_vector(a, *eig, *family, in, constraint, o.seed, ctx.tol);
  };
  json steps = json::array();
  auto record = [&steps](const ConversionResult& r) {
    steps.push_back({{"output", io::to_json(r.output)}, {"trace", io::to_json(r.trace)}});
  };

  SparseInput current = input;
  const bool reshape_full = target == InputVariant::kFull && input.variant() == InputVariant::kFull &&
                            input.p() != o.p;
  if (input.variant() != target || reshape_full) {
    if (input.variant() != InputVariant::kVector) {
      ConversionResult r = to_vector(input);
      record(r);
      current = r.output;
    }
    if (target != InputVariant::kVector) {
      ConversionResult r = target == InputVariant::kDiagonal ? vector_to_diagonal(current)
                                                             : vector_to_full(current, o.p);
      record(r);
      current = r.output;
    }
  }

  const Verdict kalman = kalman_controllable(a, current);
  json result = {{"input", io::to_json(input)},
                 {"output", io::to_json(current)},
                 {"steps", steps},
                 {"kalman", io::to_json(kalman)}};
  structure();
  const Verdict pbh = pbh_controllable(a, current, *eig, ctx.tol);
  result["pbh"] = io::to_json(pbh);
  ctx.report.result = result;
  if (!pbh.controllable || !kalman.controllable) {
    ctx.report.status = pbh.controllable == kalman.controllable ? Status::kNegative
                                                                : Status::kNumericalFailure;
  }
}

inline void cmd_generate(Context& ctx, const Options& o) {
  SystemMatrix a;
  if (!o.family_file.empty()) {
    const io::FamilyFile ff = io::read_family_file(o.family_file);
    ctx.digest.update(ff.raw);
    GeneratorSpec spec;
    spec.n = ff.family.n;
    if (o.n != 0 && o.n != spec.n) throw Error(ErrorCode::kDimensionError, "--n disagrees with the family file");
    spec.family = ff.family;
    spec.eigenvalues = ff.eigenvalues;
    spec.seed = o.seed;
    a = system_from_family(spec, ctx.tol);
  } else {
    if (o.n < 1) throw Error(ErrorCode::kInvalidInput, "--n must be positive");
    a = random_system(o.n, o.density, o.seed, ctx.tol);
  }
  ctx.report.result = {{"matrix", io::system_matrix_json(a)}, {"seed", o.seed}};
  if (!o.out_file.empty()) {
    std::ofstream out(o.out_file, std::ios::binary);
    if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + o.out_file);
    out << io::system_matrix_json(a).dump(2) << '\n';
  }
}

}  // namespace detail

/// Runs one command; writes the JSON report to `out` and returns the exit code
/// (0 ok, 2 infeasible / not controllable, 3 input error, 4 numerical failure).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sparse controllability toolkit", "sparsectl"};
  app.require_subcommand(1);

  auto* eig = app.add_subcommand("eig", "eigenvalues, canonical left eigenvectors and supports");
  eig->add_option("A", o.a_file, "state matrix file")->required();

  auto* check = app.add_subcommand("check", "controllability verdicts for (A, B)");
  check->add_option("A", o.a_file, "state matrix file")->required();
  check->add_option("B", o.b_file, "input matrix file")->required();
  auto* f_kalman = check->add_flag("--kalman", o.kalman_only, "rank test only");
  auto* f_pbh = check->add_flag("--pbh", o.pbh_only, "eigenvector test only");
  auto* f_both = check->add_flag("--both", o.both, "both tests (default)");
  f_kalman->excludes(f_pbh)->excludes(f_both);
  f_pbh->excludes(f_both);

  auto add_bounds = [&o](CLI::App* cmd) {
    cmd->add_option("--element-bound", o.element_bound, "bound h on every |b_j|");
    cmd->add_option("--frobenius-bound", o.frobenius_bound, "bound r on ||b||_2");
    cmd->add_option("--seed", o.seed, "seed for the starting vector (0 = all ones)");
  };

  auto* feasible = app.add_subcommand("feasible", "support feasibility test");
  feasible->add_option("A", o.a_file, "state matrix file")->required();
  feasible->add_option("--support", o.support_list, "1-based indices, e.g. 2,5,7")->required();

  auto* construct = app.add_subcommand("construct", "controllable vector supported in S_v");
  construct->add_option("A", o.a_file, "state matrix file")->required();
  construct->add_option("--support", o.support_list, "1-based indices, e.g. 2,5,7")->required();
  add_bounds(construct);

  auto* solve = app.add_subcommand("solve", "minimal controllability / observability");
  solve->add_option("A", o.a_file, "state matrix file")->required();
  solve->add_option("--variant", o.variant, "vector|diagonal|full");
  solve->add_option("--p", o.p, "columns for the full variant");
  solve->add_option("--method", o.method, "exact|greedy");
  solve->add_option("--budget", o.budget, "greedy coordinate budget (default n)");
  solve->add_flag("--observability", o.observability, "solve the sensor-placement dual");
  add_bounds(solve);

  auto* convert = app.add_subcommand("convert", "convert an input matrix between formulations");
  convert->add_option("A", o.a_file, "state matrix file")->required();
  convert->add_option("B", o.b_file, "input matrix file")->required();
  convert->add_option("--to", o.to, "vector|diagonal|full")->required();
  convert->add_option("--p", o.p, "columns for the full variant");
  add_bounds(convert);

  auto* generate = app.add_subcommand("generate", "generate a distinct-eigenvalue test system");
  generate->add_option("--n", o.n, "state dimension");
  generate->add_option("--family", o.family_file, "JSON support family file");
  generate->add_option("--density", o.density, "support density for random families");
  generate->add_option("--seed", o.seed, "generator seed");
  generate->add_option("--out", o.out_file, "also write the matrix file here");

  std::vector<const char*> argv;
  argv.push_back("sparsectl");
  for (const auto& a : args) argv.push_back(a.c_str());

  detail::Context ctx;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    ctx.report.command = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
    ctx.report.status = Status::kInputError;
    ctx.report.result = {{"error", {{"code", "InvalidInput"}, {"message", e.what()}}}};
    err << e.what() << '\n';
    out << io::to_json(ctx.report).dump(2) << '\n';
    return io::exit_code(ctx.report.status);
  }

  CLI::App* cmd = app.get_subcommands().front();
  ctx.report.command = cmd->get_name();
  for (const auto& a : args) ctx.digest.update(a);
  ctx.report.tolerances = io::tolerances_json(ctx.tol);
  try {
    const std::string& name = ctx.report.command;
    if (name == "eig") detail::cmd_eig(ctx, o);
    else if (name == "check") detail::cmd_check(ctx, o);
    else if (name == "feasible") detail::cmd_feasible(ctx, o);
    else if (name == "construct") detail::cmd_construct(ctx, o);
    else if (name == "solve") detail::cmd_solve(ctx, o);
    else if (name == "convert") detail::cmd_convert(ctx, o);
    else if (name == "generate") detail::cmd_generate(ctx, o);
  } catch (const Error& e) {
    ctx.report.status = io::status_for(e.code());
    json error = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (e.witness()) error["witness"] = *e.witness();
    ctx.report.result = {{"error", error}};
    err << e.what() << '\n';
  } catch (const std::exception& e) {
    ctx.report.status = Status::kInputError;
    ctx.report.result = {{"error", {{"code", "InvalidInput"}, {"message", e.what()}}}};
    err << e.what() << '\n';
  }
  ctx.report.inputs_digest = ctx.digest.hex();
  out << io::to_json(ctx.report).dump(2) << '\n';
  return io::exit_code(ctx.report.status);
}

}  // namespace sparsectl::cli
