// plap: eigenpairs, nodal domains and Cheeger constants of graph p-Laplacians.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "plap/report.hpp"

namespace {

struct Common {
  std::string graph_file;
  std::string mu = "unit";
  std::string json_path;
  std::string csv_path;
  bool timings = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("graph", c.graph_file, "edge-list file")->required();
  app->add_option("--mu", c.mu, "vertex measure")
      ->check(CLI::IsMember({"unit", "degree", "explicit"}));
  app->add_option("--json", c.json_path, "write the JSON report here instead of stdout");
  app->add_flag("--timings", c.timings, "record wall-clock timings (output no longer reproducible)");
}

int emit(const Common& c, const plap::CommandResult& r) {
  for (const auto& m : r.messages) std::cerr << m << '\n';
  std::string doc = r.report.dump(2) + "\n";
  if (c.json_path.empty()) {
    std::cout << doc;
  } else {
    std::ofstream out(c.json_path);
    if (!out) {
      std::cerr << "error: cannot write '" << c.json_path << "'\n";
      return plap::kExitUsageError;
    }
    out << doc;
  }
  if (!c.csv_path.empty()) {
    std::ofstream out(c.csv_path);
    if (!out) {
      std::cerr << "error: cannot write '" << c.csv_path << "'\n";
      return plap::kExitUsageError;
    }
    out << plap::spectrum_csv(r.spectra);
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph p-Laplacian eigenpairs, nodal domains and Cheeger certificates"};
  app.require_subcommand(1);

  Common solve_common;
  plap::SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "all eigenpairs at one exponent");
  add_common(solve_cmd, solve_common);
  solve_cmd->add_option("--p", solve.p, "exponent (> 1)")->check(CLI::Range(1.0, 1e6));
  solve_cmd->add_option("--steps", solve.steps, "continuation steps")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--min-p", solve.min_p, "lowest exponent reachable by continuation");
  solve_cmd->add_option("--tol", solve.residual_tol, "residual tolerance for accepted eigenpairs");
  solve_cmd->add_option("--csv", solve_common.csv_path, "write the spectrum table as CSV");

  Common certify_common;
  plap::CertifyOptions certify;
  std::vector<double> p_list;
  auto* certify_cmd = app.add_subcommand("certify", "full certification pipeline");
  add_common(certify_cmd, certify_common);
  certify_cmd->add_option("--p", p_list, "exponents (repeatable; default 1.1 1.5 2 3)")
      ->check(CLI::Range(1.0, 1e6));
  certify_cmd->add_option("--steps", certify.steps, "continuation steps")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--min-p", certify.min_p, "lowest exponent reachable by continuation");
  certify_cmd->add_option("--tol", certify.residual_tol, "residual tolerance for accepted eigenpairs");
  certify_cmd->add_option("--zero-tol", certify.zero_tol, "absolute zero tolerance for nodal domains");
  certify_cmd->add_option("--seed", certify.seed, "seed for sampled checks");
  certify_cmd->add_option("--samples", certify.rq_samples, "random samples per nodal-space check");
  certify_cmd->add_flag("--one-laplacian", certify.one_laplacian,
                        "enumerate exact 1-Laplacian eigenvalues (n <= 6)");
  certify_cmd->add_flag("--approx", certify.approx, "approximate h_k above the exact size cap");
  certify_cmd->add_option("--csv", certify_common.csv_path, "write the spectrum table as CSV");

  Common cheeger_common;
  plap::CheegerOptions cheeger;
  std::string sweep_file;
  auto* cheeger_cmd = app.add_subcommand("cheeger", "multiway Cheeger constants h_1..h_k");
  add_common(cheeger_cmd, cheeger_common);
  cheeger_cmd->add_option("--k", cheeger.k, "largest k")->required();
  cheeger_cmd->add_option("--sweep", sweep_file, "eigenfunction file for a sweep cut");
  cheeger_cmd->add_option("--p", cheeger.sweep_p, "exponent used by the sweep bound")
      ->check(CLI::Range(1.0, 1e6));
  cheeger_cmd->add_flag("--approx", cheeger.approx, "approximate h_k above the exact size cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : plap::kExitUsageError;
  }

  Common* common = solve_cmd->parsed()     ? &solve_common
                   : certify_cmd->parsed() ? &certify_common
                                           : &cheeger_common;
  try {
    plap::Graph g = plap::read_graph_file(common->graph_file, plap::mu_mode_from_string(common->mu));
    if (solve_cmd->parsed()) {
      if (solve.min_p < 1.05) std::cerr << "warning: --min-p below 1.05 lowered by user\n";
      solve.timings = solve_common.timings;
      return emit(solve_common, plap::cmd_solve(g, solve));
    }
    if (certify_cmd->parsed()) {
      if (certify.min_p < 1.05) std::cerr << "warning: --min-p below 1.05 lowered by user\n";
      if (!p_list.empty()) certify.p_list = p_list;
      certify.timings = certify_common.timings;
      return emit(certify_common, plap::cmd_certify(g, certify));
    }
    if (!sweep_file.empty()) cheeger.sweep = plap::read_vertex_function(sweep_file, g.n());
    cheeger.timings = cheeger_common.timings;
    return emit(cheeger_common, plap::cmd_cheeger(g, cheeger));
  } catch (const plap::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return plap::kExitUsageError;
  } catch (const plap::ContinuationError& e) {
    std::cerr << "solver error: " << e.what() << " (reached p = " << e.reached_p() << ")\n";
    return plap::kExitSolverFailure;
  } catch (const plap::ShootingError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return plap::kExitSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return plap::kExitUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return plap::kExitSolverFailure;
  }
}
