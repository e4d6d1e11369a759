#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plap/cheeger.hpp"
#include "plap/eigensolver.hpp"
#include "plap/graph.hpp"
#include "plap/nodal.hpp"

namespace plap {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitCertificateFailure = 1,
  kExitUsageError = 2,
  kExitSolverFailure = 3,
};

/// JSON document plus exit status and human-readable diagnostics for stderr.
struct CommandResult {
  nlohmann::json report;
  int exit_code = kExitOk;
  std::vector<std::string> messages;
  /// Spectra produced by the command, for CSV export.
  std::vector<Spectrum> spectra;
};

struct SolveOptions {
  double p = 2.0;
  int steps = 16;
  double min_p = 1.05;
  double residual_tol = 1e-9;
  bool timings = false;
};

struct CertifyOptions {
  std::vector<double> p_list{1.1, 1.5, 2.0, 3.0};
  int steps = 16;
  double min_p = 1.05;
  double residual_tol = 1e-9;
  /// Negative: 1e-9 * max|f| per eigenfunction.
  double zero_tol = -1.0;
  double multiplicity_tol = 1e-7;
  int rq_samples = 1000;
  int ax_by_samples = 1000;
  std::uint64_t seed = 1;
  bool one_laplacian = false;
  bool approx = false;
  bool timings = false;
};

struct CheegerOptions {
  int k = 2;
  bool approx = false;
  /// Eigenfunction for a sweep cut, one value per vertex.
  std::optional<VertexFunction> sweep;
  double sweep_p = 2.0;
  bool timings = false;
};

/// Spectrum computed the way the CLI does: dense at p = 2, shooting on unit
/// paths, continuation otherwise.
Spectrum compute_spectrum(const Graph& g, double p, const ContinuationOptions& options);

CommandResult cmd_solve(const Graph& g, const SolveOptions& options);
CommandResult cmd_certify(const Graph& g, const CertifyOptions& options);
CommandResult cmd_cheeger(const Graph& g, const CheegerOptions& options);

nlohmann::json graph_json(const Graph& g);
nlohmann::json spectrum_json(const Spectrum& spectrum);
nlohmann::json family_json(const std::vector<VertexSubset>& family);

/// One row per eigenpair: p,k,lambda,residual,f_1..f_n.
std::string spectrum_csv(const std::vector<Spectrum>& spectra);

/// One value per line in vertex order; '#' comments and blank lines skipped.
VertexFunction parse_vertex_function(const std::string& text, int n);
VertexFunction read_vertex_function(const std::string& path, int n);

}  // namespace plap
