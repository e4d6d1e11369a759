#include "plap/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "plap/one_laplacian.hpp"

namespace plap {

using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json subset_json(const VertexSubset& s) {
  json out = json::array();
  for (int u : s.vertices()) out.push_back(u + 1);
  return out;
}

json function_json(const VertexFunction& f) {
  json out = json::array();
  for (Eigen::Index i = 0; i < f.size(); ++i) out.push_back(static_cast<double>(f[i]));
  return out;
}

ContinuationOptions continuation_options(int steps, double min_p, double residual_tol) {
  ContinuationOptions options;
  options.steps = steps;
  options.min_p = min_p;
  options.accept_residual = residual_tol;
  return options;
}

json check(const std::string& name, bool pass, json detail = json::object()) {
  json out{{"name", name}, {"pass", pass}};
  if (!detail.empty()) out["detail"] = std::move(detail);
  return out;
}

}  // namespace

json graph_json(const Graph& g) {
  return {{"digest", graph_digest(g)},
          {"n", g.n()},
          {"edges", g.edges().size()},
          {"mu_mode", to_string(g.mu_mode())},
          {"connected", is_connected(g)},
          {"tau", tau(g)}};
}

json family_json(const std::vector<VertexSubset>& family) {
  json out = json::array();
  for (const auto& s : family) out.push_back(subset_json(s));
  return out;
}

json spectrum_json(const Spectrum& spectrum) {
  json pairs = json::array();
  for (std::size_t i = 0; i < spectrum.pairs.size(); ++i) {
    const auto& pair = spectrum.pairs[i];
    const auto& diag = spectrum.diagnostics[i];
    json entry{{"k", i + 1},
               {"lambda", pair.lambda},
               {"residual", pair.residual},
               {"normalized", pair.normalized},
               {"f", function_json(pair.f)},
               {"newton_iterations", diag.newton_iterations},
               {"steps", diag.steps},
               {"step_halvings", diag.step_halvings},
               {"branch_ambiguous", diag.branch_ambiguous},
               {"upper_bound_violated", diag.upper_bound_violated}};
    if (diag.upper_bound >= 0.0) entry["upper_bound"] = diag.upper_bound;
    if (!diag.note.empty()) entry["note"] = diag.note;
    pairs.push_back(std::move(entry));
  }
  return {{"p", spectrum.p},
          {"method", to_string(spectrum.method)},
          {"warnings", spectrum.warnings},
          {"pairs", std::move(pairs)}};
}

Spectrum compute_spectrum(const Graph& g, double p, const ContinuationOptions& options) {
  if (p == 2.0) return solve_p2_spectrum(g);
  if (is_unit_path(g)) return path_spectrum(g.n(), p);
  return variational_spectrum(g, p, options);
}

CommandResult cmd_solve(const Graph& g, const SolveOptions& options) {
  CommandResult result;
  Stopwatch clock;
  auto cont = continuation_options(options.steps, options.min_p, options.residual_tol);
  if (options.min_p < 1.05 && options.p < 1.05)
    result.messages.push_back("warning: continuation below p=1.05 is poorly conditioned");
  Spectrum spectrum = compute_spectrum(g, options.p, cont);
  for (const auto& w : spectrum.warnings) result.messages.push_back("warning: " + w);

  bool converged = true;
  for (const auto& pair : spectrum.pairs) converged &= pair.residual <= options.residual_tol;
  result.report = {{"schema_version", kReportSchemaVersion},
                   {"command", "solve"},
                   {"input", graph_json(g)},
                   {"parameters",
                    {{"p", options.p}, {"steps", options.steps}, {"min_p", options.min_p},
                     {"residual_tol", options.residual_tol}}},
                   {"spectrum", spectrum_json(spectrum)},
                   {"converged", converged}};
  if (options.timings) result.report["timings"] = {{"total_seconds", clock.seconds()}};
  if (!converged) {
    result.exit_code = kExitSolverFailure;
    result.messages.push_back("error: some eigenpairs exceed the residual tolerance");
  }
  result.spectra.push_back(std::move(spectrum));
  return result;
}

namespace {

json one_laplacian_section(const Graph& g, const std::vector<CheegerResult>& constants,
                           std::vector<json>& checks) {
  json out;
  if (g.n() > kOneLapMaxVertices) {
    out["skipped"] = "n > " + std::to_string(kOneLapMaxVertices);
    return out;
  }
  RationalGraph rg = to_rational(g);
  OneLapEnumeration en = enumerate_1lap_eigenvalues(rg);
  json all = json::array();
  for (const auto& i : en.all) all.push_back(to_string(i));
  json nonconstant = json::array();
  for (const auto& i : en.nonconstant) nonconstant.push_back(to_string(i));
  out["orderings_checked"] = en.orderings_checked;
  out["eigenvalues"] = all;
  out["nonconstant_eigenvalues"] = nonconstant;

  bool zero_found = !en.all.empty() && en.all.front().lo == 0;
  checks.push_back(check("one_laplacian.zero_eigenvalue", zero_found));

  if (!constants.empty() && constants.size() >= 2 && !en.nonconstant.empty()) {
    double h2 = constants[1].h;
    bool contains_h2 = false;
    for (const auto& i : en.nonconstant) {
      double lo = i.lo.get_d();
      double hi = i.hi ? i.hi->get_d() : std::numeric_limits<double>::infinity();
      contains_h2 |= h2 >= lo - 1e-12 && h2 <= hi + 1e-12;
    }
    out["h2"] = h2;
    out["lambda2_equals_h2_candidate"] = contains_h2;
    checks.push_back(check("one_laplacian.h2_is_eigenvalue", contains_h2, {{"h2", h2}}));
  }

  // With a single nonconstant eigenvalue every variational eigenvalue above
  // lambda_1 equals it: k = 2 and r = n - 1.
  json pairs = json::array();
  if (en.nonconstant.size() == 1 && en.nonconstant[0].is_point()) {
    const Rational lambda = en.nonconstant[0].lo;
    const int k = 2;
    const int r = g.n() - 1;
    out["variational_indexing"] = {{"k", k}, {"multiplicity", r}, {"lambda", lambda.get_str()}};
    bool all_ok = true;
    for (const auto& item : en.feasible) {
      if (item.constant) continue;
      std::vector<Rational> f(item.levels.begin(), item.levels.end());
      OneLapCertificate cert = verify_1lap_eigenpair(rg, f, lambda);
      bool cert_ok = cert.feasible && check_certificate(rg, f, lambda, cert);
      VertexFunction fd(g.n());
      for (int u = 0; u < g.n(); ++u) fd[u] = item.levels[u];
      NodalPairCheck nodal = certify_nodal_pair(g, 1.0, fd, lambda.get_d(), k, k, r, 0.0);
      EigenPair pair{1.0, lambda.get_d(), fd, 0.0, false};
      double max_rq = std::max(nodal_space_max_rq(g, pair, NodalKind::strong, 64, 7, 0.0),
                               nodal_space_max_rq(g, pair, NodalKind::weak, 64, 7, 0.0));
      bool rq_ok = max_rq <= lambda.get_d() + 1e-9;
      bool ok = cert_ok && nodal.pass() && rq_ok;
      all_ok &= ok;
      pairs.push_back({{"f", item.levels},
                       {"certificate", cert_ok},
                       {"strong", nodal.strong},
                       {"weak", nodal.weak},
                       {"bound", nodal.weak_bound},
                       {"weak_bound_for_p_gt_1", k},
                       {"exceeds_p_gt_1_weak_bound", nodal.weak > k},
                       {"nodal_space_max_rq", max_rq},
                       {"pass", ok}});
    }
    checks.push_back(check("one_laplacian.nodal_bound_k_plus_r_minus_1", all_ok));
  } else {
    out["variational_indexing"] = "undetermined (more than one nonconstant eigenvalue)";
  }
  out["eigenfunctions"] = std::move(pairs);
  return out;
}

}  // namespace

CommandResult cmd_certify(const Graph& g, const CertifyOptions& options) {
  CommandResult result;
  Stopwatch total;
  std::vector<json> checks;
  json timings = json::object();

  const bool exact_cheeger = g.n() <= kExactCheegerMaxN;
  std::vector<CheegerResult> constants;
  {
    Stopwatch clock;
    if (exact_cheeger || options.approx) constants = cheeger_constants(g, g.n(), options.approx);
    timings["cheeger_constants"] = clock.seconds();
  }
  json cheeger_table = json::array();
  for (std::size_t i = 0; i < constants.size(); ++i)
    cheeger_table.push_back({{"k", i + 1},
                             {"h", constants[i].h},
                             {"exact", constants[i].exact},
                             {"family", family_json(constants[i].family)}});

  if (!is_connected(g)) result.messages.push_back("warning: graph disconnected");
  for (double p : options.p_list)
    if (p < 1.05 && options.min_p < 1.05 && !is_unit_path(g))
      result.messages.push_back("warning: continuation below p=1.05 is poorly conditioned");

  std::mt19937_64 rng(options.seed);
  json runs = json::array();
  for (double p : options.p_list) {
    Stopwatch clock;
    json run{{"p", p}};
    Spectrum spectrum;
    try {
      auto cont = continuation_options(options.steps, options.min_p, options.residual_tol);
      if (p == 2.0 || is_unit_path(g) || constants.empty() || !constants.front().exact) {
        spectrum = compute_spectrum(g, p, cont);
      } else {
        spectrum = variational_spectrum(g, p, cont, &constants);
      }
    } catch (const std::exception& e) {
      run["error"] = e.what();
      runs.push_back(std::move(run));
      result.messages.push_back(std::string("error: p=") + std::to_string(p) + ": " + e.what());
      result.exit_code = kExitSolverFailure;
      continue;
    }
    run["spectrum"] = spectrum_json(spectrum);
    for (const auto& w : spectrum.warnings) result.messages.push_back("warning: " + w);

    const std::string tag = "p=" + json(p).dump();
    bool residual_ok = true;
    double worst_residual = 0.0;
    double worst_rq_gap = 0.0;
    double worst_gradient = 0.0;
    double worst_sum = 0.0;
    for (const auto& pair : spectrum.pairs) {
      residual_ok &= pair.residual <= options.residual_tol;
      worst_residual = std::max(worst_residual, pair.residual);
      worst_rq_gap = std::max(worst_rq_gap, std::abs(rayleigh_quotient(g, pair.f, p) - pair.lambda) /
                                                std::max(1.0, pair.lambda));
      worst_gradient = std::max(
          worst_gradient, static_cast<double>(rq_gradient(g, pair.f, p).cwiseAbs().maxCoeff()));
      worst_sum =
          std::max(worst_sum, static_cast<double>(abs(apply_p_laplacian(g, pair.f, p).sum())));
    }
    checks.push_back(check(tag + ".residuals", residual_ok, {{"max_residual", worst_residual}}));
    checks.push_back(check(tag + ".rayleigh_matches_lambda", worst_rq_gap <= 1e-8,
                           {{"max_relative_gap", worst_rq_gap}}));
    checks.push_back(check(tag + ".gradient_vanishes", worst_gradient <= 1e-7,
                           {{"max_gradient", worst_gradient}}));
    checks.push_back(check(tag + ".operator_sums_to_zero", worst_sum <= 1e-10,
                           {{"max_abs_sum", worst_sum}}));
    if (!residual_ok) {
      result.exit_code = std::max(result.exit_code, static_cast<int>(kExitSolverFailure));
      runs.push_back(std::move(run));
      continue;
    }

    NodalReport nodal = certify_nodal_bounds(g, spectrum, options.multiplicity_tol, options.zero_tol);
    json nodal_json = json::array();
    for (const auto& c : nodal.pairs)
      nodal_json.push_back({{"k", c.k},
                            {"multiplicity", c.multiplicity},
                            {"strong", c.strong},
                            {"weak", c.weak},
                            {"strong_bound", c.strong_bound},
                            {"weak_bound", c.weak_bound},
                            {"second_pair_exactly_two_weak",
                             c.second_pair_checked ? json(c.second_pair_ok) : json(nullptr)},
                            {"pass", c.pass()}});
    run["nodal"] = nodal_json;
    checks.push_back(check(tag + ".nodal_bounds", nodal.all_pass()));

    json space = json::array();
    bool space_ok = true;
    for (std::size_t i = 0; i < spectrum.pairs.size(); ++i) {
      const auto& pair = spectrum.pairs[i];
      std::uint64_t s1 = rng(), s2 = rng();
      double strong = nodal_space_max_rq(g, pair, NodalKind::strong, options.rq_samples, s1,
                                         options.zero_tol);
      double weak = nodal_space_max_rq(g, pair, NodalKind::weak, options.rq_samples, s2,
                                       options.zero_tol);
      bool ok = strong <= pair.lambda + 1e-8 && weak <= pair.lambda + 1e-8;
      space_ok &= ok;
      space.push_back({{"k", i + 1}, {"strong_max_rq", strong}, {"weak_max_rq", weak}, {"pass", ok}});
    }
    run["nodal_space"] = space;
    checks.push_back(check(tag + ".nodal_space_rayleigh", space_ok));

    json sweeps = json::array();
    bool sweep_ok = true;
    for (std::size_t i = 1; i < spectrum.pairs.size(); ++i) {
      SweepResult sweep = sweep_cut(g, spectrum.pairs[i].f, p);
      sweep_ok &= sweep.within_bound();
      sweeps.push_back({{"k", i + 1},
                        {"set", subset_json(sweep.set)},
                        {"ratio", sweep.ratio},
                        {"bound", sweep.bound},
                        {"pass", sweep.within_bound()}});
    }
    run["sweep"] = sweeps;
    checks.push_back(check(tag + ".sweep_cut_bound", sweep_ok));

    if (!constants.empty() && constants.front().exact) {
      auto certs = certify_cheeger(g, spectrum, constants, options.zero_tol);
      json cj = json::array();
      bool cheeger_ok = true;
      for (const auto& c : certs) {
        cheeger_ok &= c.pass();
        cj.push_back({{"k", c.k},
                      {"lambda_k", c.lambda_k},
                      {"m", c.m},
                      {"h_k", c.h_k},
                      {"h_m", c.h_m},
                      {"tau", c.tau},
                      {"lower", c.lower},
                      {"upper", c.upper},
                      {"tol", c.tol},
                      {"pass", c.pass()}});
        if (!c.pass())
          result.messages.push_back("failed Cheeger certificate: " + cj.back().dump());
      }
      run["cheeger"] = cj;
      checks.push_back(check(tag + ".cheeger_bounds", cheeger_ok));
    } else {
      run["cheeger"] = "skipped: exact h_k needs n <= " + std::to_string(kExactCheegerMaxN);
    }
    for (const auto& c : nodal.pairs)
      if (!c.pass())
        result.messages.push_back("failed nodal certificate at " + tag + ": " +
                                  nodal_json[c.k - 1].dump());
    timings[tag] = clock.seconds();
    result.spectra.push_back(std::move(spectrum));
    runs.push_back(std::move(run));
  }

  // Spot check of the ax - by inequality on random inputs with xy <= 0.
  {
    std::uniform_real_distribution<double> exponent(1.0, 4.0);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    double worst = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < options.ax_by_samples; ++i) {
      double p = exponent(rng), a = value(rng), b = value(rng), x = value(rng), y = value(rng);
      if (x * y > 0) y = -y;
      double gap = ax_by_gap(p, a, b, x, y);
      double scale = std::pow(std::abs(a * x) + std::abs(b * y) + std::abs(x) + std::abs(y), p) + 1.0;
      worst = std::max(worst, gap / scale);
      ok &= gap <= 1e-12 * scale;
    }
    checks.push_back(check("ax_by_inequality", ok,
                           {{"samples", options.ax_by_samples}, {"max_scaled_gap", worst}}));
  }

  json one_lap = nullptr;
  if (options.one_laplacian) {
    Stopwatch clock;
    one_lap = one_laplacian_section(g, constants, checks);
    timings["one_laplacian"] = clock.seconds();
  }

  bool all_pass = true;
  for (const auto& c : checks) {
    all_pass &= c["pass"].get<bool>();
    if (!c["pass"].get<bool>()) result.messages.push_back("failed check: " + c.dump());
  }
  if (result.exit_code == kExitOk && !all_pass) result.exit_code = kExitCertificateFailure;

  json p_list = options.p_list;
  result.report = {{"schema_version", kReportSchemaVersion},
                   {"command", "certify"},
                   {"input", graph_json(g)},
                   {"parameters",
                    {{"p", p_list},
                     {"steps", options.steps},
                     {"min_p", options.min_p},
                     {"residual_tol", options.residual_tol},
                     {"zero_tol", options.zero_tol < 0 ? json("1e-9*max|f|") : json(options.zero_tol)},
                     {"multiplicity_tol", options.multiplicity_tol},
                     {"rq_samples", options.rq_samples},
                     {"ax_by_samples", options.ax_by_samples},
                     {"seed", options.seed},
                     {"cheeger_definition", "k pairwise disjoint nonempty subsets, not required to cover V"}}},
                   {"cheeger_constants", cheeger_table},
                   {"runs", runs},
                   {"checks", checks},
                   {"pass", all_pass && result.exit_code == kExitOk}};
  if (options.one_laplacian) result.report["one_laplacian"] = one_lap;
  if (options.timings) {
    timings["total"] = total.seconds();
    result.report["timings"] = timings;
  }
  return result;
}

CommandResult cmd_cheeger(const Graph& g, const CheegerOptions& options) {
  CommandResult result;
  if (options.k < 1 || options.k > g.n())
    throw std::invalid_argument("k must satisfy 1 <= k <= n (n = " + std::to_string(g.n()) + ")");
  Stopwatch clock;
  auto constants = cheeger_constants(g, options.k, options.approx);
  json table = json::array();
  json values = json::array();
  for (std::size_t i = 0; i < constants.size(); ++i) {
    values.push_back(constants[i].h);
    table.push_back({{"k", i + 1},
                     {"h", constants[i].h},
                     {"exact", constants[i].exact},
                     {"family", family_json(constants[i].family)}});
  }
  result.report = {{"schema_version", kReportSchemaVersion},
                   {"command", "cheeger"},
                   {"input", graph_json(g)},
                   {"parameters",
                    {{"k", options.k},
                     {"approx", options.approx},
                     {"cheeger_definition", "k pairwise disjoint nonempty subsets, not required to cover V"}}},
                   {"h", values},
                   {"constants", table}};
  if (options.sweep) {
    SweepResult sweep = sweep_cut(g, *options.sweep, options.sweep_p);
    result.report["sweep"] = {{"p", options.sweep_p},
                              {"set", subset_json(sweep.set)},
                              {"ratio", sweep.ratio},
                              {"bound", sweep.bound},
                              {"within_bound", sweep.within_bound()}};
    std::ostringstream line;
    line << std::setprecision(12) << "sweep: c(A) = " << sweep.ratio
         << " <= p R_p(f)^(1/p) (tau/2)^(1/q) = " << sweep.bound
         << (sweep.within_bound() ? "  [ok]" : "  [VIOLATED]");
    result.messages.push_back(line.str());
    if (!sweep.within_bound()) result.exit_code = kExitCertificateFailure;
  }
  if (options.timings) result.report["timings"] = {{"total_seconds", clock.seconds()}};
  return result;
}

std::string spectrum_csv(const std::vector<Spectrum>& spectra) {
  std::ostringstream out;
  out << std::setprecision(17);
  std::size_t n = 0;
  for (const auto& s : spectra)
    if (!s.pairs.empty()) n = std::max<std::size_t>(n, s.pairs.front().f.size());
  out << "p,k,lambda,residual";
  for (std::size_t u = 1; u <= n; ++u) out << ",f_" << u;
  out << '\n';
  for (const auto& s : spectra) {
    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
      const auto& pair = s.pairs[i];
      out << s.p << ',' << i + 1 << ',' << pair.lambda << ',' << pair.residual;
      for (Eigen::Index u = 0; u < pair.f.size(); ++u) out << ',' << static_cast<double>(pair.f[u]);
      out << '\n';
    }
  }
  return out.str();
}

VertexFunction parse_vertex_function(const std::string& text, int n) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    std::string extra;
    if (end != tok.c_str() + tok.size() || !std::isfinite(v) || (tokens >> extra))
      throw ParseError(line_no, "expected one real value per line");
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != n)
    throw ParseError(0, "eigenfunction file has " + std::to_string(values.size()) +
                            " values, graph has " + std::to_string(n) + " vertices");
  return Eigen::Map<Eigen::VectorXd>(values.data(), n).cast<Real>();
}

VertexFunction read_vertex_function(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_vertex_function(buffer.str(), n);
}

}  // namespace plap
