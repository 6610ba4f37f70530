#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "csvio.hpp"
#include "riskphase/errors.hpp"

namespace cli = riskphase::cli;

namespace {

void add_common(CLI::App* cmd, cli::CommonOptions& common) {
  cmd->add_option("--out", common.out_dir, "Output directory (created if missing)")
      ->capture_default_str();
  cmd->add_option("--workers", common.workers,
                  "Worker threads for Monte Carlo (0 = hardware concurrency)");
  cmd->set_config("--config", "", "TOML config file; command-line flags win");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasibility phase diagrams and estimation error of parametric "
               "VaR/ES/semivariance portfolio optimization"};
  app.set_version_flag("--version", "riskphase 1.0.0");
  app.require_subcommand(1);

  cli::AnalyticOptions analytic;
  CLI::App* cmd_analytic = app.add_subcommand(
      "analytic", "Closed-form phase boundary and estimation-error curves");
  add_common(cmd_analytic, analytic.common);
  cmd_analytic->add_option("--measure", analytic.measure, "var|es|semivariance|phi")
      ->capture_default_str();
  cmd_analytic->add_option("--phi", analytic.phi, "Tail factor value(s)");
  cmd_analytic->add_option("--alpha", analytic.alpha, "Confidence level(s), needs var|es");
  cmd_analytic->add_option("--phi-grid", analytic.phi_grid, "Tail factor grid min:max:step");
  cmd_analytic->add_option("--alpha-grid", analytic.alpha_grid,
                           "Confidence grid min:max:step");
  cmd_analytic->add_option("--r", analytic.r, "Aspect ratio(s) to evaluate q0^2 at");

  cli::ScanOptions scan;
  CLI::App* cmd_scan = app.add_subcommand(
      "scan", "Monte Carlo feasibility probability over an (N, T, phi) grid");
  add_common(cmd_scan, scan.common);
  cmd_scan->add_option("--measure", scan.measure, "var|es|semivariance|phi")
      ->capture_default_str();
  cmd_scan->add_option("--phi", scan.phi, "Tail factor value(s)");
  cmd_scan->add_option("--alpha", scan.alpha, "Confidence level(s), needs var|es");
  cmd_scan->add_option("--phi-grid", scan.phi_grid, "Tail factor grid min:max:step");
  cmd_scan->add_option("--n", scan.n, "Portfolio size(s)");
  cmd_scan->add_option("--r-grid", scan.r_grid, "Aspect-ratio grid min:max:step (T = N/r)");
  cmd_scan->add_option("--t", scan.t, "Explicit sample length(s)");
  cmd_scan->add_option("--trials", scan.trials, "Trials per grid point")
      ->capture_default_str();
  cmd_scan->add_option("--seed", scan.seed, "Master seed")->capture_default_str();
  cmd_scan->add_option("--cov", scan.cov_file,
                       "Square CSV covariance for a correlated zero-mean truth");

  cli::FitOptions fit;
  CLI::App* cmd_fit = app.add_subcommand(
      "fit", "Probit fits, curve intersections, and constant-p contours of scans");
  add_common(cmd_fit, fit.common);
  cmd_fit->add_option("scans", fit.scan_files, "scan.csv file(s)");
  cmd_fit->add_option("--contour", fit.contour_p, "Probability level(s) for contour rows");

  cli::QZeroOptions qzero;
  CLI::App* cmd_qzero = app.add_subcommand(
      "qzero", "Conditional estimation-error statistics against the analytic law");
  add_common(cmd_qzero, qzero.common);
  cmd_qzero->add_option("--measure", qzero.measure, "var|es|semivariance|phi")
      ->capture_default_str();
  cmd_qzero->add_option("--phi", qzero.phi, "Tail factor");
  cmd_qzero->add_option("--alpha", qzero.alpha, "Confidence level, needs var|es");
  cmd_qzero->add_option("--n", qzero.n, "Portfolio size(s), zipped with --t");
  cmd_qzero->add_option("--t", qzero.t, "Sample length(s), zipped with --n");
  cmd_qzero->add_option("--trials", qzero.trials, "Trials per point")->capture_default_str();
  cmd_qzero->add_option("--seed", qzero.seed, "Master seed")->capture_default_str();
  cmd_qzero->add_option("--cov", qzero.cov_file,
                        "Square CSV covariance for a correlated zero-mean truth");

  cli::CompareOptions compare;
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "Merge measured critical points with analytic and external boundaries");
  add_common(cmd_compare, compare.common);
  cmd_compare->add_option("--measure", compare.measure, "var|es|semivariance|phi")
      ->capture_default_str();
  cmd_compare->add_option("--intersections", compare.intersections_file,
                          "intersections.csv from fit");
  cmd_compare->add_option("--boundary", compare.boundary_file,
                          "External boundary CSV (columns: alpha,r_c)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return cli::kParse;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  try {
    if (app.got_subcommand(cmd_analytic)) return cli::cmd_analytic(analytic);
    if (app.got_subcommand(cmd_scan)) return cli::cmd_scan(scan);
    if (app.got_subcommand(cmd_fit)) return cli::cmd_fit(fit);
    if (app.got_subcommand(cmd_qzero)) return cli::cmd_qzero(qzero);
    if (app.got_subcommand(cmd_compare)) return cli::cmd_compare(compare);
  } catch (const cli::UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kUsage;
  } catch (const cli::CsvParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return cli::kParse;
  } catch (const cli::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return cli::kIo;
  } catch (const riskphase::ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return cli::kConvergence;
  } catch (const riskphase::ShapeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kUsage;
  }
  return cli::kOk;
}
