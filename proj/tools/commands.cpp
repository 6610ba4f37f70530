#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include "csvio.hpp"
#include "json.hpp"
#include "riskphase/errors.hpp"
#include "riskphase/fitting.hpp"
#include "riskphase/mcharness.hpp"
#include "riskphase/replica.hpp"
#include "riskphase/risk.hpp"

namespace riskphase::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "riskphase 1.0.0";

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::string out_path(const CommonOptions& common, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(common.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory: " + common.out_dir);
  }
  return (std::filesystem::path(common.out_dir) / name).string();
}

void write_sidecar(const CommonOptions& common, const std::string& name,
                   const std::string& command, const json& parameters,
                   const Stopwatch& timer) {
  json doc;
  doc["command"] = command;
  doc["version"] = kVersion;
  doc["generated_at"] = iso_timestamp();
  doc["wall_seconds"] = timer.seconds();
  doc["parameters"] = parameters;
  const std::string path = out_path(common, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << doc.dump(2) << "\n";
}

Measure parse_measure(const std::string& name) {
  if (name == "var") return Measure::VaR;
  if (name == "es") return Measure::ES;
  if (name == "semivariance") return Measure::Semivariance;
  if (name == "phi") return Measure::RawPhi;
  throw UsageError("unknown measure '" + name + "' (expected var|es|semivariance|phi)");
}

std::vector<double> parse_grid_spec(const std::string& spec, const char* what) {
  const auto first = spec.find(':');
  const auto second = spec.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw UsageError(std::string(what) + " grid must be min:max:step, got '" + spec + "'");
  }
  double lo = 0.0, hi = 0.0, step = 0.0;
  try {
    lo = std::stod(spec.substr(0, first));
    hi = std::stod(spec.substr(first + 1, second - first - 1));
    step = std::stod(spec.substr(second + 1));
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " grid must be numeric min:max:step, got '" + spec +
                     "'");
  }
  if (!(step > 0.0) || hi < lo) {
    throw UsageError(std::string(what) + " grid needs step > 0 and max >= min");
  }
  std::vector<double> values;
  for (double v = lo; v <= hi + 0.5 * step; v += step) {
    values.push_back(std::min(v, hi));
  }
  return values;
}

/// Tail-factor values the command operates on, from whichever of
/// measure/alpha/phi the user supplied.
std::vector<double> resolve_phi_values(const std::string& measure_name,
                                       const std::vector<double>& phi,
                                       const std::vector<double>& alpha,
                                       const std::string& phi_grid,
                                       const std::string& alpha_grid) {
  const Measure measure = parse_measure(measure_name);
  std::vector<double> values;
  if (measure == Measure::Semivariance) {
    if (!phi.empty() || !alpha.empty() || !phi_grid.empty() || !alpha_grid.empty()) {
      throw UsageError("semivariance fixes phi = 1/sqrt(2); do not pass --phi/--alpha");
    }
    values.push_back(kSemivariancePhi);
    return values;
  }
  std::vector<double> alphas = alpha;
  if (!alpha_grid.empty()) {
    const auto grid = parse_grid_spec(alpha_grid, "alpha");
    alphas.insert(alphas.end(), grid.begin(), grid.end());
  }
  if (!alphas.empty() && measure == Measure::RawPhi) {
    throw UsageError("--alpha requires --measure var or es");
  }
  for (double a : alphas) {
    values.push_back(phi_of_alpha(measure, a));
  }
  values.insert(values.end(), phi.begin(), phi.end());
  if (!phi_grid.empty()) {
    const auto grid = parse_grid_spec(phi_grid, "phi");
    values.insert(values.end(), grid.begin(), grid.end());
  }
  for (double v : values) {
    if (!(v > 0.0)) throw UsageError("phi values must be positive");
  }
  if (values.empty()) {
    throw UsageError("no phi or alpha values given");
  }
  return values;
}

/// Square headerless CSV of floats, validated SPD on load.
Matrix load_covariance(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open covariance file: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw CsvParseError(path + ":" + std::to_string(line_no) + ": not a number: '" +
                            cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw CsvParseError(path + ": empty covariance file");
  }
  const std::size_t n = rows.size();
  Matrix sigma(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw CsvParseError(path + ": row " + std::to_string(i + 1) + " has " +
                          std::to_string(rows[i].size()) + " entries, expected " +
                          std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      sigma(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  try {
    cholesky(sigma);
  } catch (const std::exception& e) {
    throw CsvParseError(path + ": covariance is not symmetric positive definite (" +
                        e.what() + ")");
  }
  return sigma;
}

std::string format_r_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", r);
  return std::string("q0sq_r") + buf;
}

}  // namespace

int cmd_analytic(const AnalyticOptions& opt) {
  Stopwatch timer;
  const std::vector<double> phis =
      resolve_phi_values(opt.measure, opt.phi, opt.alpha, opt.phi_grid, opt.alpha_grid);
  for (double r : opt.r) {
    if (!(r >= 0.0)) throw UsageError("--r values must be nonnegative");
  }

  std::vector<std::string> header = {"phi", "alpha_var", "alpha_es", "r_c"};
  for (double r : opt.r) header.push_back(format_r_label(r));
  CsvWriter writer(header);

  for (double phi : phis) {
    std::vector<std::string> row;
    row.push_back(csv_number(phi));
    try {
      row.push_back(csv_number(alpha_of_phi(Measure::VaR, phi)));
    } catch (const std::domain_error&) {
      row.emplace_back();
    }
    try {
      row.push_back(csv_number(alpha_of_phi(Measure::ES, phi)));
    } catch (const std::domain_error&) {
      row.emplace_back();
    }
    row.push_back(csv_number(phase_boundary_rc(phi)));
    for (double r : opt.r) {
      try {
        row.push_back(csv_number(expected_q0_squared(phi, r)));
      } catch (const DivergenceError&) {
        row.push_back("inf");
      }
    }
    writer.add_row(std::move(row));
  }
  writer.write_file(out_path(opt.common, "analytic.csv"));

  json params;
  params["measure"] = opt.measure;
  params["phi"] = phis;
  params["r"] = opt.r;
  write_sidecar(opt.common, "analytic.meta.json", "analytic", params, timer);
  std::printf("analytic: %zu rows -> %s\n", phis.size(),
              out_path(opt.common, "analytic.csv").c_str());
  return kOk;
}

int cmd_scan(const ScanOptions& opt) {
  Stopwatch timer;
  const std::vector<double> phis =
      resolve_phi_values(opt.measure, opt.phi, opt.alpha, opt.phi_grid, "");
  if (opt.n.empty()) throw UsageError("scan needs at least one --n");
  if (opt.trials < 1) throw UsageError("--trials must be at least 1");
  if (opt.r_grid.empty() == opt.t.empty()) {
    throw UsageError("scan needs exactly one of --r-grid or --t");
  }

  std::optional<Matrix> cov;
  if (!opt.cov_file.empty()) {
    cov = load_covariance(opt.cov_file);
    for (std::int64_t n : opt.n) {
      if (n != cov->rows()) {
        throw UsageError("--cov matrix is " + std::to_string(cov->rows()) + "x" +
                         std::to_string(cov->rows()) + " but --n includes " +
                         std::to_string(n));
      }
    }
  }

  std::vector<GridCell> cells;
  for (double phi : phis) {
    for (std::int64_t n : opt.n) {
      if (n < 1) throw UsageError("--n must be positive");
      if (!opt.r_grid.empty()) {
        for (double r : parse_grid_spec(opt.r_grid, "r")) {
          if (!(r > 0.0)) throw UsageError("r grid values must be positive");
          const auto t = std::max<std::int64_t>(
              2, std::llround(static_cast<double>(n) / r));
          cells.push_back({static_cast<Index>(n), static_cast<Index>(t), phi});
        }
      } else {
        for (std::int64_t t : opt.t) {
          if (t < 2) throw UsageError("--t must be at least 2");
          cells.push_back({static_cast<Index>(n), static_cast<Index>(t), phi});
        }
      }
    }
  }

  const std::vector<PhasePoint> points =
      scan_phase_grid(cells, opt.trials, opt.seed, cov, opt.common.workers);

  CsvWriter writer({"n", "t", "r", "phi", "trials", "successes", "p_hat", "binomial_stderr"});
  for (const PhasePoint& p : points) {
    writer.add_row({std::to_string(p.n_assets), std::to_string(p.n_obs), csv_number(p.r()),
                    csv_number(p.phi), std::to_string(p.trials), std::to_string(p.successes),
                    csv_number(p.p_hat), csv_number(p.binomial_stderr())});
  }
  writer.write_file(out_path(opt.common, "scan.csv"));

  json params;
  params["measure"] = opt.measure;
  params["phi"] = phis;
  params["n"] = opt.n;
  params["r_grid"] = opt.r_grid;
  params["t"] = opt.t;
  params["trials"] = opt.trials;
  params["seed"] = opt.seed;
  params["cov"] = opt.cov_file;
  params["workers"] = opt.common.workers;
  write_sidecar(opt.common, "scan.meta.json", "scan", params, timer);
  std::printf("scan: %zu points x %lld trials -> %s\n", points.size(),
              static_cast<long long>(opt.trials), out_path(opt.common, "scan.csv").c_str());
  return kOk;
}

namespace {

struct SeriesKey {
  long long n;
  std::string phi_text;
  bool operator<(const SeriesKey& other) const {
    return std::tie(n, phi_text) < std::tie(other.n, other.phi_text);
  }
};

struct SeriesFit {
  SeriesKey key;
  double phi = 0.0;
  std::string status;  // ok | unidentifiable | no_convergence | insufficient_points
  ProbitFit fit;
};

}  // namespace

int cmd_fit(const FitOptions& opt) {
  Stopwatch timer;
  if (opt.scan_files.empty()) throw UsageError("fit needs at least one scan CSV");
  for (double p : opt.contour_p) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("--contour targets must lie in (0, 1)");
  }

  std::map<SeriesKey, std::vector<PhasePoint>> series;
  std::vector<SeriesKey> order;
  for (const std::string& file : opt.scan_files) {
    const CsvTable table = read_csv(file);
    const int col_n = table.column("n");
    const int col_t = table.column("t");
    const int col_phi = table.column("phi");
    const int col_trials = table.column("trials");
    const int col_successes = table.column("successes");
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      PhasePoint p;
      p.n_assets = static_cast<Index>(csv_to_int(table, row, col_n));
      p.n_obs = static_cast<Index>(csv_to_int(table, row, col_t));
      p.phi = csv_to_double(table, row, col_phi);
      p.trials = csv_to_int(table, row, col_trials);
      p.successes = csv_to_int(table, row, col_successes);
      if (p.trials < 1 || p.successes < 0 || p.successes > p.trials) {
        throw CsvParseError(file + ":" + std::to_string(row + 2) +
                            ": successes/trials out of range");
      }
      p.p_hat = static_cast<double>(p.successes) / static_cast<double>(p.trials);
      const SeriesKey key{static_cast<long long>(p.n_assets), csv_number(p.phi)};
      if (series.find(key) == series.end()) order.push_back(key);
      series[key].push_back(p);
    }
  }

  bool any_convergence_failure = false;
  std::vector<SeriesFit> fits;
  for (const SeriesKey& key : order) {
    SeriesFit out;
    out.key = key;
    out.phi = series[key].front().phi;
    try {
      out.fit = fit_probit(series[key]);
      out.status = "ok";
    } catch (const UnidentifiableFitError&) {
      out.status = "unidentifiable";
    } catch (const ConvergenceError&) {
      out.status = "no_convergence";
      any_convergence_failure = true;
    } catch (const std::domain_error&) {
      out.status = "insufficient_points";
    }
    fits.push_back(std::move(out));
  }

  CsvWriter fit_writer({"n", "phi", "n_points", "mu_fit", "sigma_fit", "se_mu", "se_sigma",
                        "log_likelihood", "status"});
  for (const SeriesFit& f : fits) {
    if (f.status == "ok") {
      fit_writer.add_row({std::to_string(f.key.n), f.key.phi_text,
                          std::to_string(f.fit.n_points), csv_number(f.fit.mu_fit),
                          csv_number(f.fit.sigma_fit), csv_number(f.fit.se_mu),
                          csv_number(f.fit.se_sigma), csv_number(f.fit.log_likelihood),
                          f.status});
    } else {
      fit_writer.add_row({std::to_string(f.key.n), f.key.phi_text, "", "", "", "", "", "",
                          f.status});
    }
  }
  fit_writer.write_file(out_path(opt.common, "fit.csv"));

  // Intersections of curves sharing phi, one row per N pair.
  CsvWriter cross_writer({"phi", "n_a", "n_b", "r_star", "status"});
  std::map<std::string, std::vector<const SeriesFit*>> by_phi;
  std::vector<std::string> phi_order;
  for (const SeriesFit& f : fits) {
    if (f.status != "ok") continue;
    if (by_phi.find(f.key.phi_text) == by_phi.end()) phi_order.push_back(f.key.phi_text);
    by_phi[f.key.phi_text].push_back(&f);
  }
  for (const std::string& phi_text : phi_order) {
    const auto& group = by_phi[phi_text];
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        const SeriesFit* lo = group[a];
        const SeriesFit* hi = group[b];
        if (lo->key.n > hi->key.n) std::swap(lo, hi);
        std::string r_star, status = "ok";
        try {
          r_star = csv_number(critical_point_intersection(lo->fit, hi->fit));
        } catch (const NoIntersectionError&) {
          status = "no_intersection";
        }
        cross_writer.add_row({phi_text, std::to_string(lo->key.n),
                              std::to_string(hi->key.n), r_star, status});
      }
    }
  }
  cross_writer.write_file(out_path(opt.common, "intersections.csv"));

  if (!opt.contour_p.empty()) {
    CsvWriter contour_writer({"n", "phi", "p_target", "r"});
    for (const SeriesFit& f : fits) {
      if (f.status != "ok") continue;
      for (double p : opt.contour_p) {
        contour_writer.add_row({std::to_string(f.key.n), f.key.phi_text, csv_number(p),
                                csv_number(contour_r(f.fit, p))});
      }
    }
    contour_writer.write_file(out_path(opt.common, "contours.csv"));
  }

  json params;
  params["scan_files"] = opt.scan_files;
  params["contour"] = opt.contour_p;
  write_sidecar(opt.common, "fit.meta.json", "fit", params, timer);
  std::printf("fit: %zu series -> %s\n", fits.size(),
              out_path(opt.common, "fit.csv").c_str());
  return any_convergence_failure ? kConvergence : kOk;
}

int cmd_qzero(const QZeroOptions& opt) {
  Stopwatch timer;
  const std::vector<double> phis =
      resolve_phi_values(opt.measure, opt.phi, opt.alpha, "", "");
  if (phis.size() != 1) throw UsageError("qzero works at a single phi per run");
  const double phi = phis.front();
  if (opt.n.size() != opt.t.size() || opt.n.empty()) {
    throw UsageError("qzero needs matching --n and --t lists");
  }
  if (opt.trials < 1) throw UsageError("--trials must be at least 1");

  std::optional<Matrix> cov;
  if (!opt.cov_file.empty()) {
    cov = load_covariance(opt.cov_file);
    for (std::int64_t n : opt.n) {
      if (n != cov->rows()) {
        throw UsageError("--cov dimension does not match --n");
      }
    }
  }

  const RiskSpec spec = RiskSpec::raw_phi(phi);
  const double rc = phase_boundary_rc(phi);
  CsvWriter writer({"n", "t", "r", "phi", "trials", "n_feasible", "mean_q0sq", "var_q0sq",
                    "theory_q0sq", "z_score"});
  for (std::size_t i = 0; i < opt.n.size(); ++i) {
    const Index n = static_cast<Index>(opt.n[i]);
    const Index t = static_cast<Index>(opt.t[i]);
    if (n < 1 || t < 2) throw UsageError("each point needs n >= 1 and t >= 2");
    const double r = static_cast<double>(n) / static_cast<double>(t);
    if (r >= rc) {
      std::fprintf(stderr,
                   "warning: N/T = %.4f is at or beyond r_c = %.4f; conditional q0 "
                   "statistics are dominated by finite-size effects there\n",
                   r, rc);
    }
    MomentParams truth = cov ? MomentParams{Vector::Zero(n), *cov, MomentOrigin::True}
                             : iid_truth(n);
    const QZeroStats stats = measure_q0(n, t, spec, opt.trials,
                                        derive_substream_seed(opt.seed, i), truth,
                                        opt.common.workers);
    std::string theory_text = "inf";
    std::optional<double> theory;
    try {
      theory = expected_q0_squared(phi, r);
      theory_text = csv_number(*theory);
    } catch (const DivergenceError&) {
    }
    std::string z_text;
    if (theory && stats.n_feasible >= 2 && stats.variance_q0_squared > 0.0) {
      const double se =
          std::sqrt(stats.variance_q0_squared / static_cast<double>(stats.n_feasible));
      z_text = csv_number((stats.mean_q0_squared - *theory) / se);
    }
    writer.add_row({std::to_string(n), std::to_string(t), csv_number(r), csv_number(phi),
                    std::to_string(opt.trials), std::to_string(stats.n_feasible),
                    stats.n_feasible > 0 ? csv_number(stats.mean_q0_squared) : "",
                    stats.n_feasible > 1 ? csv_number(stats.variance_q0_squared) : "",
                    theory_text, z_text});
  }
  writer.write_file(out_path(opt.common, "qzero.csv"));

  json params;
  params["measure"] = opt.measure;
  params["phi"] = phi;
  params["n"] = opt.n;
  params["t"] = opt.t;
  params["trials"] = opt.trials;
  params["seed"] = opt.seed;
  params["cov"] = opt.cov_file;
  write_sidecar(opt.common, "qzero.meta.json", "qzero", params, timer);
  std::printf("qzero: %zu points -> %s\n", opt.n.size(),
              out_path(opt.common, "qzero.csv").c_str());
  return kOk;
}

int cmd_compare(const CompareOptions& opt) {
  Stopwatch timer;
  if (opt.intersections_file.empty()) {
    throw UsageError("compare needs --intersections FILE (output of fit)");
  }
  const Measure measure = parse_measure(opt.measure);
  const bool alpha_mapped = measure == Measure::VaR || measure == Measure::ES;

  std::vector<std::pair<double, double>> boundary;  // (alpha, r_c), sorted
  if (!opt.boundary_file.empty()) {
    if (!alpha_mapped) {
      throw UsageError("--boundary alignment needs --measure var or es");
    }
    const CsvTable table = read_csv(opt.boundary_file);
    const int col_alpha = table.column("alpha");
    const int col_rc = table.column("r_c");
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      boundary.emplace_back(csv_to_double(table, row, col_alpha),
                            csv_to_double(table, row, col_rc));
    }
    if (boundary.size() < 2) {
      throw CsvParseError(opt.boundary_file + ": need at least two boundary points");
    }
    std::sort(boundary.begin(), boundary.end());
  }

  const CsvTable table = read_csv(opt.intersections_file);
  const int col_phi = table.column("phi");
  const int col_na = table.column("n_a");
  const int col_nb = table.column("n_b");
  const int col_rstar = table.column("r_star");
  const int col_status = table.column("status");

  CsvWriter writer({"phi", "alpha", "n_a", "n_b", "r_star_measured", "r_c_analytic", "delta",
                    "overlay_r_c"});
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    if (table.rows[row][static_cast<std::size_t>(col_status)] != "ok") continue;
    const double phi = csv_to_double(table, row, col_phi);
    const double r_star = csv_to_double(table, row, col_rstar);
    const double rc = phase_boundary_rc(phi);
    std::string alpha_text;
    std::optional<double> alpha;
    if (alpha_mapped) {
      alpha = alpha_of_phi(measure, phi);
      alpha_text = csv_number(*alpha);
    }
    std::string overlay_text;
    if (!boundary.empty()) {
      if (!alpha || *alpha < boundary.front().first || *alpha > boundary.back().first) {
        throw CsvParseError("compare: alpha " + (alpha ? csv_number(*alpha) : "?") +
                            " outside the external boundary range [" +
                            csv_number(boundary.front().first) + ", " +
                            csv_number(boundary.back().first) + "]");
      }
      auto upper = std::lower_bound(
          boundary.begin(), boundary.end(), std::make_pair(*alpha, -1e300));
      if (upper == boundary.begin()) {
        overlay_text = csv_number(upper->second);
      } else {
        const auto lower = upper - 1;
        const double w = (upper->first == lower->first)
                             ? 0.0
                             : (*alpha - lower->first) / (upper->first - lower->first);
        overlay_text = csv_number(lower->second + w * (upper->second - lower->second));
      }
    }
    writer.add_row({csv_number(phi), alpha_text,
                    table.rows[row][static_cast<std::size_t>(col_na)],
                    table.rows[row][static_cast<std::size_t>(col_nb)], csv_number(r_star),
                    csv_number(rc), csv_number(r_star - rc), overlay_text});
  }
  writer.write_file(out_path(opt.common, "compare.csv"));

  json params;
  params["measure"] = opt.measure;
  params["intersections"] = opt.intersections_file;
  params["boundary"] = opt.boundary_file;
  write_sidecar(opt.common, "compare.meta.json", "compare", params, timer);
  std::printf("compare: -> %s\n", out_path(opt.common, "compare.csv").c_str());
  return kOk;
}

}  // namespace riskphase::cli
