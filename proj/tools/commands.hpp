#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskphase::cli {

// Exit-code contract (documented in the README):
//   0 success, 2 usage, 3 I/O, 4 parse/validation of input data,
//   5 convergence failure.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kConvergence = 5,
};

/// Malformed or inconsistent parameter combinations discovered inside a
/// command (beyond what flag parsing can see).
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Options shared by every command.
struct CommonOptions {
  std::string out_dir = ".";
  unsigned workers = 0;  // 0 = hardware concurrency
};

struct AnalyticOptions {
  CommonOptions common;
  std::string measure = "phi";
  std::vector<double> phi;
  std::vector<double> alpha;
  std::string phi_grid;    // "min:max:step"
  std::string alpha_grid;  // "min:max:step"
  std::vector<double> r;   // evaluation points for the q0^2 law
};

struct ScanOptions {
  CommonOptions common;
  std::string measure = "phi";
  std::vector<double> phi;
  std::vector<double> alpha;
  std::string phi_grid;
  std::vector<std::int64_t> n;
  std::string r_grid;  // "min:max:step"
  std::vector<std::int64_t> t;
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  std::string cov_file;
};

struct FitOptions {
  CommonOptions common;
  std::vector<std::string> scan_files;
  std::vector<double> contour_p;
};

struct QZeroOptions {
  CommonOptions common;
  std::string measure = "phi";
  std::vector<double> phi;
  std::vector<double> alpha;
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> t;
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  std::string cov_file;
};

struct CompareOptions {
  CommonOptions common;
  std::string measure = "phi";
  std::string intersections_file;
  std::string boundary_file;  // optional external curve (columns: alpha,r_c)
};

int cmd_analytic(const AnalyticOptions& opt);
int cmd_scan(const ScanOptions& opt);
int cmd_fit(const FitOptions& opt);
int cmd_qzero(const QZeroOptions& opt);
int cmd_compare(const CompareOptions& opt);

}  // namespace riskphase::cli
