#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "limlsel/mc/study.hpp"

namespace limlsel::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDegenerate = 3,
  kCalibrationFailure = 4,
};

// Bad configuration; field names the offending key or flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Keys accepted in a study config document. Any other key is rejected.
//   treatment_kind, scenario, copula, margin, t_df, n, seed, reps, methods,
//   criteria, xi_mode, sls_second_stage, parallelism, oracle_draws, out_dir
struct StudyFile {
  mc::StudyConfig study;
  std::string out_dir;
};

StudyFile parse_study_config(const std::string& json_text);
StudyFile load_study_config(const std::string& path);

// Default worker count: LIMLSEL_PARALLELISM when set, else 1.
unsigned default_parallelism();

// Entry point shared by the binary and the integration tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace limlsel::cli
