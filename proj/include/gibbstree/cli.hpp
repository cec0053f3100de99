#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gibbstree/model.hpp"
#include "gibbstree/tigm.hpp"
#include "json.hpp"

namespace gibbstree::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kInvalidInput = 2, kResourceGuard = 3 };

/// Raw parameter flags; resolve() turns them into ModelParams.
struct ParamSource {
  std::optional<std::string> params_json;  // file path or inline document
  std::optional<int> q, k;
  std::optional<double> alpha, beta;
  std::optional<double> J_I, J_P;
  std::optional<double> theta_I, theta_P;
  std::optional<double> a, b;
  bool equal_couplings = false;
};

ModelParams resolve(const ParamSource& source);

/// Copy of `source` with one named parameter replaced (a, b, thetaI, thetaP,
/// JI, JP, alpha, beta).
ParamSource with_param(ParamSource source, const std::string& name, double value);

struct RunConfig {
  std::string command;
  ParamSource params;
  std::string target;  // case1 | case2 | quartic; empty picks a default
  std::string sweep_param;
  std::optional<double> lo, hi;
  int steps = 0;
  double tol = 1e-4;
  double dedup_tol = 1e-9;
  QuarticForm form = QuarticForm::derived;
  std::string format;
  std::string out_path;
  int depth = 2;
  OracleMode mode = OracleMode::automatic;
  double perturb = 1.0;
  int threads = 0;  // 0: GIBBSTREE_THREADS or hardware concurrency
};

nlohmann::json cmd_classify(const RunConfig& config);
/// CSV text with header param,count,validated_count.
std::string cmd_sweep(const RunConfig& config);
nlohmann::json cmd_thresholds(const RunConfig& config);
/// Report plus whether every non-diagnostic check passed.
struct VerifyOutcome {
  nlohmann::json report;
  bool passed = false;
};
VerifyOutcome cmd_verify(const RunConfig& config);
/// CSV text with header x,P.
std::string cmd_sample_poly(const RunConfig& config);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gibbstree::cli
