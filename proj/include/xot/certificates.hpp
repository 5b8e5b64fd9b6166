#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "xot/dd_bounds.hpp"
#include "xot/moment.hpp"

// Self-contained bound certificates. Each file carries the full problem data
// plus the piece of the solution that proves the bound (dual/primal pair for
// interior-point runs, dual witness for moment solves), so the claim can be
// rechecked with plain linear algebra and no knowledge of the solver.
namespace xot::cert {

inline constexpr const char* kFormat = "xot-certificate/1";
inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json sdp_certificate(const dd::CheatBound& b);
nlohmann::json moment_certificate(const std::string& label, const moment::MomentProblem& p,
                                  const moment::MomentSolution& s);

// a moment certificate extended with the solver state needed to resume the
// splitting iteration; verify() accepts it like any other certificate
nlohmann::json checkpoint(const std::string& label, const moment::MomentProblem& p,
                          const moment::MomentSolution& s);
// load warm-start state back into opt; throws if ck was made for another problem
void apply_resume(const nlohmann::json& ck, const moment::MomentProblem& p,
                  moment::AdmmOptions& opt);

struct VerifyOutcome {
  bool pass = false;
  std::string kind;
  std::string label;
  double claimed = 0.0;     // bound stated in the file
  double recomputed = 0.0;  // bound rebuilt from the certificate data alone
  std::string detail;       // residual summary, human readable

  nlohmann::json to_json() const;
};

// pass iff the recomputed bound supports the claim within tol; throws
// std::runtime_error on structurally broken input
VerifyOutcome verify(const nlohmann::json& cert, double tol = 1e-6);

void save(const std::filesystem::path& path, const nlohmann::json& cert);
nlohmann::json load(const std::filesystem::path& path);  // throws on missing/corrupt

// one line per emitted bound, written next to the certificates
struct RunRecord {
  std::string command;
  nlohmann::json parameters;
  std::string scenario;
  double value = 0.0;
  std::string certificate_path;
  nlohmann::json solver_stats;
  std::string timestamp = now_utc();
  std::string tool_version = kToolVersion;

  nlohmann::json to_json() const;
  static std::string now_utc();
};

}  // namespace xot::cert
