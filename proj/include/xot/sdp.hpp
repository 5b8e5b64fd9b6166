#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "xot/linalg.hpp"

namespace xot::sdp {

// Hermitian coefficient stored as upper-triangle entries; (c, r) holds the
// conjugate implicitly. <C, X> means Tr(C X), real for Hermitian arguments.
struct SparseHerm {
  int dim = 0;
  struct Entry {
    int r = 0, c = 0;
    cx v;
  };
  std::vector<Entry> entries;

  static SparseHerm from_dense(const Mat& m, double drop_tol = 1e-14);
  Mat dense() const;
  bool has_imag(double tol = 1e-12) const;
};

struct Block {
  std::string name;
  int dim = 0;
  // Hermitian variable even when every coefficient touching it is real.
  // Real coefficients otherwise restrict the block to real symmetric entries.
  bool force_complex = false;
};

struct Constraint {
  std::vector<SparseHerm> coeffs;  // one per block, entries may be empty
  double rhs = 0.0;
};

// maximize sum_k <objective[k], X_k>  subject to
//   for each constraint i: sum_k <coeffs[i][k], X_k> = rhs_i,  X_k >= 0
struct SdpProblem {
  std::vector<Block> blocks;
  std::vector<SparseHerm> objective;
  std::vector<Constraint> constraints;

  void validate() const;  // throws std::invalid_argument on shape errors
  nlohmann::json to_json() const;
  static SdpProblem from_json(const nlohmann::json& j);
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string to_string(SolveStatus s);

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<Mat> primal;    // per block
  std::vector<double> dual;   // per original constraint (zeros on dropped rows)
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static SdpSolution from_json(const nlohmann::json& j);
};

// primal-dual interior point with Nesterov-Todd scaling; complex blocks are
// embedded as real symmetric ones internally
SdpSolution solve(const SdpProblem& p, double tol = 1e-8, int max_iter = 150);

struct VerifyReport {
  double primal_residual = 0.0;  // max |<C_i, X> - rhs_i|
  double primal_min_eig = 0.0;   // most negative eigenvalue over primal blocks
  double dual_min_eig = 0.0;     // most negative eigenvalue of the dual slack
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;

  bool ok(double tol) const;
  nlohmann::json to_json() const;
};

// recomputes feasibility and the gap from scratch, trusting only (p, s)
VerifyReport verify_certificate(const SdpProblem& p, const SdpSolution& s, double tol = 1e-7);

}  // namespace xot::sdp
