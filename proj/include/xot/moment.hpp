#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xot/sdp.hpp"

// Moment-matrix semidefinite programs: maximize a linear function of the
// moments y_c subject to Gamma(y) = sum_c y_c A_c >= 0, where the A_c are the
// disjoint symmetric 0/1 entry patterns of an n x n matrix and the moment of
// the identity word is pinned to 1. Every variable is the expectation of a
// product of projectors in a normalized state, so |y_c| <= 1; the certified
// bounds rely on exactly that.
namespace xot::moment {

struct MomentProblem {
  int n = 0;
  Eigen::MatrixXi cls;  // class id per entry, symmetric, -1 = entry forced 0
  int nclasses = 0;
  int identity_class = 0;
  std::vector<double> objective;  // per class; identity entry acts as constant
  // optional gate row: sum_c gate_c y_c >= gate_rhs
  std::vector<double> gate;
  double gate_rhs = 0.0;
  bool has_gate = false;

  void validate() const;  // throws std::invalid_argument
};

struct MomentSolution;

struct AdmmOptions {
  double beta = 1.0;
  bool adapt = true;
  int max_iter = 200000;
  double tol = 1e-7;  // relative split / multiplier residual target
  int check_every = 100;
  double time_limit = 0.0;  // seconds, 0 = unlimited
  // iteration, split residual, multiplier residual, best certified bound
  std::function<void(int, double, double, double)> progress;
  // warm start from the (y, witness, witness_gate) of an earlier run; sizes
  // must match the problem, beta should be the earlier run's exit value
  std::vector<double> warm_y;
  Eigen::MatrixXd warm_witness;
  double warm_gate = 0.0;
  // resumable state snapshots every ~checkpoint_every iterations; 0 = off
  int checkpoint_every = 0;
  std::function<void(const MomentSolution&)> on_checkpoint;
};

struct MomentSolution {
  bool converged = false;
  double upper_bound = 0.0;         // certified whenever all |y_c| <= 1
  double objective_estimate = 0.0;  // value at the y iterate, not certified
  std::vector<double> y;
  Eigen::MatrixXd witness;  // PSD matrix backing the bound
  double witness_gate = 0.0;
  double residual_l1 = 0.0;  // sum_c |<A_c, witness> + gate part + obj_c|
  double witness_min_eig = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  double beta = 0.0;  // penalty at exit, feed back through AdmmOptions::beta

  nlohmann::json to_json() const;  // summary only, without the witness matrix
};

// first-order splitting solver; scales to matrices far beyond the dense
// interior-point path
MomentSolution solve_admm(const MomentProblem& p, const AdmmOptions& opt = {});

// recompute the upper bound implied by a witness from scratch: residual
// correction uses |y_c| <= 1, negative eigenvalues are charged n * |lambda|
double certified_bound(const MomentProblem& p, const Eigen::MatrixXd& witness,
                       double witness_gate = 0.0);

// entry-equality encoding for the dense interior-point solver; reference path
// for small instances
sdp::SdpProblem to_sdp(const MomentProblem& p);

// helper shared by solvers and tests: min eigenvalue of a symmetric matrix
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace xot::moment
