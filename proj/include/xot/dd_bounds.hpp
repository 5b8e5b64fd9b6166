#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xot/linalg.hpp"
#include "xot/sdp.hpp"

// Optimal cheating probabilities for the device-dependent protocols, phrased
// as state / channel discrimination and first-measurement-extraction SDPs.
namespace xot::dd {

struct CheatBound {
  std::string scenario;
  double value = 0.0;  // certified upper bound (dual value of the SDP)
  sdp::SdpProblem problem;
  sdp::SdpSolution certificate;
  nlohmann::json metadata;  // dims, constraint counts, reductions applied

  nlohmann::json to_json() const;
};

// max sum_b p_b Tr(E_b rho_b) over POVMs {E_b}; ensemble holds (p_b, rho_b)
sdp::SdpProblem build_state_discrimination(const std::vector<std::pair<double, Mat>>& ensemble);

// Choi matrix sum_ij Phi(E_ij) (x) E_ij, output register first.
// The callable form probes the channel on matrix units; both check trace
// preservation and throw std::invalid_argument on failure.
Mat choi(const std::function<Mat(const Mat&)>& channel, int d_in);
Mat choi_kraus(const std::vector<Mat>& kraus);

// max sum_b p_b Tr(J_b Q_b) s.t. sum_b Q_b = I_out (x) sigma, Tr sigma = 1
sdp::SdpProblem build_channel_discrimination(const std::vector<Mat>& chois,
                                             const std::vector<double>& priors, int d_out,
                                             int d_in);

// Qutrit protocol, honest device. Alice guesses Bob's choice bit from her
// reduced state (value 1/2); Bob distinguishes Alice's four phase unitaries
// (value 3/4).
CheatBound protocol3_alice_trusted(double tol = 1e-8);
CheatBound protocol3_bob_trusted(double tol = 1e-8);

// Game protocol, Alice cheating. Trusted: she holds her half of the ideal
// state plus Bob's announced trit and guesses his choice bit. Untrusted: she
// additionally controls the device, reducing to discrimination of Bob's three
// measure-and-resend channels.
CheatBound protocol4_alice_trusted(double tol = 1e-8);
CheatBound protocol4_alice_untrusted(double tol = 1e-8);

// Game protocol, Bob cheating: optimal first measurement against Alice's
// later test, with the second measurement absorbed into an acceptance
// projector. trusted pins Alice's reduced state to be maximally mixed.
// full = false exploits that the protocol measures the side registers
// immediately (block-diagonal, real variables); full = true solves the
// unreduced Hermitian problem on the whole space.
CheatBound protocol4_bob(bool trusted, bool full = false, double tol = 1e-8);

// Acceptance projector and block structure used by protocol4_bob; exposed for
// the reduction soundness checks.
struct BobCheatOperators {
  std::vector<Register> space;          // a, x0, y0, x1, y1, g
  Mat accept;                           // on the full space
  std::vector<Register> state_space;    // a, x0, y0, x1, y1
  // diagonal-block view: for classical (a, y0, y1, g), indices into the full
  // space of the 4 (x0, x1) levels, and the 4x4 acceptance sub-block
  std::vector<std::array<int, 4>> block_index;
  std::vector<Mat> block_accept;
};
BobCheatOperators bob_cheat_operators();

}  // namespace xot::dd
