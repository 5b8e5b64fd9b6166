#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xot/moment.hpp"
#include "xot/npa.hpp"

// Device-independent cheating bounds for the game-certified protocol. Each
// bound is the certified optimum of a moment relaxation in which the honest
// party's box supplies one party's letters while the cheating party's box,
// carrying both its test-time and protocol-time measurement layers, supplies
// the other.
namespace xot::di {

enum class Party { alice, bob };
std::string party_name(Party party);

// Letters (top outcomes are never letters; objectives rewrite them through
// completeness):
//   cheating Alice  (0,0,a,x) test answers      a in 0..2, x in 0..2 of 4
//                   (0,1,y,g) choice-bit guess  y in 0..3 message, g in 0..1 of 3
//                   (1,0,b,y) honest box        b in 0..2, y in 0..2 of 4
//   cheating Bob    (0,0,a,x) honest box        a in 0..2, x in 0..2 of 4
//                   (1,0,b,y) test answers      b in 0..2, y in 0..2 of 4
//                   (1,1,0,y) message sampler   no input, y in 0..2 of 4
//                   (1,2,m,g) answer guess      m in 0..2 relayed input, g in 0..2 of 4
//
// alice_words: local level 1, 180 words. bob_words: the sampler runs before
// the guess, so the receiver needs second-order blocks
// ({1} u {M}) o ({1} u {test} u {guess} u {sampler} u {guess sampler}),
// 490 words; reduced = true drops the 81 {M} o {guess} products (409 words
// remain), still a sound relaxation, faster, slightly looser.
std::vector<npa::Word> alice_words();
std::vector<npa::Word> bob_words(bool reduced = false);

// probability of passing the test branch / of guessing in the protocol branch
npa::Polynomial alice_test_objective();
npa::Polynomial alice_prot_objective();
npa::Polynomial bob_test_objective();
npa::Polynomial bob_prot_objective();

// message y is consistent with the sender holding (x, a): the receiver's
// derived trit appears among the sender's three
bool message_compatible(int x, int a, int y);

struct DiObjective {
  Party party = Party::alice;
  double q = 0.6;  // probability that the test branch is called
  npa::Polynomial test;
  npa::Polynomial prot;
  npa::Polynomial combined() const;  // q * test + (1 - q) * prot
};
DiObjective objective(Party party, double q);

struct DiBound {
  Party party = Party::alice;
  double q = 0.0;             // weight of the test part; meaningless for gapped solves
  std::optional<double> eps;  // gapped solves: test >= 1 - eps was enforced
  double bound = 0.0;         // certified upper bound on the cheating probability
  int nwords = 0;
  bool reduced = false;
  moment::MomentSolution solution;
  nlohmann::json to_json() const;
};

struct DiOptions {
  bool reduced = false;      // Bob only; ignored for Alice
  moment::AdmmOptions admm;  // start from default_admm(party) and adjust
};

// solver settings sized so the certified bound settles to five decimals
// within the documented runtimes (Alice minutes, Bob a few hours)
moment::AdmmOptions default_admm(Party party);

DiBound cheat_bound(Party party, double q, const DiOptions& opt);
DiBound cheat_bound(Party party, double q);  // default_admm settings

// both parties at branch weights (qa feeds Bob's bound, qb Alice's)
std::pair<DiBound, DiBound> protocol5_bounds(double qa, double qb,
                                             const DiOptions& alice_opt,
                                             const DiOptions& bob_opt);
std::pair<DiBound, DiBound> protocol5_bounds(double qa, double qb);

// maximize the protocol part subject to test >= 1 - eps; eps = 1 makes the
// gate vacuous. Throws std::invalid_argument outside (0, 1].
DiBound gapped_bound(Party party, double eps, const DiOptions& opt);
DiBound gapped_bound(Party party, double eps);

// overall bound from a gapped protocol bound: 1 - q * eps whenever
// prot_bound <= 1 - eps / (1 - q), otherwise not applicable
struct GappedCombine {
  bool ok = false;
  double bound = 1.0;
  std::string reason;  // set when the hypothesis fails
};
GappedCombine gapped_combine(double q, double eps, double prot_bound);

struct Sweep {
  Party party = Party::alice;
  double step = 0.1;
  std::vector<DiBound> rows;  // q = step, 2 step, ... < 1
  int best = 0;               // index of the smallest bound
  std::string table() const;
  nlohmann::json to_json() const;
};
// grid points run concurrently, at most thread_cap() at a time
Sweep q_sweep(Party party, double step, const DiOptions& opt);

// DIXOT_THREADS when set, hardware concurrency otherwise, at least 1
int thread_cap();

// aligned text table, one row per bound
std::string bounds_table(const std::vector<DiBound>& bounds);

}  // namespace xot::di
