#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "xot/linalg.hpp"
#include "xot/magic_square.hpp"

namespace xot::rigidity {

// Signed sums of the square's measurement projectors. Entries 0..1 act on the
// first party's qubit pair, entries 2..3 on the second party's. Each operator
// is Hermitian and unitary.
struct XzwSet {
  std::array<Mat, 4> x, z, w;
};

XzwSet build_xzw(const ms::MsStrategy& s);

// Lift a single-party 4x4 operator to the full space, identity elsewhere.
// total_dim must be a multiple of 16; any extra factor is an environment
// appended after the two qubit pairs (useful for purified mixed states).
Mat lift(const Mat& op, int party, int total_dim);

struct RelationCheck {
  std::string relation;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<RelationCheck> checks;
  bool all_pass = true;

  const RelationCheck& find(const std::string& relation) const;
  nlohmann::json to_json() const;
};

// Expectation values and state identities that perfect play satisfies exactly:
// nine three-or-four operator correlations equal to +-1, six vector
// identities, and one anticommutator annihilating the state.
Report verify_ideal_relations(const XzwSet& set, const Vec& state,
                              double tol = 1e-10);

// Premises of the parallel self-testing lemma: Hermiticity, unitarity,
// within-party commutation as operators, and the state-norm conditions at
// slack delta. The lemma pairs partners across parties by matching index, so
// the second party's x and z roles are swapped relative to XzwSet labels
// before checking (with the set built from the ideal strategy the literal
// labels give |(x1 - z3)|s>| = sqrt 2, while the swapped ones give 0).
Report mckague_premises(const XzwSet& set, const Vec& state, double delta);

}  // namespace xot::rigidity
