#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "xot/linalg.hpp"

namespace xot::ms {

// Outcomes are two bits packed as x = 2*x0 + x1; the third trit is derived:
// Alice rows have even parity, Bob columns odd parity.
inline int third_bit_x(int x0, int x1) { return x0 ^ x1; }
inline int third_bit_y(int y0, int y1) { return y0 ^ y1 ^ 1; }

inline int trit_x(int x, int k) {
  const int x0 = x >> 1, x1 = x & 1;
  return k == 0 ? x0 : (k == 1 ? x1 : third_bit_x(x0, x1));
}
inline int trit_y(int y, int k) {
  const int y0 = y >> 1, y1 = y & 1;
  return k == 0 ? y0 : (k == 1 ? y1 : third_bit_y(y0, y1));
}

// win condition: the shared cell agrees, x_b == y_a
inline bool wins(int a, int b, int x, int y) { return trit_x(x, b) == trit_y(y, a); }

// Shared state on registers X0 X1 Y0 Y1 (Alice's pair first); amplitude 1/2 on
// |k>_{X0X1}|k>_{Y0Y1}.
Vec ideal_state();

// 2-qubit projector for cell (a,b) of the square and the given outcome bit.
Mat pi_projector(int a, int b, int bit);

// rank-1 4-outcome projective measurements built from commuting cell projectors
Mat alice_measurement(int a, int x);
Mat bob_measurement(int b, int y);

struct MsStrategy {
  Vec state;  // on (Alice dim) x (Bob dim), Alice factor first
  std::vector<std::array<Mat, 4>> alice;  // [a][x]
  std::vector<std::array<Mat, 4>> bob;    // [b][y]
};

MsStrategy ideal_strategy();

double win_probability(const MsStrategy& s);

// conditional distribution over (x, y) given inputs (a, b)
std::array<std::array<double, 4>, 4> output_distribution(const MsStrategy& s, int a, int b);

struct Rational {
  std::int64_t num = 0, den = 1;
};

// exact optimum over deterministic classical strategies (shared randomness
// cannot improve it)
Rational classical_value();

}  // namespace xot::ms
