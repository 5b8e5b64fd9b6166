#include "xot/magic_square.hpp"

#include <numeric>
#include <stdexcept>

namespace xot::ms {

namespace {

Vec ket2(cx c0, cx c1) {
  Vec v(2);
  v << c0, c1;
  return v;
}

Mat proj(const Vec& v) { return v * v.adjoint(); }

const double s = 1.0 / std::sqrt(2.0);

// single-qubit kets used by the table
const Vec K0 = ket2(1, 0);
const Vec K1 = ket2(0, 1);
const Vec KP = ket2(s, s);
const Vec KM = ket2(s, -s);
const Vec KPI = ket2(s, cx(0, s));
const Vec KMI = ket2(s, cx(0, -s));

Mat cell_bit0(int a, int b) {
  const Mat I2 = Mat::Identity(2, 2);
  switch (a * 3 + b) {
    case 0: return kron(proj(K0), I2);
    case 1: return kron(I2, proj(K0));
    case 2: return kron(proj(K0), proj(K0)) + kron(proj(K1), proj(K1));
    case 3: return kron(I2, proj(KP));
    case 4: return kron(proj(KP), I2);
    case 5: return kron(proj(KP), proj(KP)) + kron(proj(KM), proj(KM));
    case 6: return kron(proj(K1), proj(KP)) + kron(proj(K0), proj(KM));
    case 7: return kron(proj(KP), proj(K1)) + kron(proj(KM), proj(K0));
    case 8: return kron(proj(KPI), proj(KPI)) + kron(proj(KMI), proj(KMI));
    default: throw std::invalid_argument("cell index out of range");
  }
}

}  // namespace

Vec ideal_state() {
  Vec psi = Vec::Zero(16);
  for (int k = 0; k < 4; ++k) psi(k * 4 + k) = 0.5;
  return psi;
}

Mat pi_projector(int a, int b, int bit) {
  if (a < 0 || a > 2 || b < 0 || b > 2 || bit < 0 || bit > 1)
    throw std::invalid_argument("pi_projector index out of range");
  Mat p0 = cell_bit0(a, b);
  return bit == 0 ? p0 : Mat(Mat::Identity(4, 4) - p0);
}

Mat alice_measurement(int a, int x) {
  return pi_projector(a, 0, x >> 1) * pi_projector(a, 1, x & 1);
}

Mat bob_measurement(int b, int y) {
  return pi_projector(0, b, y >> 1) * pi_projector(1, b, y & 1);
}

MsStrategy ideal_strategy() {
  MsStrategy st;
  st.state = ideal_state();
  st.alice.resize(3);
  st.bob.resize(3);
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 4; ++x) st.alice[a][x] = alice_measurement(a, x);
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 4; ++y) st.bob[b][y] = bob_measurement(b, y);
  return st;
}

double win_probability(const MsStrategy& s) {
  double total = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      auto dist = output_distribution(s, a, b);
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          if (wins(a, b, x, y)) total += dist[x][y];
    }
  return total / 9.0;
}

std::array<std::array<double, 4>, 4> output_distribution(const MsStrategy& s, int a, int b) {
  std::array<std::array<double, 4>, 4> dist{};
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      const Mat op = kron(s.alice[a][x], s.bob[b][y]);
      dist[x][y] = std::real(cx(s.state.adjoint() * op * s.state));
    }
  return dist;
}

Rational classical_value() {
  // deterministic strategies: Alice picks x(a) for each row, Bob y(b) for each
  // column; 4^3 x 4^3 = 4096 pairs, count wins over the 9 input pairs
  int best = 0;
  for (int fa = 0; fa < 64; ++fa)
    for (int fb = 0; fb < 64; ++fb) {
      int wcount = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int x = (fa >> (2 * a)) & 3;
          const int y = (fb >> (2 * b)) & 3;
          if (wins(a, b, x, y)) ++wcount;
        }
      best = std::max(best, wcount);
    }
  const auto g = std::gcd(static_cast<std::int64_t>(best), static_cast<std::int64_t>(9));
  return Rational{best / g, 9 / g};
}

}  // namespace xot::ms
