#include "xot/protocols.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "xot/magic_square.hpp"
#include "xot/rng.hpp"

namespace xot::proto {

using nlohmann::json;

json Transcript::to_json() const {
  json j;
  j["protocol"] = protocol;
  j["seed"] = seed;
  j["branch"] = branch;
  json msgs = json::array();
  for (const auto& [label, value] : messages) msgs.push_back({label, value});
  j["messages"] = msgs;
  json out = json::object();
  for (const auto& [who, vals] : outputs) out[who] = vals;
  j["outputs"] = out;
  j["abort"] = abort;
  return j;
}

namespace {

std::string bits_to_string(std::initializer_list<int> bits) {
  std::string s;
  for (int b : bits) s.push_back(static_cast<char>('0' + b));
  return s;
}

// third output bit fixed by the parity each party must satisfy
std::array<int, 3> alice_trits(int x0, int x1) { return {x0, x1, x0 ^ x1}; }
std::array<int, 3> bob_trits(int y0, int y1) { return {y0, y1, y0 ^ y1 ^ 1}; }

Vec qutrit_pair_state(int b) {
  Vec v = Vec::Zero(9);
  const double r = 1.0 / std::sqrt(2.0);
  switch (b) {
    case 0:
      v(0 * 3 + 0) = r;
      v(2 * 3 + 2) = r;
      break;
    case 1:
      v(1 * 3 + 1) = r;
      v(2 * 3 + 2) = r;
      break;
    case 2:
      v(0 * 3 + 0) = r;
      v(1 * 3 + 1) = r;
      break;
    default:
      throw std::invalid_argument("qutrit_pair_state: b out of range");
  }
  return v;
}

Mat phase_unitary(int x0, int x1) {
  Mat u = Mat::Zero(3, 3);
  u(0, 0) = (x0 == 0) ? 1.0 : -1.0;
  u(1, 1) = (x1 == 0) ? 1.0 : -1.0;
  u(2, 2) = 1.0;
  return u;
}

// samples one (x, y) outcome pair of the perfect shared strategy at inputs (a, b)
std::pair<int, int> sample_game_outcomes(const ms::MsStrategy& s, int a, int b, Rng& rng) {
  auto dist = ms::output_distribution(s, a, b);
  double u = rng.uniform();
  double acc = 0.0;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      acc += dist[x][y];
      if (u < acc) return {x, y};
    }
  }
  return {3, 3};
}

void append_protocol1_exchange(Transcript& t, Rng& alice, Rng& bob) {
  int x0 = static_cast<int>(alice.randint(2));
  int x1 = static_cast<int>(alice.randint(2));
  int b = static_cast<int>(bob.randint(3));
  t.messages.emplace_back("alice.x", bits_to_string({x0, x1}));
  t.outputs["alice"] = {x0, x1};
  t.outputs["bob"] = {b, alice_trits(x0, x1)[b]};
}

void append_protocol2_exchange(Transcript& t, Rng& alice, Rng& bob) {
  int b = static_cast<int>(bob.randint(3));
  int x0 = static_cast<int>(alice.randint(2));
  int x1 = static_cast<int>(alice.randint(2));
  int c = alice_trits(x0, x1)[b];
  t.messages.emplace_back("bob.b", std::to_string(b));
  t.messages.emplace_back("alice.xb", std::to_string(c));
  t.outputs["alice"] = {x0, x1};
  t.outputs["bob"] = {b, c};
}

void append_protocol4_exchange(Transcript& t, Rng& alice, Rng& bob, Rng& device) {
  ms::MsStrategy ideal = ms::ideal_strategy();
  int b = static_cast<int>(bob.randint(3));

  // Bob measures first: sample his outcome from the a-independent marginal
  auto dist = ms::output_distribution(ideal, 0, b);
  std::array<double, 4> marg{};
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) marg[y] += dist[x][y];
  double u = device.uniform();
  int y = 3;
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += marg[k];
    if (u < acc) {
      y = k;
      break;
    }
  }
  auto yt = bob_trits(y >> 1, y & 1);
  t.messages.emplace_back("bob.y", bits_to_string({yt[0], yt[1], yt[2]}));

  int a = static_cast<int>(alice.randint(3));
  t.messages.emplace_back("alice.a", std::to_string(a));

  auto dist_a = ms::output_distribution(ideal, a, b);
  double u2 = device.uniform();
  int x = 3;
  double acc2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc2 += dist_a[k][y] / marg[y];
    if (u2 < acc2) {
      x = k;
      break;
    }
  }
  auto xt = alice_trits(x >> 1, x & 1);

  // Alice aborts when her all-zero string is inconsistent with Bob's report
  t.abort = (xt[0] == 0 && xt[1] == 0 && xt[2] == 0 && yt[a] == 1);
  t.outputs["alice"] = {xt[0], xt[1]};
  t.outputs["bob"] = {b, yt[a]};
}

}  // namespace

Transcript run_protocol1(uint64_t seed) {
  Transcript t;
  t.protocol = 1;
  t.seed = seed;
  Rng alice(seed, kStreamAlice);
  Rng bob(seed, kStreamBob);
  append_protocol1_exchange(t, alice, bob);
  return t;
}

Transcript run_protocol2(uint64_t seed) {
  Transcript t;
  t.protocol = 2;
  t.seed = seed;
  Rng alice(seed, kStreamAlice);
  Rng bob(seed, kStreamBob);
  append_protocol2_exchange(t, alice, bob);
  return t;
}

Transcript run_protocol3_honest(int b, int x0, int x1) {
  Transcript t;
  t.protocol = 3;
  t.seed = 0;
  Vec psi = qutrit_pair_state(b);
  Mat u = kron(phase_unitary(x0, x1), Mat::Identity(3, 3));
  Vec after = u * psi;
  Vec target = qutrit_pair_state(b);
  double p_match = std::norm(target.dot(after));
  int c = (p_match > 0.5) ? 0 : 1;
  t.messages.emplace_back("bob->alice", "X");
  t.messages.emplace_back("alice->bob", "X");
  t.outputs["alice"] = {x0, x1};
  t.outputs["bob"] = {b, c};
  return t;
}

std::pair<double, double> protocol3_untrusted_cheats() {
  // cheating Alice: she makes Bob's device emit |b>|0>, keeps the sent register
  // and reads b from it with a computational measurement
  double p_alice = 0.0;
  for (int b = 0; b < 3; ++b) {
    Vec prep = kron(basis_ket(3, b), basis_ket(3, 0));
    Mat read_b = kron(Mat(basis_ket(3, b) * basis_ket(3, b).adjoint()), Mat::Identity(3, 3));
    p_alice += (prep.adjoint() * read_b * prep)(0).real() / 3.0;
  }

  // cheating Bob: he makes Alice's device apply a Pauli dense-coding unitary
  // (trivial on |2>); starting from the b = 2 state the four results form an
  // orthonormal family, so a projective measurement identifies (x0, x1)
  std::array<Mat, 4> paulis;
  for (auto& p : paulis) p = Mat::Zero(3, 3);
  paulis[0](0, 0) = 1.0;
  paulis[0](1, 1) = 1.0;  // identity on the qubit block
  paulis[1](0, 1) = 1.0;
  paulis[1](1, 0) = 1.0;  // sigma_x
  paulis[2](0, 1) = cx(0.0, -1.0);
  paulis[2](1, 0) = cx(0.0, 1.0);  // sigma_y
  paulis[3](0, 0) = 1.0;
  paulis[3](1, 1) = -1.0;  // sigma_z
  for (auto& p : paulis) p(2, 2) = 1.0;

  Vec start = qutrit_pair_state(2);
  std::array<Vec, 4> ends;
  for (int x = 0; x < 4; ++x) ends[x] = kron(paulis[x], Mat::Identity(3, 3)) * start;
  double p_bob = 0.0;
  for (int x = 0; x < 4; ++x) {
    Mat guess = ends[x] * ends[x].adjoint();
    p_bob += (ends[x].adjoint() * guess * ends[x])(0).real() / 4.0;
    for (int w = 0; w < x; ++w) {
      if (std::abs(ends[x].dot(ends[w])) > kStructTol) {
        throw std::runtime_error("dense-coding states are not orthogonal");
      }
    }
  }
  return {p_alice, p_bob};
}

Transcript run_protocol4_honest(uint64_t seed) {
  Transcript t;
  t.protocol = 4;
  t.seed = seed;
  Rng alice(seed, kStreamAlice);
  Rng bob(seed, kStreamBob);
  Rng device(seed, kStreamDevice);
  append_protocol4_exchange(t, alice, bob, device);
  return t;
}

std::pair<double, double> protocol4_measurement_cheats() {
  // cheating Alice: Bob's device reports the indicator string of his input b,
  // which satisfies his parity and decodes b uniquely; she skips her own test
  std::array<std::array<int, 3>, 3> reports{};
  for (int b = 0; b < 3; ++b) {
    for (int k = 0; k < 3; ++k) reports[b][k] = (k == b) ? 1 : 0;
  }
  double p_alice = 1.0;
  for (int b = 0; b < 3; ++b) {
    if ((reports[b][0] ^ reports[b][1] ^ reports[b][2]) != 1) p_alice = 0.0;
    for (int w = 0; w < b; ++w) {
      if (reports[b] == reports[w]) p_alice = 0.0;  // decoding must be unambiguous
    }
  }

  // cheating Bob: Alice's device always outputs (x0, x1) = (0, 1); her abort
  // test never fires and Bob predicts both bits with certainty
  double p_bob = 1.0;
  const std::array<int, 3> forced = alice_trits(0, 1);
  if (forced[0] == 0 && forced[1] == 0 && forced[2] == 0) p_bob = 0.0;
  return {p_alice, p_bob};
}

Transcript run_protocol5_honest(const Protocol5Params& params, uint64_t seed) {
  Transcript t;
  t.protocol = 5;
  t.seed = seed;
  Rng alice(seed, kStreamAlice);
  Rng bob(seed, kStreamBob);
  Rng device(seed, kStreamDevice);

  ms::MsStrategy ideal = ms::ideal_strategy();
  int ca = alice.bernoulli(params.qa) ? 1 : 0;
  t.messages.emplace_back("alice.cA", std::to_string(ca));
  if (ca == 1) {
    t.branch = "test-by-alice";
    t.messages.emplace_back("bob->alice", "box");
    int ta = static_cast<int>(alice.randint(3));
    int tb = static_cast<int>(alice.randint(3));
    auto [x, y] = sample_game_outcomes(ideal, ta, tb, device);
    auto xt = alice_trits(x >> 1, x & 1);
    auto yt = bob_trits(y >> 1, y & 1);
    t.messages.emplace_back("alice.test", bits_to_string({xt[0], xt[1], xt[2]}) + "/" +
                                              bits_to_string({yt[0], yt[1], yt[2]}));
    if (xt[tb] != yt[ta]) {
      t.abort = true;
      return t;
    }
    append_protocol1_exchange(t, alice, bob);
    return t;
  }

  int cb = bob.bernoulli(params.qb) ? 1 : 0;
  t.messages.emplace_back("bob.cB", std::to_string(cb));
  if (cb == 1) {
    t.branch = "test-by-bob";
    t.messages.emplace_back("alice->bob", "box");
    int ta = static_cast<int>(bob.randint(3));
    int tb = static_cast<int>(bob.randint(3));
    auto [x, y] = sample_game_outcomes(ideal, ta, tb, device);
    auto xt = alice_trits(x >> 1, x & 1);
    auto yt = bob_trits(y >> 1, y & 1);
    t.messages.emplace_back("bob.test", bits_to_string({xt[0], xt[1], xt[2]}) + "/" +
                                            bits_to_string({yt[0], yt[1], yt[2]}));
    if (xt[tb] != yt[ta]) {
      t.abort = true;
      return t;
    }
    append_protocol2_exchange(t, alice, bob);
    return t;
  }

  t.branch = "xot";
  append_protocol4_exchange(t, alice, bob, device);
  return t;
}

}  // namespace xot::proto
