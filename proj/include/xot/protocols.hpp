#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xot/linalg.hpp"

namespace xot::proto {

// rng stream ids, fixed so transcripts are reproducible role by role
inline constexpr uint64_t kStreamAlice = 0;
inline constexpr uint64_t kStreamBob = 1;
inline constexpr uint64_t kStreamDevice = 2;

struct Transcript {
  int protocol = 0;
  uint64_t seed = 0;
  std::string branch;  // empty when the protocol has no branching
  std::vector<std::pair<std::string, std::string>> messages;
  std::map<std::string, std::vector<int>> outputs;  // "alice" -> {x0,x1}, "bob" -> {b,c}
  bool abort = false;

  nlohmann::json to_json() const;
};

struct Protocol5Params {
  double qa = 0.6;
  double qb = 0.6;
};

Transcript run_protocol1(uint64_t seed);
Transcript run_protocol2(uint64_t seed);

// deterministic simulation of the qutrit protocol for one (b, x0, x1) choice;
// the recorded c always equals x_b
Transcript run_protocol3_honest(int b, int x0, int x1);

// perfect cheats with untrusted devices: (alice prep-control, bob superdense)
std::pair<double, double> protocol3_untrusted_cheats();

Transcript run_protocol4_honest(uint64_t seed);

// perfect cheats when a party controls the other's measurement device
std::pair<double, double> protocol4_measurement_cheats();

Transcript run_protocol5_honest(const Protocol5Params& params, uint64_t seed);

}  // namespace xot::proto
