#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "xot/protocols.hpp"

using namespace xot;
using namespace xot::proto;

namespace {

int third(int b0, int b1, int parity) { return b0 ^ b1 ^ parity; }

int alice_bit(const std::vector<int>& x, int b) {
  std::array<int, 3> t{x[0], x[1], third(x[0], x[1], 0)};
  return t[b];
}

}  // namespace

TEST_CASE("protocol 1 sends both bits and bob keeps one") {
  std::array<int, 4> x_counts{};
  std::array<int, 3> b_counts{};
  const int n = 3000;
  for (int s = 0; s < n; ++s) {
    Transcript t = run_protocol1(static_cast<uint64_t>(s));
    CHECK(t.protocol == 1);
    CHECK_FALSE(t.abort);
    REQUIRE(t.messages.size() == 1);
    CHECK(t.messages[0].first == "alice.x");
    const auto& x = t.outputs.at("alice");
    const auto& bc = t.outputs.at("bob");
    REQUIRE(x.size() == 2);
    REQUIRE(bc.size() == 2);
    // the message carries exactly alice's output bits
    CHECK(t.messages[0].second ==
          std::string(1, static_cast<char>('0' + x[0])) + static_cast<char>('0' + x[1]));
    CHECK(bc[1] == alice_bit(x, bc[0]));
    x_counts[2 * x[0] + x[1]] += 1;
    b_counts[bc[0]] += 1;
  }
  // loose uniformity: every cell within 5 sigma of its mean
  for (int k = 0; k < 4; ++k) CHECK(std::abs(x_counts[k] - n / 4.0) < 5.0 * std::sqrt(n * 0.25 * 0.75));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(b_counts[k] - n / 3.0) < 5.0 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
}

TEST_CASE("protocol 2 sends only the requested bit") {
  for (int s = 0; s < 2000; ++s) {
    Transcript t = run_protocol2(static_cast<uint64_t>(s));
    CHECK(t.protocol == 2);
    CHECK_FALSE(t.abort);
    REQUIRE(t.messages.size() == 2);
    CHECK(t.messages[0].first == "bob.b");
    CHECK(t.messages[1].first == "alice.xb");
    const auto& x = t.outputs.at("alice");
    const auto& bc = t.outputs.at("bob");
    CHECK(t.messages[0].second == std::to_string(bc[0]));
    CHECK(t.messages[1].second == std::to_string(bc[1]));
    CHECK(bc[1] == alice_bit(x, bc[0]));
  }
}

TEST_CASE("qutrit protocol is complete for every input choice") {
  for (int b = 0; b < 3; ++b) {
    for (int x0 = 0; x0 < 2; ++x0) {
      for (int x1 = 0; x1 < 2; ++x1) {
        Transcript t = run_protocol3_honest(b, x0, x1);
        CHECK(t.protocol == 3);
        CHECK_FALSE(t.abort);
        const auto& x = t.outputs.at("alice");
        const auto& bc = t.outputs.at("bob");
        CHECK(x[0] == x0);
        CHECK(x[1] == x1);
        CHECK(bc[0] == b);
        CHECK(bc[1] == alice_bit(x, b));
      }
    }
  }
}

TEST_CASE("qutrit protocol device cheats succeed with certainty") {
  auto [pa, pb] = protocol3_untrusted_cheats();
  CHECK(pa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pb == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("game-based protocol never aborts honestly and is correct") {
  std::array<int, 3> b_counts{};
  std::array<int, 4> y_counts{};
  const int n = 3000;
  for (int s = 0; s < n; ++s) {
    Transcript t = run_protocol4_honest(static_cast<uint64_t>(s));
    CHECK(t.protocol == 4);
    REQUIRE_FALSE(t.abort);
    REQUIRE(t.messages.size() == 2);
    CHECK(t.messages[0].first == "bob.y");
    CHECK(t.messages[1].first == "alice.a");
    const std::string& ys = t.messages[0].second;
    REQUIRE(ys.size() == 3);
    int y0 = ys[0] - '0';
    int y1 = ys[1] - '0';
    int y2 = ys[2] - '0';
    CHECK((y0 ^ y1 ^ y2) == 1);  // bob's parity constraint
    const auto& x = t.outputs.at("alice");
    const auto& bc = t.outputs.at("bob");
    CHECK(bc[1] == alice_bit(x, bc[0]));  // perfect strategy: the kept bit matches
    b_counts[bc[0]] += 1;
    y_counts[2 * y0 + y1] += 1;
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(b_counts[k] - n / 3.0) < 5.0 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
  for (int k = 0; k < 4; ++k) CHECK(std::abs(y_counts[k] - n / 4.0) < 5.0 * std::sqrt(n * 0.25 * 0.75));
}

TEST_CASE("game-based protocol measurement cheats are perfect") {
  auto [pa, pb] = protocol4_measurement_cheats();
  CHECK(pa == 1.0);
  CHECK(pb == 1.0);
}

TEST_CASE("composed protocol picks branches at the configured rates") {
  Protocol5Params params;  // defaults 0.6, 0.6
  int n_test_a = 0;
  int n_test_b = 0;
  int n_xot = 0;
  const int n = 4000;
  for (int s = 0; s < n; ++s) {
    Transcript t = run_protocol5_honest(params, static_cast<uint64_t>(s));
    CHECK(t.protocol == 5);
    REQUIRE_FALSE(t.abort);  // the perfect strategy passes every check
    const auto& x = t.outputs.at("alice");
    const auto& bc = t.outputs.at("bob");
    CHECK(bc[1] == alice_bit(x, bc[0]));
    REQUIRE_FALSE(t.messages.empty());
    CHECK(t.messages[0].first == "alice.cA");
    if (t.branch == "test-by-alice") {
      n_test_a += 1;
      CHECK(t.messages[0].second == "1");
    } else if (t.branch == "test-by-bob") {
      n_test_b += 1;
    } else {
      CHECK(t.branch == "xot");
      n_xot += 1;
      bool saw_y = false;
      for (const auto& m : t.messages) saw_y |= (m.first == "bob.y");
      CHECK(saw_y);
    }
  }
  auto within = [n](int count, double p) {
    return std::abs(count - n * p) < 5.0 * std::sqrt(n * p * (1 - p));
  };
  CHECK(within(n_test_a, 0.6));
  CHECK(within(n_test_b, 0.4 * 0.6));
  CHECK(within(n_xot, 0.4 * 0.4));
}

TEST_CASE("transcripts serialize deterministically") {
  Protocol5Params params;
  Transcript t1 = run_protocol5_honest(params, 42);
  Transcript t2 = run_protocol5_honest(params, 42);
  CHECK(t1.to_json().dump() == t2.to_json().dump());

  nlohmann::json j = t1.to_json();
  for (const char* key : {"protocol", "seed", "branch", "messages", "outputs", "abort"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["messages"].is_array());
  for (const auto& m : j["messages"]) {
    REQUIRE(m.is_array());
    REQUIRE(m.size() == 2);
  }
  nlohmann::json round = nlohmann::json::parse(j.dump());
  CHECK(round == j);

  // distinct seeds give distinct transcripts somewhere in a small window
  std::set<std::string> dumps;
  for (uint64_t s = 0; s < 16; ++s) dumps.insert(run_protocol4_honest(s).to_json().dump());
  CHECK(dumps.size() > 8);
}
