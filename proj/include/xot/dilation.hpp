#pragma once

#include <vector>

#include "json.hpp"
#include "xot/linalg.hpp"

namespace xot::dilation {

// Two layers of isometries sharing spaces: every first[j] has the same domain,
// and every second[k]'s domain is the codomain of first.back().
struct IsometryFamily {
  std::vector<Mat> first;
  std::vector<Mat> second;
};

// Offsets of the direct-sum space L = H0 + H1 + ... + Hn + K1 + ... + Km,
// where H0 is the common domain, Hj the codomain of first[j-1], and Kk the
// codomain of second[k-1].
struct Embedding {
  std::vector<int> h_offset, h_dim;
  std::vector<int> k_offset, k_dim;
  int total = 0;
};

Embedding layout(const IsometryFamily& fam);

// Embed a vector living on H0 (or on Hn for the second layer's domain) into L.
Vec embed_state(const Embedding& e, const Vec& v, int subspace = 0);

// Block unitaries on L extending the isometries: first[j] agrees with
// fam.first[j] on H0, second[k] agrees with fam.second[k] on Hn. Throws if any
// input fails V^dag V = 1 within 1e-9.
struct SznagyUnitaries {
  Embedding space;
  std::vector<Mat> first, second;
};

SznagyUnitaries sznagy_unitaries(const IsometryFamily& fam);

// Stack a Kraus family into the isometry that records the outcome in an
// ancilla: |nu> -> sum_y |y> (x) K_y |nu>. Throws unless sum K^dag K = 1
// within 1e-9.
Mat recording_isometry(const std::vector<Mat>& kraus);

// One layer of measurements with a common domain, turned projective on L.
struct SingleDilation {
  SznagyUnitaries u;
  std::vector<std::vector<Mat>> proj;  // [family][outcome]
};

SingleDilation dilate_single_stage(const std::vector<std::vector<Mat>>& families);

// The receiver's measurement structure: alternative test measurements, a
// no-input stage applied first in the untested branch, then guess measurements
// applied sequentially after the stage.
struct SequentialKraus {
  std::vector<std::vector<Mat>> test;
  std::vector<Mat> stage;
  std::vector<std::vector<Mat>> guess;
};

// Projective families on L. Outcome 0 of each family absorbs the identity on
// the complement of the relevant codomain so the family sums to 1 on L. The
// guess projectors are conjugated through both the stage and guess unitaries,
// which makes guess[m][g] * stage[y] collapse to a single sandwich.
struct SequentialDilation {
  SznagyUnitaries u;
  std::vector<std::vector<Mat>> test;
  std::vector<Mat> stage;
  std::vector<std::vector<Mat>> guess;
};

SequentialDilation dilate_to_pvm(const SequentialKraus& k);

struct PreservationReport {
  int states = 0;
  int comparisons = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
};

// Compare outcome norms of the original Kraus chains against the dilated
// projector chains, with the sender measuring on the first factor and the
// receiver on the second. Checks every (x, a, y, b) test combination and every
// (x, a, g, m, y) sequential combination for each supplied state.
PreservationReport verify_probability_preservation(
    const std::vector<std::vector<Mat>>& sender, const SequentialKraus& receiver,
    const SingleDilation& sender_d, const SequentialDilation& receiver_d,
    const std::vector<Vec>& states, double threshold = 1e-9);

}  // namespace xot::dilation
