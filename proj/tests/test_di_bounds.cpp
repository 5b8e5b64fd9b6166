#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

#include "xot/di_bounds.hpp"
#include "xot/magic_square.hpp"
#include "xot/npa.hpp"
#include "xot/rng.hpp"

using namespace xot;
using npa::Letter;
using npa::Operand;
using npa::Polynomial;
using npa::Word;

namespace {

double gaussian(Rng& rng) {
  double u1 = rng.uniform(), u2 = rng.uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Mat random_orthogonal(Rng& rng, int d) {
  Mat g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = cx(gaussian(rng), 0.0);
  return Eigen::HouseholderQR<Mat>(g).householderQ();
}

// explicit two-party model over the cheating alphabets; all outcomes stored,
// including the top ones the library rewrites away
struct DiModel {
  int d0 = 0, d1 = 0;
  std::map<std::array<int, 4>, Mat> proj;  // local projectors per letter
  Vec psi;

  Mat letter_mat(const Letter& l) const {
    const Mat& p = proj.at({l.party, l.fam, l.input, l.outcome});
    return l.party == 0 ? kron(p, Mat::Identity(d1, d1)) : kron(Mat::Identity(d0, d0), p);
  }
  double moment(const Word& w) const {
    Mat m = Mat::Identity(d0 * d1, d0 * d1);
    for (const Letter& l : w) m = m * letter_mat(l);
    return ((psi.adjoint() * m * psi)(0)).real();
  }
  double eval(const Polynomial& p) const {
    double v = p.constant;
    for (const auto& [w, c] : p.coeffs) v += c * moment(w);
    return v;
  }
};

void add_partition(DiModel& m, Rng& rng, int party, int fam, int input, int d,
                   const std::vector<int>& ranks) {
  Mat q = random_orthogonal(rng, d);
  int col = 0;
  for (size_t o = 0; o < ranks.size(); ++o) {
    Mat p = Mat::Zero(d, d);
    for (int r = 0; r < ranks[o]; ++r, ++col) p += q.col(col) * q.col(col).adjoint();
    m.proj[{party, fam, input, static_cast<int>(o)}] = p;
  }
}

void set_state(DiModel& m, Rng& rng) {
  Vec psi(m.d0 * m.d1);
  for (int i = 0; i < psi.size(); ++i) psi(i) = cx(gaussian(rng), 0.0);
  m.psi = psi / psi.norm();
}

DiModel random_alice_model(Rng& rng) {
  DiModel m;
  m.d0 = 4;
  m.d1 = 4;
  for (int a = 0; a < 3; ++a) add_partition(m, rng, 0, 0, a, 4, {1, 1, 1, 1});
  for (int y = 0; y < 4; ++y) add_partition(m, rng, 0, 1, y, 4, {2, 1, 1});
  for (int b = 0; b < 3; ++b) add_partition(m, rng, 1, 0, b, 4, {1, 1, 1, 1});
  set_state(m, rng);
  return m;
}

DiModel random_bob_model(Rng& rng) {
  DiModel m;
  m.d0 = 4;
  m.d1 = 4;
  for (int a = 0; a < 3; ++a) add_partition(m, rng, 0, 0, a, 4, {1, 1, 1, 1});
  for (int b = 0; b < 3; ++b) add_partition(m, rng, 1, 0, b, 4, {1, 1, 1, 1});
  add_partition(m, rng, 1, 1, 0, 4, {1, 1, 1, 1});
  for (int g = 0; g < 3; ++g) add_partition(m, rng, 1, 2, g, 4, {1, 1, 1, 1});
  set_state(m, rng);
  return m;
}

// honest boxes for the cheating-Bob alphabet: ideal game boxes, the message
// sampled with the first column measurement, the guess recovering the learned
// trit and a fixed second bit
DiModel honest_bob_model() {
  const auto s = ms::ideal_strategy();
  DiModel m;
  m.d0 = 4;
  m.d1 = 4;
  m.psi = s.state;
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 4; ++x) m.proj[{0, 0, a, x}] = s.alice[a][x];
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 4; ++y) m.proj[{1, 0, b, y}] = s.bob[b][y];
  for (int y = 0; y < 4; ++y) m.proj[{1, 1, 0, y}] = s.bob[0][y];
  for (int g = 0; g < 4; ++g)
    for (int a = 0; a < 3; ++a) m.proj[{1, 2, a, g}] = Mat::Zero(4, 4);
  for (int a = 0; a < 3; ++a)
    for (int y = 0; y < 4; ++y) m.proj[{1, 2, a, 2 * ms::trit_y(y, a)}] += s.bob[0][y];
  return m;
}

// honest boxes for the cheating-Alice alphabet with a deterministic guess of
// the choice trit from the message alone
DiModel honest_alice_model() {
  const auto s = ms::ideal_strategy();
  DiModel m;
  m.d0 = 4;
  m.d1 = 4;
  m.psi = s.state;
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 4; ++x) m.proj[{0, 0, a, x}] = s.alice[a][x];
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 4; ++y) m.proj[{1, 0, b, y}] = s.bob[b][y];
  for (int y = 0; y < 4; ++y)
    for (int g = 0; g < 3; ++g)
      m.proj[{0, 1, y, g}] = g == y % 3 ? Mat(Mat::Identity(4, 4)) : Mat(Mat::Zero(4, 4));
  return m;
}

// objectives before the top outcomes are rewritten through completeness
Polynomial pre_alice_test() {
  Polynomial p;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          if (ms::wins(a, b, x, y))
            p.add(Operand::projector({0, 0, a, x}) * Operand::projector({1, 0, b, y}), 1.0 / 9.0);
  return p;
}

Polynomial pre_alice_prot() {
  Polynomial p;
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 4; ++y)
      p.add(Operand::projector({0, 1, y, b}) * Operand::projector({1, 0, b, y}), 1.0 / 3.0);
  return p;
}

Polynomial pre_bob_test() {
  Polynomial p;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          if (ms::wins(a, b, x, y))
            p.add(Operand::projector({0, 0, a, x}) * Operand::projector({1, 0, b, y}), 1.0 / 9.0);
  return p;
}

Polynomial pre_bob_prot() {
  Polynomial p;
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        if (di::message_compatible(x, a, y))
          p.add(Operand::projector({0, 0, a, x}) * Operand::projector({1, 1, 0, y}) *
                    Operand::projector({1, 2, a, x}) * Operand::projector({1, 1, 0, y}),
                1.0 / 3.0);
  return p;
}

double coeff_sum(const Polynomial& p) {
  double s = 0.0;
  for (const auto& [w, c] : p.coeffs) s += c;
  return s;
}

double max_coeff_diff(const Polynomial& a, const Polynomial& b) {
  double d = std::abs(a.constant - b.constant);
  std::set<Word> keys;
  for (const auto& [w, c] : a.coeffs) keys.insert(w);
  for (const auto& [w, c] : b.coeffs) keys.insert(w);
  for (const Word& w : keys) {
    const auto ia = a.coeffs.find(w), ib = b.coeffs.find(w);
    const double ca = ia == a.coeffs.end() ? 0.0 : ia->second;
    const double cb = ib == b.coeffs.end() ? 0.0 : ib->second;
    d = std::max(d, std::abs(ca - cb));
  }
  return d;
}

}  // namespace

TEST_CASE("word sets have the documented sizes and canonical members") {
  const auto aw = di::alice_words();
  const auto bw = di::bob_words(false);
  const auto rw = di::bob_words(true);
  CHECK(aw.size() == 180);
  CHECK(bw.size() == 490);
  CHECK(rw.size() == 409);
  CHECK(aw[0].empty());
  CHECK(bw[0].empty());
  for (const auto& words : {aw, bw, rw}) {
    std::set<Word> seen;
    for (const Word& w : words) {
      auto r = npa::reduce(w);
      REQUIRE(r.has_value());
      CHECK(*r == w);
      seen.insert(w);
    }
    CHECK(seen.size() == words.size());
  }
  const std::set<Word> full(bw.begin(), bw.end());
  for (const Word& w : rw) CHECK(full.count(w) == 1);
  // skeletons build, so the sets are valid index sets
  CHECK(npa::build_skeleton(aw).classes.size() > 180);
  CHECK(npa::build_skeleton(rw).classes.size() > 409);
}

TEST_CASE("message compatibility matches the game structure") {
  // all-zero answers force the receiver's derived trit to zero
  const std::array<std::set<int>, 3> expect{{{0, 1}, {0, 2}, {1, 2}}};
  for (int a = 0; a < 3; ++a)
    for (int y = 0; y < 4; ++y)
      CHECK(di::message_compatible(0, a, y) == (expect[a].count(y) == 1));
  // any other answer pair contains both trit values, so every message fits
  for (int x = 1; x < 4; ++x)
    for (int a = 0; a < 3; ++a)
      for (int y = 0; y < 4; ++y) CHECK(di::message_compatible(x, a, y));
}

TEST_CASE("objective structure: weights, counts, and branch collapse") {
  const auto pat = pre_alice_test();
  const auto pap = pre_alice_prot();
  const auto pbt = pre_bob_test();
  const auto pbp = pre_bob_prot();
  // winning-cell and compatibility counts, all weights the stated uniform ones
  CHECK(pat.coeffs.size() == 72);
  CHECK(pbt.coeffs.size() == 72);
  CHECK(pap.coeffs.size() == 12);
  CHECK(pbp.coeffs.size() == 42);
  for (const auto* p : {&pat, &pap, &pbt, &pbp}) {
    CHECK(p->constant == 0.0);
    for (const auto& [w, c] : p->coeffs) CHECK(c > 0.0);
  }
  CHECK(coeff_sum(pat) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(coeff_sum(pap) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(coeff_sum(pbp) == doctest::Approx(14.0).epsilon(1e-12));

  // the combined objective collapses onto one branch at the weight extremes
  for (const auto party : {di::Party::alice, di::Party::bob}) {
    auto obj = di::objective(party, 0.0);
    CHECK(max_coeff_diff(obj.combined(), obj.prot) <= 1e-15);
    obj.q = 1.0;
    CHECK(max_coeff_diff(obj.combined(), obj.test) <= 1e-15);
    obj.q = 0.25;
    auto mix = obj.combined();
    Polynomial expect;
    expect.constant = 0.25 * obj.test.constant + 0.75 * obj.prot.constant;
    for (const auto& [w, c] : obj.test.coeffs) expect.coeffs[w] += 0.25 * c;
    for (const auto& [w, c] : obj.prot.coeffs) expect.coeffs[w] += 0.75 * c;
    CHECK(max_coeff_diff(mix, expect) <= 1e-15);
  }
}

TEST_CASE("eliminated objectives agree with their direct forms on explicit models") {
  Rng rng(20240817, 1);
  const auto at = di::alice_test_objective();
  const auto ap = di::alice_prot_objective();
  const auto bt = di::bob_test_objective();
  const auto bp = di::bob_prot_objective();
  const auto pat = pre_alice_test();
  const auto pap = pre_alice_prot();
  const auto pbt = pre_bob_test();
  const auto pbp = pre_bob_prot();
  for (int trial = 0; trial < 5; ++trial) {
    const auto ma = random_alice_model(rng);
    CHECK(ma.eval(at) == doctest::Approx(ma.eval(pat)).epsilon(1e-10));
    CHECK(ma.eval(ap) == doctest::Approx(ma.eval(pap)).epsilon(1e-10));
    const auto mb = random_bob_model(rng);
    CHECK(mb.eval(bt) == doctest::Approx(mb.eval(pbt)).epsilon(1e-10));
    CHECK(mb.eval(bp) == doctest::Approx(mb.eval(pbp)).epsilon(1e-10));
  }
  // before the rewrite, the functionals have no affine part at all: at the
  // zero moment assignment they vanish
  CHECK(pat.constant == 0.0);
  CHECK(pbp.constant == 0.0);
}

TEST_CASE("honest models: test parts reach the game value, protocol parts match matrices") {
  const auto hb = honest_bob_model();
  CHECK(hb.eval(di::bob_test_objective()) == doctest::Approx(1.0).epsilon(1e-10));

  // direct matrix evaluation of the sequential guessing probability
  double direct = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) {
        if (!di::message_compatible(x, a, y)) continue;
        const Mat m = hb.letter_mat({0, 0, a, x}) * hb.letter_mat({1, 1, 0, y}) *
                      hb.letter_mat({1, 2, a, x}) * hb.letter_mat({1, 1, 0, y});
        direct += ((hb.psi.adjoint() * m * hb.psi)(0)).real() / 3.0;
      }
  const double poly = hb.eval(di::bob_prot_objective());
  CHECK(poly == doctest::Approx(direct).epsilon(1e-12));
  // the fixed second bit is a coin flip against the ideal state
  CHECK(poly == doctest::Approx(0.5).epsilon(1e-10));

  const auto ha = honest_alice_model();
  CHECK(ha.eval(di::alice_test_objective()) == doctest::Approx(1.0).epsilon(1e-10));
  // guess y mod 3: the message is uniform over four values, so two land on
  // choice 0 and one each on 1 and 2
  CHECK(ha.eval(di::alice_prot_objective()) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("uniform independent outputs pass half the test") {
  // product behaviour with uniform four-valued answers on both sides
  auto uniform_eval = [](const Polynomial& p) {
    double v = p.constant;
    for (const auto& [w, c] : p.coeffs) {
      double f = 1.0;
      for (const Letter& l : w) f *= 0.25;
      v += c * f;
    }
    return v;
  };
  CHECK(uniform_eval(di::alice_test_objective()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(uniform_eval(di::bob_test_objective()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gapped combine arithmetic") {
  const auto good = di::gapped_combine(0.6, 1e-3, 0.97365);
  CHECK(good.ok);
  CHECK(good.bound == doctest::Approx(1.0 - 0.6e-3).epsilon(1e-12));
  CHECK(good.reason.empty());

  const auto vacuous = di::gapped_combine(0.6, 0.0, 0.999);
  CHECK(vacuous.ok);
  CHECK(vacuous.bound == 1.0);

  const auto bad = di::gapped_combine(0.6, 1e-3, 0.9999);
  CHECK_FALSE(bad.ok);
  CHECK(bad.reason.find("does not apply") != std::string::npos);

  CHECK_THROWS_AS(di::gapped_combine(0.0, 1e-3, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(di::gapped_combine(0.6, 1.5, 0.9), std::invalid_argument);
}

TEST_CASE("invalid arguments throw") {
  di::DiOptions opt;
  CHECK_THROWS_AS(di::cheat_bound(di::Party::alice, 0.0, opt), std::invalid_argument);
  CHECK_THROWS_AS(di::cheat_bound(di::Party::alice, 1.0, opt), std::invalid_argument);
  CHECK_THROWS_AS(di::gapped_bound(di::Party::alice, 0.0, opt), std::invalid_argument);
  CHECK_THROWS_AS(di::gapped_bound(di::Party::alice, 1.5, opt), std::invalid_argument);
  CHECK_THROWS_AS(di::q_sweep(di::Party::alice, 1.0, opt), std::invalid_argument);
}

TEST_CASE("result record and table shapes") {
  di::DiBound b;
  b.party = di::Party::alice;
  b.q = 0.6;
  b.bound = 0.9644;
  b.nwords = 180;
  auto j = b.to_json();
  CHECK(j["party"] == "alice");
  CHECK(j["q"] == 0.6);
  CHECK(j.contains("solution"));
  CHECK_FALSE(j.contains("eps"));
  b.eps = 1e-3;
  j = b.to_json();
  CHECK(j.contains("eps"));
  CHECK_FALSE(j.contains("q"));

  const auto table = di::bounds_table({b});
  CHECK(table.find("alice") != std::string::npos);
  CHECK(table.find("0.96440") != std::string::npos);
}

TEST_CASE("thread cap reads the environment override") {
  setenv("DIXOT_THREADS", "3", 1);
  CHECK(di::thread_cap() == 3);
  setenv("DIXOT_THREADS", "junk", 1);
  CHECK(di::thread_cap() >= 1);
  unsetenv("DIXOT_THREADS");
  CHECK(di::thread_cap() >= 1);
}

TEST_CASE("concurrent sweep returns per-point certified floors") {
  setenv("DIXOT_THREADS", "2", 1);
  di::DiOptions opt;
  opt.admm = di::default_admm(di::Party::alice);
  opt.admm.max_iter = 600;
  opt.admm.check_every = 200;
  const auto sw = di::q_sweep(di::Party::alice, 0.4, opt);
  unsetenv("DIXOT_THREADS");
  REQUIRE(sw.rows.size() == 2);
  CHECK(sw.rows[0].q == doctest::Approx(0.4));
  CHECK(sw.rows[1].q == doctest::Approx(0.8));
  // a certified bound can never undercut the honest test-passing floor
  for (const auto& r : sw.rows) CHECK(r.bound >= r.q - 1e-9);
  const auto j = sw.to_json();
  CHECK(j["rows"].size() == 2);
  CHECK(j.contains("best_q"));
  CHECK(sw.table().find("best:") != std::string::npos);
}

TEST_CASE("alice bound certifies the five-decimal value" * doctest::timeout(1500)) {
  di::DiOptions opt;
  opt.admm = di::default_admm(di::Party::alice);
  opt.admm.max_iter = 110000;
  opt.admm.time_limit = 1200.0;
  const auto b = di::cheat_bound(di::Party::alice, 0.6, opt);
  CHECK(b.nwords == 180);
  CHECK(std::abs(b.bound - 0.96440) <= 2e-5);
  // independent recheck of the certificate backing the bound
  const auto sk = npa::build_skeleton(di::alice_words());
  const auto mp = npa::assemble(sk, di::objective(di::Party::alice, 0.6).combined());
  const double recheck = moment::certified_bound(mp, b.solution.witness, b.solution.witness_gate);
  CHECK(recheck == doctest::Approx(b.bound).epsilon(1e-9));
  // honest feasible point stays below the certified bound
  const auto honest = honest_alice_model();
  const double feasible = honest.eval(di::objective(di::Party::alice, 0.6).combined());
  CHECK(feasible == doctest::Approx(0.6 + 0.4 / 3.0).epsilon(1e-9));
  CHECK(feasible <= b.bound);
  CHECK(b.bound >= 0.6);
}

TEST_CASE("q sweep locates the best branch weight" * doctest::timeout(1500)) {
  di::DiOptions opt;
  opt.admm = di::default_admm(di::Party::alice);
  opt.admm.max_iter = 6000;
  opt.admm.check_every = 500;
  const auto sw = di::q_sweep(di::Party::alice, 0.1, opt);
  REQUIRE(sw.rows.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(sw.rows[i].q == doctest::Approx(0.1 * (i + 1)));
  CHECK(std::abs(sw.rows[sw.best].q - 0.6) <= 0.1 + 1e-9);
  for (const auto& r : sw.rows) CHECK(r.bound >= r.q - 1e-9);
}

TEST_CASE("alice gapped bound reproduces the published protocol ceiling" * doctest::timeout(1800)) {
  di::DiOptions opt;
  opt.admm = di::default_admm(di::Party::alice);
  opt.admm.max_iter = 200000;
  opt.admm.time_limit = 1500.0;
  const auto b = di::gapped_bound(di::Party::alice, 1e-3, opt);
  REQUIRE(b.eps.has_value());
  CHECK(std::abs(b.bound - 0.85855) <= 2e-5);
  // combine: the hypothesis holds comfortably at branch weight 0.6
  const auto comb = di::gapped_combine(0.6, 1e-3, b.bound);
  CHECK(comb.ok);
  CHECK(comb.bound == doctest::Approx(0.9994).epsilon(1e-12));
}

TEST_CASE("gapped bounds grow with the gap and eps = 1 is unconstrained" * doctest::timeout(900)) {
  di::DiOptions opt;
  opt.admm = di::default_admm(di::Party::alice);
  opt.admm.max_iter = 8000;
  opt.admm.check_every = 500;
  const auto b2 = di::gapped_bound(di::Party::alice, 1e-2, opt);
  const auto b1 = di::gapped_bound(di::Party::alice, 1e-1, opt);
  const auto b0 = di::gapped_bound(di::Party::alice, 1.0, opt);
  CHECK(b2.bound <= b1.bound + 1e-6);
  CHECK(b1.bound <= b0.bound + 1e-6);
  // vacuous gate against the plain protocol-part relaxation
  const auto sk = npa::build_skeleton(di::alice_words());
  const auto mp = npa::assemble(sk, di::objective(di::Party::alice, 0.5).prot);
  auto admm = opt.admm;
  const auto free = moment::solve_admm(mp, admm);
  CHECK(std::abs(b0.bound - free.upper_bound) <= 2e-3);
}

TEST_CASE("reduced receiver set stays inside the sound window" * doctest::timeout(2400)) {
  di::DiOptions opt;
  opt.reduced = true;
  opt.admm = di::default_admm(di::Party::bob);
  opt.admm.max_iter = 20000;
  opt.admm.time_limit = 1800.0;
  const auto b = di::cheat_bound(di::Party::bob, 0.6, opt);
  CHECK(b.nwords == 409);
  CHECK(b.reduced);
  // looser relaxation: can only sit above the full-set optimum
  CHECK(b.bound >= 0.99204 - 2e-5);
  CHECK(b.bound <= 1.0);
}
