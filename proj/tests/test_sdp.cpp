#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "xot/rng.hpp"
#include "xot/sdp.hpp"

using namespace xot;
using sdp::Constraint;
using sdp::SdpProblem;
using sdp::SdpSolution;
using sdp::SolveStatus;
using sdp::SparseHerm;

namespace {

// sum_b E_b = I expressed entrywise over all blocks
void add_resolution_constraints(SdpProblem& p) {
  int d = p.blocks[0].dim;
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) {
      Constraint re;
      for (const auto& b : p.blocks) {
        SparseHerm s;
        s.dim = b.dim;
        s.entries.push_back({r, c, cx(1.0, 0.0)});
        re.coeffs.push_back(s);
      }
      re.rhs = (r == c) ? 1.0 : 0.0;
      p.constraints.push_back(re);
      if (r != c) {
        Constraint im;
        for (const auto& b : p.blocks) {
          SparseHerm s;
          s.dim = b.dim;
          s.entries.push_back({r, c, cx(0.0, 1.0)});
          im.coeffs.push_back(s);
        }
        im.rhs = 0.0;
        p.constraints.push_back(im);
      }
    }
  }
}

SdpProblem discrimination(const std::vector<Mat>& states, const std::vector<double>& priors) {
  SdpProblem p;
  int d = static_cast<int>(states[0].rows());
  for (size_t b = 0; b < states.size(); ++b) {
    p.blocks.push_back({"E" + std::to_string(b), d});
    p.objective.push_back(SparseHerm::from_dense(priors[b] * states[b]));
  }
  add_resolution_constraints(p);
  return p;
}

Mat pure(const Vec& v) { return v * v.adjoint(); }

double helstrom_two(const Mat& r0, const Mat& r1) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (r0 - r1));
  return 0.5 + 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Mat random_density(int d, Rng& rng, bool complex_entries) {
  Mat g(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      g(r, c) = cx(rng.uniform() - 0.5, complex_entries ? rng.uniform() - 0.5 : 0.0);
    }
  }
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("one dimensional problem pinned to one") {
  SdpProblem p;
  p.blocks.push_back({"x", 1});
  SparseHerm obj;
  obj.dim = 1;
  obj.entries.push_back({0, 0, 1.0});
  p.objective.push_back(obj);
  Constraint con;
  con.coeffs.push_back(obj);
  con.rhs = 1.0;
  p.constraints.push_back(con);

  SdpSolution s = sdp::solve(p, 1e-12);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.dual_value == doctest::Approx(1.0).epsilon(1e-10));
  auto rep = sdp::verify_certificate(p, s);
  CHECK(rep.ok(1e-12));
}

TEST_CASE("orthogonal states are perfectly distinguishable") {
  Vec v0 = basis_ket(2, 0), v1 = basis_ket(2, 1);
  SdpProblem p = discrimination({pure(v0), pure(v1)}, {0.5, 0.5});
  SdpSolution s = sdp::solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sdp::verify_certificate(p, s).ok(1e-7));
}

TEST_CASE("two pure states match the closed-form discrimination value") {
  Vec v0 = basis_ket(2, 0);
  Vec vp(2);
  vp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Mat r0 = pure(v0), r1 = pure(vp);
  SdpProblem p = discrimination({r0, r1}, {0.5, 0.5});
  SdpSolution s = sdp::solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  double expect = helstrom_two(r0, r1);
  CHECK(expect == doctest::Approx((1.0 + 1.0 / std::sqrt(2.0)) / 2.0).epsilon(1e-12));
  CHECK(s.primal_value == doctest::Approx(expect).epsilon(1e-7));
  CHECK(s.gap <= 1e-7);
  CHECK(sdp::verify_certificate(p, s).ok(1e-6));
}

TEST_CASE("complex problems agree with their explicit real embedding") {
  Vec v0 = basis_ket(2, 0);
  Vec vi(2);
  vi << cx(1.0, 0.0) / std::sqrt(2.0), cx(0.0, 1.0) / std::sqrt(2.0);
  Mat r0 = pure(v0), r1 = pure(vi);
  SdpProblem p = discrimination({r0, r1}, {0.5, 0.5});
  SdpSolution s = sdp::solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(helstrom_two(r0, r1)).epsilon(1e-7));

  // hand-built real embedding of the same problem
  SdpProblem q;
  for (size_t b = 0; b < 2; ++b) q.blocks.push_back({"R" + std::to_string(b), 4});
  q.objective.push_back(SparseHerm::from_dense(0.5 * hermitian_to_real(0.5 * r0).cast<cx>()));
  q.objective.push_back(SparseHerm::from_dense(0.5 * hermitian_to_real(0.5 * r1).cast<cx>()));
  for (const auto& con : p.constraints) {
    Constraint rcon;
    for (size_t b = 0; b < 2; ++b) {
      Mat dense = con.coeffs[b].dense();
      rcon.coeffs.push_back(SparseHerm::from_dense(0.5 * hermitian_to_real(dense).cast<cx>()));
    }
    rcon.rhs = con.rhs;
    q.constraints.push_back(rcon);
  }
  SdpSolution sq = sdp::solve(q);
  REQUIRE(sq.status == SolveStatus::Optimal);
  CHECK(sq.primal_value == doctest::Approx(s.primal_value).epsilon(1e-7));
}

TEST_CASE("weak duality and certificates on random solvable problems") {
  Rng rng(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + static_cast<int>(rng.randint(4));
    bool cplx = rng.bernoulli(0.5);
    SdpProblem p;
    p.blocks.push_back({"X", d});
    p.objective.push_back(SparseHerm::from_dense(random_density(d, rng, cplx) -
                                                 0.3 * Mat::Identity(d, d)));
    // constraints evaluated on a strictly feasible point keep the problem solvable
    Mat x0 = random_density(d, rng, cplx);
    int m = 1 + static_cast<int>(rng.randint(4));
    for (int i = 0; i < m; ++i) {
      Mat g = random_density(d, rng, cplx);
      Mat c = g + g.adjoint();
      Constraint con;
      con.coeffs.push_back(SparseHerm::from_dense(c));
      con.rhs = std::real((c.adjoint() * x0).trace());
      p.constraints.push_back(con);
    }
    Constraint tr;
    tr.coeffs.push_back(SparseHerm::from_dense(Mat::Identity(d, d)));
    tr.rhs = 1.0;
    p.constraints.push_back(tr);

    SdpSolution s = sdp::solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.dual_value >= s.primal_value - 1e-7);
    auto rep = sdp::verify_certificate(p, s);
    CHECK(rep.ok(1e-6));
  }
}

TEST_CASE("statuses are reported distinctly") {
  SUBCASE("negative trace pin is infeasible") {
    SdpProblem p;
    p.blocks.push_back({"x", 1});
    SparseHerm one;
    one.dim = 1;
    one.entries.push_back({0, 0, 1.0});
    SparseHerm zero;
    zero.dim = 1;
    p.objective.push_back(zero);
    Constraint con;
    con.coeffs.push_back(one);
    con.rhs = -1.0;
    p.constraints.push_back(con);
    CHECK(sdp::solve(p).status == SolveStatus::Infeasible);
  }
  SUBCASE("contradictory pins are caught in presolve") {
    SdpProblem p;
    p.blocks.push_back({"x", 1});
    SparseHerm one;
    one.dim = 1;
    one.entries.push_back({0, 0, 1.0});
    p.objective.push_back(one);
    for (double rhs : {1.0, 2.0}) {
      Constraint con;
      con.coeffs.push_back(one);
      con.rhs = rhs;
      p.constraints.push_back(con);
    }
    SdpSolution s = sdp::solve(p);
    CHECK(s.status == SolveStatus::Infeasible);
    CHECK_FALSE(s.warnings.empty());
  }
  SUBCASE("free trace growth is unbounded") {
    SdpProblem p;
    p.blocks.push_back({"X", 2});
    p.objective.push_back(SparseHerm::from_dense(Mat::Identity(2, 2)));
    SparseHerm off;
    off.dim = 2;
    off.entries.push_back({0, 1, 1.0});
    Constraint con;
    con.coeffs.push_back(off);
    con.rhs = 0.0;
    p.constraints.push_back(con);
    CHECK(sdp::solve(p).status == SolveStatus::Unbounded);
  }
  SUBCASE("iteration cap reports numerical failure") {
    Vec v0 = basis_ket(2, 0);
    Vec vp(2);
    vp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    SdpProblem p = discrimination({pure(v0), pure(vp)}, {0.5, 0.5});
    CHECK(sdp::solve(p, 1e-8, 1).status == SolveStatus::NumericalFailure);
  }
}

TEST_CASE("dependent constraints are dropped with a warning") {
  SdpProblem p;
  p.blocks.push_back({"X", 2});
  p.objective.push_back(SparseHerm::from_dense(Mat::Identity(2, 2)));
  SparseHerm d0, d1, tr;
  d0.dim = d1.dim = tr.dim = 2;
  d0.entries.push_back({0, 0, 1.0});
  d1.entries.push_back({1, 1, 1.0});
  tr.entries.push_back({0, 0, 1.0});
  tr.entries.push_back({1, 1, 1.0});
  for (const auto& [coeff, rhs] : {std::pair{d0, 0.25}, {d1, 0.75}, {tr, 1.0}, {d0, 0.25}}) {
    Constraint con;
    con.coeffs.push_back(coeff);
    con.rhs = rhs;
    p.constraints.push_back(con);
  }
  SdpSolution s = sdp::solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.warnings.size() == 2);  // the trace row and the duplicate are both implied
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.dual.size() == 4);
  CHECK(sdp::verify_certificate(p, s).ok(1e-7));
}

TEST_CASE("tampered certificates are flagged") {
  Vec v0 = basis_ket(2, 0);
  Vec vp(2);
  vp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  SdpProblem p = discrimination({pure(v0), pure(vp)}, {0.5, 0.5});
  SdpSolution s = sdp::solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  REQUIRE(sdp::verify_certificate(p, s).ok(1e-6));

  SdpSolution bad = s;
  bad.dual[0] -= 0.2;
  auto rep = sdp::verify_certificate(p, bad);
  CHECK_FALSE(rep.ok(1e-6));
  CHECK((rep.dual_min_eig < -1e-6 || rep.gap > 1e-6));
}

TEST_CASE("problems and solutions round trip through json") {
  Vec v0 = basis_ket(2, 0);
  Vec vi(2);
  vi << cx(1.0, 0.0) / std::sqrt(2.0), cx(0.0, 1.0) / std::sqrt(2.0);
  SdpProblem p = discrimination({pure(v0), pure(vi)}, {0.5, 0.5});
  SdpProblem p2 = SdpProblem::from_json(nlohmann::json::parse(p.to_json().dump()));
  SdpSolution s = sdp::solve(p);
  SdpSolution s2 = sdp::solve(p2);
  REQUIRE(s.status == SolveStatus::Optimal);
  REQUIRE(s2.status == SolveStatus::Optimal);
  CHECK(s2.primal_value == doctest::Approx(s.primal_value).epsilon(1e-9));

  SdpSolution loaded = SdpSolution::from_json(nlohmann::json::parse(s.to_json().dump()));
  CHECK(sdp::verify_certificate(p, loaded).ok(1e-6));
  CHECK(loaded.iterations == s.iterations);

  // block complexity flags survive the dump
  auto j = p.to_json();
  CHECK(j["blocks"][0]["complex"].get<bool>());
}
