#include "xot/rigidity.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace xot::rigidity {
namespace {

using nlohmann::json;

Mat signed_sum(const std::array<Mat, 4>& meas, int sign_bit) {
  Mat out = Mat::Zero(4, 4);
  for (int v = 0; v < 4; ++v) {
    const int bit = sign_bit == 0 ? (v >> 1) : (v & 1);
    out += (bit ? -1.0 : 1.0) * meas[v];
  }
  return out;
}

struct Checker {
  Report report;
  void add(std::string relation, double residual, double threshold) {
    bool pass = residual <= threshold;
    report.checks.push_back({std::move(relation), residual, threshold, pass});
    report.all_pass = report.all_pass && pass;
  }
};

}  // namespace

XzwSet build_xzw(const ms::MsStrategy& s) {
  XzwSet set;
  // first party: inputs are rows; the two signed observables per operator
  // family pick out one cell of the row each
  set.x[0] = signed_sum(s.alice[1], 1);
  set.x[1] = signed_sum(s.alice[1], 0);
  set.z[0] = signed_sum(s.alice[0], 0);
  set.z[1] = signed_sum(s.alice[0], 1);
  set.w[0] = signed_sum(s.alice[2], 0);
  set.w[1] = signed_sum(s.alice[2], 1);
  // second party: inputs are columns
  set.x[2] = signed_sum(s.bob[1], 1);
  set.x[3] = signed_sum(s.bob[0], 1);
  set.z[2] = signed_sum(s.bob[0], 0);
  set.z[3] = signed_sum(s.bob[1], 0);
  set.w[2] = signed_sum(s.bob[2], 0);
  set.w[3] = signed_sum(s.bob[2], 1);
  return set;
}

Mat lift(const Mat& op, int party, int total_dim) {
  if (op.rows() != 4 || op.cols() != 4) throw std::invalid_argument("operator must be 4x4");
  if (total_dim % 16 != 0 || total_dim <= 0)
    throw std::invalid_argument("state dimension must be a positive multiple of 16");
  const int env = total_dim / 16;
  Mat on_pairs = party == 0 ? kron(op, Mat::Identity(4, 4)) : kron(Mat::Identity(4, 4), op);
  if (env == 1) return on_pairs;
  return kron(on_pairs, Mat::Identity(env, env));
}

const RelationCheck& Report::find(const std::string& relation) const {
  for (const auto& c : checks)
    if (c.relation == relation) return c;
  throw std::out_of_range("no such relation: " + relation);
}

json Report::to_json() const {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"relation", c.relation},
                   {"residual", c.residual},
                   {"threshold", c.threshold},
                   {"pass", c.pass}});
  return arr;
}

Report verify_ideal_relations(const XzwSet& set, const Vec& state, double tol) {
  const int d = static_cast<int>(state.size());
  auto A = [&](const Mat& m) { return lift(m, 0, d); };
  auto B = [&](const Mat& m) { return lift(m, 1, d); };
  Checker ck;

  auto expectation = [&](const std::string& name, const Mat& op, double target) {
    const cx val = (state.adjoint() * op * state)(0);
    ck.add(name, std::abs(val - target), tol);
  };
  expectation("<x1 x3> = 1", A(set.x[0]) * B(set.x[2]), 1.0);
  expectation("<x2 x4> = 1", A(set.x[1]) * B(set.x[3]), 1.0);
  expectation("<x1 x2 w4> = 1", A(set.x[0] * set.x[1]) * B(set.w[3]), 1.0);
  expectation("<z1 z3> = 1", A(set.z[0]) * B(set.z[2]), 1.0);
  expectation("<z2 z4> = 1", A(set.z[1]) * B(set.z[3]), 1.0);
  expectation("<z1 z2 w3> = 1", A(set.z[0] * set.z[1]) * B(set.w[2]), 1.0);
  expectation("<w1 x4 z3> = -1", A(set.w[0]) * B(set.x[3] * set.z[2]), -1.0);
  expectation("<w2 x3 z4> = -1", A(set.w[1]) * B(set.x[2] * set.z[3]), -1.0);
  expectation("<w1 w2 w3 w4> = -1", A(set.w[0] * set.w[1]) * B(set.w[2] * set.w[3]), -1.0);

  auto identity = [&](const std::string& name, const Mat& lhs, const Mat& rhs) {
    ck.add(name, ((lhs - rhs) * state).norm(), tol);
  };
  identity("z1 z2 |s> = w3 |s>", A(set.z[0] * set.z[1]), B(set.w[2]));
  identity("x1 x2 |s> = w4 |s>", A(set.x[0] * set.x[1]), B(set.w[3]));
  identity("x4 z3 |s> = -w1 |s>", B(set.x[3] * set.z[2]), -A(set.w[0]));
  identity("x3 z4 |s> = -w2 |s>", B(set.x[2] * set.z[3]), -A(set.w[1]));
  identity("w3 w4 |s> = -w1 w2 |s>", B(set.w[2] * set.w[3]), -A(set.w[0] * set.w[1]));
  identity("x1 x2 z1 z2 |s> = w3 w4 |s>",
           A(set.x[0] * set.x[1] * set.z[0] * set.z[1]), B(set.w[2] * set.w[3]));

  ck.add("(x1 z1 + z1 x1)|s> = 0",
         (A(set.x[0] * set.z[0] + set.z[0] * set.x[0]) * state).norm(), tol);
  return std::move(ck.report);
}

Report mckague_premises(const XzwSet& set, const Vec& state, double delta) {
  const int d = static_cast<int>(state.size());
  Checker ck;

  const std::array<std::pair<std::string, const std::array<Mat, 4>*>, 3> families{
      {{"x", &set.x}, {"z", &set.z}, {"w", &set.w}}};
  for (const auto& [name, ops] : families)
    for (int k = 0; k < 4; ++k) {
      const Mat& m = (*ops)[k];
      ck.add(name + std::to_string(k + 1) + " hermitian", (m - m.adjoint()).norm(), 1e-10);
      ck.add(name + std::to_string(k + 1) + " unitary",
             (m.adjoint() * m - Mat::Identity(4, 4)).norm(), 1e-10);
    }
  auto commute = [&](const std::string& name, const Mat& a, const Mat& b) {
    ck.add(name, (a * b - b * a).norm(), 1e-10);
  };
  commute("[x1, x2] = 0", set.x[0], set.x[1]);
  commute("[z1, z2] = 0", set.z[0], set.z[1]);
  commute("[x3, x4] = 0", set.x[2], set.x[3]);
  commute("[z3, z4] = 0", set.z[2], set.z[3]);

  // lemma labels: partners share an index across parties, so the second
  // party's x and z families trade places
  const std::array<const Mat*, 4> X{&set.x[0], &set.x[1], &set.z[2], &set.z[3]};
  const std::array<const Mat*, 4> Z{&set.z[0], &set.z[1], &set.x[2], &set.x[3]};
  const std::array<int, 4> party{0, 0, 1, 1};
  auto op = [&](const Mat* m, int k) { return lift(*m, party[k], d); };

  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      if (k == l) continue;
      const Mat xk = op(X[k], k), zl = op(Z[l], l);
      ck.add("(x" + std::to_string(k + 1) + " z" + std::to_string(l + 1) + " - z" +
                 std::to_string(l + 1) + " x" + std::to_string(k + 1) + ")|s>",
             ((xk * zl - zl * xk) * state).norm(), delta);
    }
  for (int k = 0; k < 4; ++k) {
    const int p = (k + 2) % 4;
    ck.add("(x" + std::to_string(k + 1) + " - z" + std::to_string(p + 1) + ")|s>",
           ((op(X[k], k) - op(Z[p], p)) * state).norm(), delta);
  }
  for (int k = 0; k < 4; ++k) {
    const Mat xk = op(X[k], k), zk = op(Z[k], k);
    ck.add("(x" + std::to_string(k + 1) + " z" + std::to_string(k + 1) + " + z" +
               std::to_string(k + 1) + " x" + std::to_string(k + 1) + ")|s>",
           ((xk * zk + zk * xk) * state).norm(), delta);
  }
  return std::move(ck.report);
}

}  // namespace xot::rigidity
