#include "xot/moment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#ifdef XOT_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace xot::moment {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::json;

void eig_sym(const MatrixXd& m, VectorXd& vals, MatrixXd& vecs) {
#ifdef XOT_HAVE_LAPACKE
  vecs = m;
  vals.resize(m.rows());
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<int>(m.rows()), vecs.data(),
                            static_cast<int>(m.rows()), vals.data());
  if (info == 0) return;
#endif
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  vals = es.eigenvalues();
  vecs = es.eigenvectors();
}

// upper-triangle entry lists per class and the diagonal Gram of the patterns
struct Patterns {
  std::vector<std::vector<std::pair<int, int>>> entries;
  VectorXd gram;  // <A_c, A_c>

  explicit Patterns(const MomentProblem& p) : entries(p.nclasses), gram(VectorXd::Zero(p.nclasses)) {
    for (int i = 0; i < p.n; ++i) {
      for (int j = i; j < p.n; ++j) {
        int c = p.cls(i, j);
        if (c < 0) continue;
        entries[c].push_back({i, j});
        gram(c) += i == j ? 1.0 : 2.0;
      }
    }
  }

  double gather(int c, const MatrixXd& m) const {
    double s = 0.0;
    for (auto [i, j] : entries[c]) s += (i == j ? 1.0 : 2.0) * m(i, j);
    return s;
  }

  void scatter(int c, double v, MatrixXd& m) const {
    for (auto [i, j] : entries[c]) {
      m(i, j) = v;
      m(j, i) = v;
    }
  }
};

}  // namespace

void MomentProblem::validate() const {
  if (n <= 0) throw std::invalid_argument("moment matrix side must be positive");
  if (cls.rows() != n || cls.cols() != n) throw std::invalid_argument("class map shape mismatch");
  if (static_cast<int>(objective.size()) != nclasses) {
    throw std::invalid_argument("objective size mismatch");
  }
  if (identity_class < 0 || identity_class >= nclasses) {
    throw std::invalid_argument("identity class out of range");
  }
  std::vector<char> seen(nclasses, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (cls(i, j) != cls(j, i)) throw std::invalid_argument("class map not symmetric");
      if (cls(i, j) < -1 || cls(i, j) >= nclasses) throw std::invalid_argument("class id out of range");
      if (cls(i, j) >= 0) seen[cls(i, j)] = 1;
    }
  }
  for (int c = 0; c < nclasses; ++c) {
    if (!seen[c]) throw std::invalid_argument("class without entries");
  }
  if (has_gate && static_cast<int>(gate.size()) != nclasses) {
    throw std::invalid_argument("gate size mismatch");
  }
}

double min_eigenvalue(const MatrixXd& m) {
  VectorXd vals;
  MatrixXd vecs;
  eig_sym(m, vals, vecs);
  return vals.minCoeff();
}

double certified_bound(const MomentProblem& p, const MatrixXd& witness, double witness_gate) {
  p.validate();
  if (witness.rows() != p.n || witness.cols() != p.n) {
    throw std::invalid_argument("witness shape mismatch");
  }
  if (witness_gate < 0.0) throw std::invalid_argument("gate multiplier must be nonnegative");
  if (!p.has_gate && witness_gate != 0.0) {
    throw std::invalid_argument("gate multiplier without a gate row");
  }
  Patterns pat(p);
  const int id = p.identity_class;
  double bound = p.objective[id] + pat.gather(id, witness);
  if (p.has_gate) bound += (p.gate[id] - p.gate_rhs) * witness_gate;
  for (int c = 0; c < p.nclasses; ++c) {
    if (c == id) continue;
    double r = pat.gather(c, witness) + p.objective[c];
    if (p.has_gate) r += p.gate[c] * witness_gate;
    bound += std::abs(r);
  }
  bound += p.n * std::max(0.0, -min_eigenvalue(witness));
  return bound;
}

MomentSolution solve_admm(const MomentProblem& p, const AdmmOptions& opt) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  Patterns pat(p);
  const int n = p.n;
  const int K = p.nclasses;
  const int id = p.identity_class;
  const bool gate = p.has_gate;
  const double gate0 = gate ? p.gate[id] - p.gate_rhs : 0.0;

  // Gram of the constraint patterns over the free classes (identity pinned):
  // diagonal plus a rank-1 gate part, inverted by Sherman-Morrison
  VectorXd gram = pat.gram;
  VectorXd gvec = VectorXd::Zero(K);
  if (gate) {
    for (int c = 0; c < K; ++c) gvec(c) = c == id ? 0.0 : p.gate[c];
  }
  auto gram_solve = [&](VectorXd v) {
    v(id) = 0.0;
    v.array() /= gram.array();
    if (gate) {
      VectorXd dg = gvec.array() / gram.array();
      v -= (gvec.dot(v) / (1.0 + gvec.dot(dg))) * dg;
    }
    v(id) = 0.0;
    return v;
  };

  VectorXd y = VectorXd::Zero(K);
  y(id) = 1.0;
  MatrixXd xm = MatrixXd::Zero(n, n);
  double xs = 0.0;
  MatrixXd sm = MatrixXd::Zero(n, n);
  double ss = 0.0;
  double beta = opt.beta;

  VectorXd cvec = VectorXd::Zero(K);
  for (int c = 0; c < K; ++c) cvec(c) = c == id ? 0.0 : p.objective[c];
  double cnorm = 1.0 + cvec.norm();

  MatrixXd gamma(n, n), w(n, n), vecs(n, n);
  VectorXd vals(n);
  VectorXd lx(K), ls(K);

  MomentSolution sol;
  sol.upper_bound = std::numeric_limits<double>::infinity();
  MatrixXd best_wit;
  double best_wit_gate = 0.0;

  if (opt.warm_witness.size() != 0) {
    if (opt.warm_witness.rows() != n || opt.warm_witness.cols() != n ||
        static_cast<int>(opt.warm_y.size()) != K) {
      throw std::invalid_argument("warm start shape mismatch");
    }
    for (int c = 0; c < K; ++c) y(c) = opt.warm_y[c];
    y(id) = 1.0;
    xm = 0.5 * (opt.warm_witness + opt.warm_witness.transpose());
    xs = gate ? std::max(0.0, opt.warm_gate) : 0.0;
    // prime the cone split so the first y-step sees a consistent S
    gamma.setZero();
    for (int c = 0; c < K; ++c) {
      if (!pat.entries[c].empty()) pat.scatter(c, y(c), gamma);
    }
    w = gamma - xm / beta;
    eig_sym(w, vals, vecs);
    sm.setZero();
    for (int k = 0; k < n; ++k) {
      if (vals(k) > 0.0) sm.noalias() += vals(k) * vecs.col(k) * vecs.col(k).transpose();
    }
    if (gate) ss = std::max(0.0, gate0 + gvec.dot(y) - xs / beta);
  }

  double split_res = 1.0, mult_res = 1.0;
  int next_checkpoint = opt.checkpoint_every;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    // y-step: (L^T L) y = (c + L^T X)/beta + L^T (S - Phi_0); the pattern
    // overlap <A_c, A_id> vanishes, leaving only the gate part of Phi_0
    for (int c = 0; c < K; ++c) {
      lx(c) = pat.gather(c, xm);
      ls(c) = pat.gather(c, sm);
    }
    if (gate) {
      lx += gvec * xs;
      ls += gvec * ss;
    }
    VectorXd rhs = (cvec + lx) / beta + ls;
    if (gate) rhs -= gvec * gate0;
    y = gram_solve(rhs);
    y(id) = 1.0;

    // W = Phi(y) - X/beta, projected onto the cone and its polar
    gamma.setZero();
    for (int c = 0; c < K; ++c) {
      if (!pat.entries[c].empty()) pat.scatter(c, y(c), gamma);
    }
    w = gamma - xm / beta;
    double wgate = gate ? gate0 + gvec.dot(y) - xs / beta : 0.0;
    eig_sym(w, vals, vecs);
    int npos = static_cast<int>((vals.array() > 0.0).count());
    if (npos <= n - npos) {
      sm.setZero();
      for (int k = n - npos; k < n; ++k) {
        sm.noalias() += vals(k) * vecs.col(k) * vecs.col(k).transpose();
      }
      xm = beta * (sm - w);
    } else {
      xm.setZero();
      for (int k = 0; k < n - npos; ++k) {
        xm.noalias() -= beta * vals(k) * vecs.col(k) * vecs.col(k).transpose();
      }
      sm = w + xm / beta;
    }
    if (gate) {
      ss = std::max(0.0, wgate);
      xs = beta * (ss - wgate);
    }

    if ((it + 1) % std::max(1, opt.check_every) != 0 && it + 1 != opt.max_iter) continue;

    // multiplier residual: how far X is from satisfying L^T X = -c
    for (int c = 0; c < K; ++c) lx(c) = pat.gather(c, xm);
    if (gate) lx += gvec * xs;
    VectorXd r = lx + cvec;
    r(id) = 0.0;
    mult_res = r.norm() / cnorm;
    split_res = (gamma - sm).norm() / (1.0 + gamma.norm());
    if (gate) split_res = std::max(split_res, std::abs(gate0 + gvec.dot(y) - ss) / (1.0 + std::abs(ss)));

    // X is in the cone by construction, so the residual-corrected value is a
    // valid bound at every iteration; keep the best one
    double raw = p.objective[id] + pat.gather(id, xm) + gate0 * xs + r.lpNorm<1>();
    if (raw < sol.upper_bound) {
      sol.upper_bound = raw;
      best_wit = xm;
      best_wit_gate = xs;
    }
    if (opt.progress) opt.progress(it + 1, split_res, mult_res, sol.upper_bound);
    if (opt.on_checkpoint && opt.checkpoint_every > 0 && it + 1 >= next_checkpoint) {
      next_checkpoint += opt.checkpoint_every;
      MomentSolution snap;
      snap.upper_bound = sol.upper_bound;
      snap.objective_estimate = p.objective[id] + cvec.dot(y);
      snap.y.assign(y.data(), y.data() + K);
      snap.witness = best_wit;
      snap.witness_gate = best_wit_gate;
      snap.iterations = it + 1;
      snap.wall_time = elapsed();
      snap.beta = beta;
      opt.on_checkpoint(snap);
    }
    if (split_res < opt.tol && mult_res < opt.tol) {
      sol.converged = true;
      ++it;
      break;
    }
    if (opt.time_limit > 0.0 && elapsed() > opt.time_limit) break;
    if (opt.adapt) {
      if (split_res > 10.0 * mult_res) {
        beta = std::min(beta * 1.6, 1e6);
      } else if (mult_res > 10.0 * split_res) {
        beta = std::max(beta / 1.6, 1e-6);
      }
    }
  }

  // affine correction: project the final multiplier onto the certificate
  // equations, then charge the remaining infeasibility exactly
  for (int c = 0; c < K; ++c) lx(c) = pat.gather(c, xm);
  if (gate) lx += gvec * xs;
  VectorXd r = lx + cvec;
  r(id) = 0.0;
  VectorXd wcoef = gram_solve(-r);
  MatrixXd corrected = xm;
  for (int c = 0; c < K; ++c) {
    if (wcoef(c) != 0.0) {
      for (auto [i, j] : pat.entries[c]) {
        corrected(i, j) += wcoef(c);
        if (i != j) corrected(j, i) += wcoef(c);
      }
    }
  }
  double corrected_gate = gate ? std::max(0.0, xs + gvec.dot(wcoef)) : 0.0;
  double corrected_bound = certified_bound(p, corrected, corrected_gate);
  if (corrected_bound < sol.upper_bound) {
    sol.upper_bound = corrected_bound;
    best_wit = corrected;
    best_wit_gate = corrected_gate;
  }

  sol.witness = best_wit.size() ? best_wit : xm;
  sol.witness_gate = best_wit_gate;
  {
    double l1 = 0.0;
    for (int c = 0; c < K; ++c) {
      if (c == id) continue;
      double rc = pat.gather(c, sol.witness) + p.objective[c];
      if (gate) rc += gvec(c) * sol.witness_gate;
      l1 += std::abs(rc);
    }
    sol.residual_l1 = l1;
    sol.witness_min_eig = min_eigenvalue(sol.witness);
  }
  sol.y.assign(y.data(), y.data() + K);
  sol.objective_estimate = p.objective[id];
  for (int c = 0; c < K; ++c) {
    if (c != id) sol.objective_estimate += p.objective[c] * y(c);
  }
  sol.iterations = it;
  sol.wall_time = elapsed();
  sol.beta = beta;
  return sol;
}

json MomentSolution::to_json() const {
  return json{{"converged", converged},
              {"upper_bound", upper_bound},
              {"objective_estimate", objective_estimate},
              {"residual_l1", residual_l1},
              {"witness_min_eig", witness_min_eig},
              {"witness_gate", witness_gate},
              {"iterations", iterations},
              {"wall_time", wall_time},
              {"beta", beta}};
}

sdp::SdpProblem to_sdp(const MomentProblem& p) {
  p.validate();
  sdp::SdpProblem out;
  out.blocks.push_back({"Gamma", p.n});
  const bool gate = p.has_gate;
  if (gate) out.blocks.push_back({"slack", 1});

  // objective reads one representative entry per class
  std::vector<std::pair<int, int>> rep(p.nclasses, {-1, -1});
  for (int i = 0; i < p.n; ++i) {
    for (int j = i; j < p.n; ++j) {
      int c = p.cls(i, j);
      if (c >= 0 && rep[c].first < 0) rep[c] = {i, j};
    }
  }
  auto entry_pattern = [&](int i, int j, double scale) {
    sdp::SparseHerm h{p.n, {}};
    h.entries.push_back({i, j, (i == j ? 1.0 : 0.5) * scale});
    return h;
  };
  {
    Mat c = Mat::Zero(p.n, p.n);
    for (int cl = 0; cl < p.nclasses; ++cl) {
      auto [i, j] = rep[cl];
      if (i < 0) continue;
      double v = p.objective[cl] * (i == j ? 1.0 : 0.5);
      c(i, j) += v;
      if (i != j) c(j, i) += v;
    }
    out.objective.push_back(sdp::SparseHerm::from_dense(c));
    if (gate) out.objective.push_back(sdp::SparseHerm{1, {}});
  }

  auto blank = [&] {
    sdp::Constraint con;
    con.coeffs.push_back(sdp::SparseHerm{p.n, {}});
    if (gate) con.coeffs.push_back(sdp::SparseHerm{1, {}});
    return con;
  };
  for (int i = 0; i < p.n; ++i) {
    for (int j = i; j < p.n; ++j) {
      int c = p.cls(i, j);
      if (c < 0) {
        auto con = blank();
        con.coeffs[0] = entry_pattern(i, j, 1.0);
        out.constraints.push_back(std::move(con));
      } else if (c == p.identity_class) {
        auto con = blank();
        con.coeffs[0] = entry_pattern(i, j, 1.0);
        con.rhs = 1.0;
        out.constraints.push_back(std::move(con));
      } else if (std::pair{i, j} != rep[c]) {
        auto con = blank();
        con.coeffs[0] = entry_pattern(i, j, 1.0);
        auto [ri, rj] = rep[c];
        con.coeffs[0].entries.push_back({ri, rj, ri == rj ? -1.0 : -0.5});
        out.constraints.push_back(std::move(con));
      }
    }
  }
  if (gate) {
    auto con = blank();
    Mat t = Mat::Zero(p.n, p.n);
    for (int cl = 0; cl < p.nclasses; ++cl) {
      if (cl == p.identity_class || p.gate[cl] == 0.0) continue;
      auto [i, j] = rep[cl];
      double v = p.gate[cl] * (i == j ? 1.0 : 0.5);
      t(i, j) += v;
      if (i != j) t(j, i) += v;
    }
    con.coeffs[0] = sdp::SparseHerm::from_dense(t);
    con.coeffs[1].entries.push_back({0, 0, -1.0});
    con.rhs = p.gate_rhs - p.gate[p.identity_class];
    out.constraints.push_back(std::move(con));
  }
  out.validate();
  return out;
}

}  // namespace xot::moment
