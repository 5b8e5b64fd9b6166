#include "xot/dd_bounds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "xot/magic_square.hpp"

namespace xot::dd {
namespace {

using json = nlohmann::json;
using sdp::Constraint;
using sdp::SdpProblem;
using sdp::SparseHerm;

Mat unit(int dim, int r, int c) {
  Mat m = Mat::Zero(dim, dim);
  m(r, c) = 1.0;
  return m;
}

SparseHerm zero_coeff(int dim) { return SparseHerm{dim, {}}; }

Constraint make_row(const SdpProblem& p, double rhs) {
  Constraint con;
  con.rhs = rhs;
  for (const auto& b : p.blocks) con.coeffs.push_back(zero_coeff(b.dim));
  return con;
}

bool ensemble_has_imag(const std::vector<Mat>& mats) {
  for (const auto& m : mats) {
    if (m.imag().cwiseAbs().maxCoeff() > 1e-12) return true;
  }
  return false;
}

CheatBound solve_bound(std::string scenario, SdpProblem p, json metadata, double tol = 1e-8) {
  p.validate();
  CheatBound b;
  b.scenario = std::move(scenario);
  b.certificate = sdp::solve(p, tol);
  if (b.certificate.status != sdp::SolveStatus::Optimal) {
    throw std::runtime_error("cheat bound SDP did not reach optimality: " + b.scenario);
  }
  b.value = b.certificate.dual_value;
  metadata["blocks"] = p.blocks.size();
  metadata["constraints"] = p.constraints.size();
  b.metadata = std::move(metadata);
  b.problem = std::move(p);
  return b;
}

// qutrit protocol: the pair states (|00> + |22>)/sqrt2, (|11> + |22>)/sqrt2,
// (|00> + |11>)/sqrt2 indexed by Bob's choice trit, and the phase unitaries
// diag((-1)^x0, (-1)^x1, 1) Alice applies to the travelling qutrit
Vec qutrit_pair(int b) {
  auto ket2 = [](int i, int j) { return kron(basis_ket(3, i), basis_ket(3, j)); };
  Vec v;
  if (b == 0) v = ket2(0, 0) + ket2(2, 2);
  else if (b == 1) v = ket2(1, 1) + ket2(2, 2);
  else v = ket2(0, 0) + ket2(1, 1);
  return v / std::sqrt(2.0);
}

Mat phase_unitary3(int x0, int x1) {
  Mat u = Mat::Identity(3, 3);
  u(0, 0) = x0 ? -1.0 : 1.0;
  u(1, 1) = x1 ? -1.0 : 1.0;
  return u;
}

}  // namespace

json CheatBound::to_json() const {
  return json{{"scenario", scenario},
              {"value", value},
              {"metadata", metadata},
              {"problem", problem.to_json()},
              {"certificate", certificate.to_json()}};
}

SdpProblem build_state_discrimination(const std::vector<std::pair<double, Mat>>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  const int d = static_cast<int>(ensemble[0].second.rows());
  double psum = 0.0;
  std::vector<Mat> states;
  for (const auto& [prior, rho] : ensemble) {
    if (prior < -1e-12) throw std::invalid_argument("negative prior");
    if (rho.rows() != d || rho.cols() != d) throw std::invalid_argument("state dim mismatch");
    if (!is_hermitian(rho) || !is_psd(rho)) throw std::invalid_argument("state not a density matrix");
    if (std::abs(rho.trace().real() - 1.0) > 1e-9) throw std::invalid_argument("state trace != 1");
    psum += prior;
    states.push_back(rho);
  }
  if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("priors must sum to 1");

  SdpProblem p;
  for (size_t b = 0; b < ensemble.size(); ++b) {
    p.blocks.push_back({"E" + std::to_string(b), d});
    p.objective.push_back(SparseHerm::from_dense(ensemble[b].first * states[b]));
  }
  const bool cplx = ensemble_has_imag(states);
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) {
      Constraint row = make_row(p, r == c ? 1.0 : 0.0);
      for (size_t b = 0; b < ensemble.size(); ++b) row.coeffs[b].entries.push_back({r, c, 1.0});
      p.constraints.push_back(std::move(row));
      if (cplx && r < c) {
        Constraint irow = make_row(p, 0.0);
        for (size_t b = 0; b < ensemble.size(); ++b)
          irow.coeffs[b].entries.push_back({r, c, cx(0.0, 1.0)});
        p.constraints.push_back(std::move(irow));
      }
    }
  }
  p.validate();
  return p;
}

Mat choi(const std::function<Mat(const Mat&)>& channel, int d_in) {
  if (d_in <= 0) throw std::invalid_argument("input dim must be positive");
  int d_out = -1;
  Mat j;
  for (int r = 0; r < d_in; ++r) {
    for (int c = 0; c < d_in; ++c) {
      Mat out = channel(unit(d_in, r, c));
      if (out.rows() != out.cols()) throw std::invalid_argument("channel output not square");
      if (d_out < 0) {
        d_out = static_cast<int>(out.rows());
        j = Mat::Zero(d_out * d_in, d_out * d_in);
      } else if (out.rows() != d_out) {
        throw std::invalid_argument("channel output dim varies");
      }
      const double want = r == c ? 1.0 : 0.0;
      if (std::abs(out.trace() - cx(want, 0.0)) > 1e-9) {
        throw std::invalid_argument("channel is not trace preserving");
      }
      j += kron(out, unit(d_in, r, c));
    }
  }
  return j;
}

Mat choi_kraus(const std::vector<Mat>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("empty Kraus list");
  const int d_out = static_cast<int>(kraus[0].rows());
  const int d_in = static_cast<int>(kraus[0].cols());
  Mat comp = Mat::Zero(d_in, d_in);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) throw std::invalid_argument("Kraus dim mismatch");
    comp += k.adjoint() * k;
  }
  if ((comp - Mat::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("Kraus operators are not trace preserving");
  }
  Mat j = Mat::Zero(d_out * d_in, d_out * d_in);
  for (const auto& k : kraus) {
    Vec w = Vec::Zero(d_out * d_in);
    for (int i = 0; i < d_in; ++i) w += kron(Vec(k.col(i)), basis_ket(d_in, i));
    j += w * w.adjoint();
  }
  return j;
}

SdpProblem build_channel_discrimination(const std::vector<Mat>& chois,
                                        const std::vector<double>& priors, int d_out, int d_in) {
  if (chois.empty() || chois.size() != priors.size()) {
    throw std::invalid_argument("chois/priors size mismatch");
  }
  const int dd = d_out * d_in;
  double psum = 0.0;
  for (size_t b = 0; b < chois.size(); ++b) {
    if (chois[b].rows() != dd || chois[b].cols() != dd) throw std::invalid_argument("Choi dim mismatch");
    if (priors[b] < -1e-12) throw std::invalid_argument("negative prior");
    psum += priors[b];
  }
  if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("priors must sum to 1");

  SdpProblem p;
  for (size_t b = 0; b < chois.size(); ++b) {
    p.blocks.push_back({"Q" + std::to_string(b), dd});
    p.objective.push_back(SparseHerm::from_dense(priors[b] * chois[b]));
  }
  const int sig = static_cast<int>(p.blocks.size());
  p.blocks.push_back({"sigma", d_in});
  p.objective.push_back(zero_coeff(d_in));

  // sum_b Q_b = I_out (x) sigma, entrywise; the sigma side of entry (r, c)
  // is -Tr_out of the entry pattern
  const bool cplx = ensemble_has_imag(chois);
  auto push_entry_row = [&](int r, int c, cx v) {
    Constraint row = make_row(p, 0.0);
    for (int b = 0; b < sig; ++b) row.coeffs[b].entries.push_back({r, c, v});
    Mat pattern = Mat::Zero(dd, dd);
    pattern(r, c) = v;
    if (r != c) pattern(c, r) = std::conj(v);
    Mat ptr = Mat::Zero(d_in, d_in);
    for (int y = 0; y < d_out; ++y) {
      ptr += pattern.block(y * d_in, y * d_in, d_in, d_in);
    }
    row.coeffs[sig] = SparseHerm::from_dense(-ptr);
    row.coeffs[sig].dim = d_in;
    p.constraints.push_back(std::move(row));
  };
  for (int r = 0; r < dd; ++r) {
    for (int c = r; c < dd; ++c) {
      push_entry_row(r, c, 1.0);
      if (cplx && r < c) push_entry_row(r, c, cx(0.0, 1.0));
    }
  }
  Constraint tr = make_row(p, 1.0);
  for (int i = 0; i < d_in; ++i) tr.coeffs[sig].entries.push_back({i, i, 1.0});
  p.constraints.push_back(std::move(tr));
  p.validate();
  return p;
}

CheatBound protocol3_alice_trusted(double tol) {
  std::vector<std::pair<double, Mat>> ensemble;
  for (int b = 0; b < 3; ++b) {
    Vec psi = qutrit_pair(b);
    Operator pair = make_operator({{"travel", 3}, {"keep", 3}}, psi * psi.adjoint());
    ensemble.emplace_back(1.0 / 3.0, partial_trace(pair, {"keep"}).mat);
  }
  return solve_bound("protocol3-alice-trusted", build_state_discrimination(ensemble),
                     json{{"kind", "state-discrimination"}, {"dim", 3}}, tol);
}

CheatBound protocol3_bob_trusted(double tol) {
  std::vector<Mat> chois;
  for (int x0 = 0; x0 < 2; ++x0) {
    for (int x1 = 0; x1 < 2; ++x1) {
      chois.push_back(choi_kraus({phase_unitary3(x0, x1)}));
    }
  }
  return solve_bound("protocol3-bob-trusted",
                     build_channel_discrimination(chois, {0.25, 0.25, 0.25, 0.25}, 3, 3),
                     json{{"kind", "channel-discrimination"}, {"dims", {3, 3}}}, tol);
}

CheatBound protocol4_alice_trusted(double tol) {
  Vec psi = ms::ideal_state();
  Mat state = psi * psi.adjoint();
  std::vector<std::pair<double, Mat>> ensemble;
  for (int b = 0; b < 3; ++b) {
    Mat rho = Mat::Zero(16, 16);
    for (int y = 0; y < 4; ++y) {
      Mat n = ms::bob_measurement(b, y);
      Mat meas = kron(Mat::Identity(4, 4), n) * state * kron(Mat::Identity(4, 4), n);
      Operator op = make_operator({{"alice", 4}, {"bob", 4}}, meas);
      rho += kron(partial_trace(op, {"bob"}).mat, unit(4, y, y));
    }
    ensemble.emplace_back(1.0 / 3.0, rho);
  }
  return solve_bound("protocol4-alice-trusted", build_state_discrimination(ensemble),
                     json{{"kind", "state-discrimination"}, {"dim", 16}}, tol);
}

CheatBound protocol4_alice_untrusted(double tol) {
  std::vector<Mat> chois;
  for (int b = 0; b < 3; ++b) {
    auto channel = [b](const Mat& s) {
      Mat out = Mat::Zero(4, 4);
      for (int y = 0; y < 4; ++y) {
        out += (ms::bob_measurement(b, y) * s).trace() * unit(4, y, y);
      }
      return out;
    };
    chois.push_back(choi(channel, 4));
  }
  return solve_bound("protocol4-alice-untrusted",
                     build_channel_discrimination(chois, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 4, 4),
                     json{{"kind", "channel-discrimination"}, {"dims", {4, 4}}}, tol);
}

BobCheatOperators bob_cheat_operators() {
  BobCheatOperators ops;
  ops.space = {{"a", 3}, {"x0", 2}, {"y0", 2}, {"x1", 2}, {"y1", 2}, {"g", 4}};
  ops.state_space = {{"a", 3}, {"x0", 2}, {"y0", 2}, {"x1", 2}, {"y1", 2}};
  const int D = total_dim(ops.space);

  // basis change sending Alice's rank-1 measurement for question a to the
  // computational basis; columns are the measurement vectors with the largest
  // entry rotated to be real positive, which also makes them real
  std::vector<Mat> ua(3);
  for (int a = 0; a < 3; ++a) {
    Mat basis(4, 4);
    for (int x = 0; x < 4; ++x) {
      Eigen::SelfAdjointEigenSolver<Mat> es(ms::alice_measurement(a, x));
      Vec v = es.eigenvectors().col(3);
      int k = 0;
      for (int i = 1; i < 4; ++i) {
        if (std::abs(v(i)) > std::abs(v(k))) k = i;
      }
      v *= std::conj(v(k)) / std::abs(v(k));
      basis.col(x) = v;
    }
    if (!is_unitary(basis)) throw std::runtime_error("measurement basis not unitary");
    ua[a] = basis.adjoint();
    if (ua[a].imag().cwiseAbs().maxCoeff() > kStructTol) {
      throw std::runtime_error("measurement basis not real");
    }
    for (int x = 0; x < 4; ++x) {
      Mat rot = ua[a] * ms::alice_measurement(a, x) * ua[a].adjoint();
      if ((rot - unit(4, x, x)).cwiseAbs().maxCoeff() > kStructTol) {
        throw std::runtime_error("basis change does not diagonalize measurement");
      }
    }
  }

  // answers Alice rejects when her outcome is 000: the trit she reveals is 1,
  // i.e. (y0, y1, a) in {(1,0,0), (0,1,1), (0,0,2)} or y0 = y1 = 1
  Mat reject_pattern = Mat::Zero(D, D);
  const int cells[3][3] = {{1, 0, 0}, {0, 1, 1}, {0, 0, 2}};
  for (const auto& cell : cells) {
    reject_pattern += embed(ops.space, {{"y0", unit(2, cell[0], cell[0])},
                                        {"y1", unit(2, cell[1], cell[1])},
                                        {"a", unit(3, cell[2], cell[2])}})
                          .mat;
  }
  reject_pattern += embed(ops.space, {{"y0", unit(2, 1, 1)}, {"y1", unit(2, 1, 1)}}).mat;

  auto proj_x = [&](int x0, int x1) {
    return embed(ops.space, {{"x0", unit(2, x0, x0)}, {"x1", unit(2, x1, x1)}}).mat;
  };
  auto proj_g = [&](int g) { return embed(ops.space, {{"g", unit(4, g, g)}}).mat; };

  Mat px00 = proj_x(0, 0);
  Mat rej = px00 * reject_pattern;
  Mat g_not0 = Mat::Identity(D, D) - proj_g(0);
  rej += px00 * (Mat::Identity(D, D) - reject_pattern) * g_not0;
  for (int x = 1; x < 4; ++x) {
    for (int g = 0; g < 4; ++g) {
      if (g == x) continue;
      rej += proj_x(x / 2, x % 2) * proj_g(g);
    }
  }
  if (!is_projector(rej)) throw std::runtime_error("reject operator not a projector");

  Mat u = Mat::Zero(D, D);
  for (int a = 0; a < 3; ++a) {
    Mat pa = unit(3, a, a);
    for (int xp = 0; xp < 4; ++xp) {
      for (int x = 0; x < 4; ++x) {
        cx v = ua[a](xp, x);
        if (std::abs(v) < 1e-15) continue;
        u += v * embed(ops.space, {{"a", pa},
                                   {"x0", unit(2, xp / 2, x / 2)},
                                   {"x1", unit(2, xp % 2, x % 2)}})
                     .mat;
      }
    }
  }
  if (!is_unitary(u)) throw std::runtime_error("expanded basis change not unitary");

  ops.accept = u.adjoint() * (Mat::Identity(D, D) - rej) * u;
  if (ops.accept.imag().cwiseAbs().maxCoeff() > kStructTol) {
    throw std::runtime_error("acceptance operator not real");
  }
  if (!is_projector(ops.accept)) throw std::runtime_error("acceptance operator not a projector");

  for (int a = 0; a < 3; ++a) {
    for (int y0 = 0; y0 < 2; ++y0) {
      for (int y1 = 0; y1 < 2; ++y1) {
        for (int g = 0; g < 4; ++g) {
          std::array<int, 4> ix{};
          for (int x = 0; x < 4; ++x) {
            ix[x] = ((((a * 2 + x / 2) * 2 + y0) * 2 + x % 2) * 2 + y1) * 4 + g;
          }
          Mat blk(4, 4);
          for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) blk(r, c) = ops.accept(ix[r], ix[c]);
          }
          ops.block_index.push_back(ix);
          ops.block_accept.push_back(blk);
        }
      }
    }
  }
  return ops;
}

namespace {

const BobCheatOperators& cached_bob_ops() {
  static const BobCheatOperators ops = bob_cheat_operators();
  return ops;
}

// diagonal-block form: one 4x4 variable per classical (a, y0, y1, g) plus the
// pre-measurement marginals rho1[y0, y1], tied by sum_g rho2 = rho1 / 3
SdpProblem bob_problem_reduced(const BobCheatOperators& ops, bool trusted) {
  SdpProblem p;
  auto blk2 = [](int a, int y0, int y1, int g) { return ((a * 2 + y0) * 2 + y1) * 4 + g; };
  for (int a = 0; a < 3; ++a) {
    for (int y0 = 0; y0 < 2; ++y0) {
      for (int y1 = 0; y1 < 2; ++y1) {
        for (int g = 0; g < 4; ++g) {
          p.blocks.push_back({"rho2[" + std::to_string(a) + "," + std::to_string(y0) + "," +
                                  std::to_string(y1) + "," + std::to_string(g) + "]",
                              4});
          p.objective.push_back(SparseHerm::from_dense(ops.block_accept[blk2(a, y0, y1, g)]));
        }
      }
    }
  }
  const int r1base = static_cast<int>(p.blocks.size());
  auto blk1 = [&](int y0, int y1) { return r1base + y0 * 2 + y1; };
  for (int y0 = 0; y0 < 2; ++y0) {
    for (int y1 = 0; y1 < 2; ++y1) {
      p.blocks.push_back({"rho1[" + std::to_string(y0) + "," + std::to_string(y1) + "]", 4});
      p.objective.push_back(zero_coeff(4));
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int y0 = 0; y0 < 2; ++y0) {
      for (int y1 = 0; y1 < 2; ++y1) {
        for (int r = 0; r < 4; ++r) {
          for (int c = r; c < 4; ++c) {
            Constraint row = make_row(p, 0.0);
            for (int g = 0; g < 4; ++g) {
              row.coeffs[blk2(a, y0, y1, g)].entries.push_back({r, c, 1.0});
            }
            row.coeffs[blk1(y0, y1)].entries.push_back({r, c, -1.0 / 3.0});
            p.constraints.push_back(std::move(row));
          }
        }
      }
    }
  }
  if (trusted) {
    for (int r = 0; r < 4; ++r) {
      for (int c = r; c < 4; ++c) {
        Constraint row = make_row(p, r == c ? 0.25 : 0.0);
        for (int y = 0; y < 4; ++y) row.coeffs[r1base + y].entries.push_back({r, c, 1.0});
        p.constraints.push_back(std::move(row));
      }
    }
  } else {
    Constraint row = make_row(p, 1.0);
    for (int y = 0; y < 4; ++y) {
      for (int i = 0; i < 4; ++i) row.coeffs[r1base + y].entries.push_back({i, i, 1.0});
    }
    p.constraints.push_back(std::move(row));
  }
  return p;
}

// unrestricted form: Hermitian rho2 on the whole space and rho1 on
// (x0, y0, x1, y1), tied by Tr_g rho2 = I_a (x) rho1 / 3
SdpProblem bob_problem_full(const BobCheatOperators& ops, bool trusted) {
  const int D = total_dim(ops.space);
  const int S = total_dim(ops.state_space);
  SdpProblem p;
  p.blocks.push_back({"rho2", D, true});
  p.objective.push_back(SparseHerm::from_dense(ops.accept));
  p.blocks.push_back({"rho1", 16, true});
  p.objective.push_back(zero_coeff(16));

  auto push_tie_row = [&](int r, int c, cx v) {
    Constraint row = make_row(p, 0.0);
    for (int g = 0; g < 4; ++g) row.coeffs[0].entries.push_back({r * 4 + g, c * 4 + g, v});
    if (r / 16 == c / 16) {
      const int sr = r % 16, sc = c % 16;
      // r <= c with equal leading trit implies sr <= sc
      row.coeffs[1].entries.push_back({sr, sc, -v / 3.0});
    }
    p.constraints.push_back(std::move(row));
  };
  for (int r = 0; r < S; ++r) {
    for (int c = r; c < S; ++c) {
      push_tie_row(r, c, 1.0);
      if (r < c) push_tie_row(r, c, cx(0.0, 1.0));
    }
  }
  if (trusted) {
    auto s_index = [](int x0, int y0, int x1, int y1) {
      return ((x0 * 2 + y0) * 2 + x1) * 2 + y1;
    };
    for (int u = 0; u < 4; ++u) {
      for (int v = u; v < 4; ++v) {
        for (int im = 0; im < (u < v ? 2 : 1); ++im) {
          Mat pat = Mat::Zero(16, 16);
          const cx w = im ? cx(0.0, 1.0) : cx(1.0, 0.0);
          for (int y0 = 0; y0 < 2; ++y0) {
            for (int y1 = 0; y1 < 2; ++y1) {
              pat(s_index(u / 2, y0, u % 2, y1), s_index(v / 2, y0, v % 2, y1)) += w;
            }
          }
          Mat herm = 0.5 * (pat + pat.adjoint());
          Constraint row = make_row(p, (u == v && !im) ? 0.25 : 0.0);
          row.coeffs[1] = SparseHerm::from_dense(herm);
          row.coeffs[1].dim = 16;
          p.constraints.push_back(std::move(row));
        }
      }
    }
  } else {
    Constraint row = make_row(p, 1.0);
    for (int i = 0; i < 16; ++i) row.coeffs[1].entries.push_back({i, i, 1.0});
    p.constraints.push_back(std::move(row));
  }
  return p;
}

}  // namespace

CheatBound protocol4_bob(bool trusted, bool full, double tol) {
  const BobCheatOperators& ops = cached_bob_ops();
  SdpProblem p = full ? bob_problem_full(ops, trusted) : bob_problem_reduced(ops, trusted);
  std::string scenario = std::string("protocol4-bob-") + (trusted ? "trusted" : "untrusted");
  if (full) scenario += "-full";
  return solve_bound(std::move(scenario), std::move(p),
                     json{{"kind", "first-measurement"},
                          {"trusted", trusted},
                          {"reduced", !full},
                          {"space_dim", total_dim(ops.space)}}, tol);
}

}  // namespace xot::dd
