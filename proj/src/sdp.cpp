#include "xot/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace xot::sdp {

using nlohmann::json;

SparseHerm SparseHerm::from_dense(const Mat& m, double drop_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("from_dense: not square");
  SparseHerm out;
  out.dim = static_cast<int>(m.rows());
  for (int r = 0; r < out.dim; ++r) {
    for (int c = r; c < out.dim; ++c) {
      cx v = (r == c) ? cx(m(r, c).real(), 0.0) : 0.5 * (m(r, c) + std::conj(m(c, r)));
      if (std::abs(v) > drop_tol) out.entries.push_back({r, c, v});
    }
  }
  return out;
}

Mat SparseHerm::dense() const {
  Mat m = Mat::Zero(dim, dim);
  for (const auto& e : entries) {
    m(e.r, e.c) += e.v;
    if (e.r != e.c) m(e.c, e.r) += std::conj(e.v);
  }
  return m;
}

bool SparseHerm::has_imag(double tol) const {
  for (const auto& e : entries) {
    if (e.r != e.c && std::abs(e.v.imag()) > tol) return true;
  }
  return false;
}

void SdpProblem::validate() const {
  const size_t nb = blocks.size();
  if (objective.size() != nb) throw std::invalid_argument("objective/block count mismatch");
  for (size_t k = 0; k < nb; ++k) {
    if (blocks[k].dim <= 0) throw std::invalid_argument("block dim must be positive");
    if (objective[k].dim != blocks[k].dim) throw std::invalid_argument("objective dim mismatch");
  }
  for (const auto& con : constraints) {
    if (con.coeffs.size() != nb) throw std::invalid_argument("constraint/block count mismatch");
    for (size_t k = 0; k < nb; ++k) {
      if (con.coeffs[k].dim != blocks[k].dim) throw std::invalid_argument("constraint dim mismatch");
    }
  }
  // Hermiticity is structural for SparseHerm except for diagonal entries,
  // which from_dense already realifies; nothing further to check here
}

namespace {

json herm_to_json(const SparseHerm& s) {
  json entries = json::array();
  for (const auto& e : s.entries) entries.push_back({e.r, e.c, e.v.real(), e.v.imag()});
  return json{{"dim", s.dim}, {"entries", entries}};
}

SparseHerm herm_from_json(const json& j) {
  SparseHerm s;
  s.dim = j.at("dim").get<int>();
  for (const auto& e : j.at("entries")) {
    s.entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                         cx(e.at(2).get<double>(), e.at(3).get<double>())});
  }
  return s;
}

json mat_to_json(const Mat& m) {
  // dense upper triangle, row by row, [re, im] pairs
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = r; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return json{{"dim", m.rows()}, {"upper", rows}};
}

Mat mat_from_json(const json& j) {
  int d = j.at("dim").get<int>();
  Mat m = Mat::Zero(d, d);
  const auto& rows = j.at("upper");
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) {
      const auto& e = rows.at(r).at(c - r);
      m(r, c) = cx(e.at(0).get<double>(), e.at(1).get<double>());
      if (c != r) m(c, r) = std::conj(m(r, c));
    }
  }
  return m;
}

}  // namespace

json SdpProblem::to_json() const {
  json jblocks = json::array();
  for (size_t k = 0; k < blocks.size(); ++k) {
    bool cplx = blocks[k].force_complex || objective[k].has_imag();
    for (const auto& con : constraints) cplx = cplx || con.coeffs[k].has_imag();
    jblocks.push_back({{"name", blocks[k].name}, {"dim", blocks[k].dim}, {"complex", cplx}});
  }
  json jobj = json::object();
  for (size_t k = 0; k < blocks.size(); ++k) jobj[blocks[k].name] = mat_to_json(objective[k].dense());
  json jcons = json::array();
  for (const auto& con : constraints) {
    json coeffs = json::object();
    for (size_t k = 0; k < blocks.size(); ++k) {
      if (!con.coeffs[k].entries.empty()) coeffs[blocks[k].name] = herm_to_json(con.coeffs[k]);
    }
    jcons.push_back({{"coeffs", coeffs}, {"rhs", con.rhs}});
  }
  return json{{"blocks", jblocks}, {"objective", jobj}, {"constraints", jcons}, {"sense", "maximize"}};
}

SdpProblem SdpProblem::from_json(const json& j) {
  SdpProblem p;
  for (const auto& jb : j.at("blocks")) {
    p.blocks.push_back({jb.at("name").get<std::string>(), jb.at("dim").get<int>(),
                        jb.value("complex", false)});
  }
  for (const auto& b : p.blocks) {
    p.objective.push_back(SparseHerm::from_dense(mat_from_json(j.at("objective").at(b.name))));
  }
  for (const auto& jc : j.at("constraints")) {
    Constraint con;
    con.rhs = jc.at("rhs").get<double>();
    for (const auto& b : p.blocks) {
      if (jc.at("coeffs").contains(b.name)) {
        con.coeffs.push_back(herm_from_json(jc.at("coeffs").at(b.name)));
      } else {
        SparseHerm empty;
        empty.dim = b.dim;
        con.coeffs.push_back(empty);
      }
    }
    p.constraints.push_back(std::move(con));
  }
  p.validate();
  return p;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

json SdpSolution::to_json() const {
  json jp = json::array();
  for (const auto& m : primal) jp.push_back(mat_to_json(m));
  return json{{"status", to_string(status)}, {"primal", jp},        {"dual", dual},
              {"primal_value", primal_value}, {"dual_value", dual_value},
              {"gap", gap},                   {"iterations", iterations},
              {"wall_time", wall_time},       {"warnings", warnings}};
}

SdpSolution SdpSolution::from_json(const json& j) {
  SdpSolution s;
  std::string st = j.at("status").get<std::string>();
  if (st == "optimal") s.status = SolveStatus::Optimal;
  else if (st == "infeasible") s.status = SolveStatus::Infeasible;
  else if (st == "unbounded") s.status = SolveStatus::Unbounded;
  else s.status = SolveStatus::NumericalFailure;
  for (const auto& jm : j.at("primal")) s.primal.push_back(mat_from_json(jm));
  s.dual = j.at("dual").get<std::vector<double>>();
  s.primal_value = j.at("primal_value").get<double>();
  s.dual_value = j.at("dual_value").get<double>();
  s.gap = j.at("gap").get<double>();
  s.iterations = j.at("iterations").get<int>();
  s.wall_time = j.at("wall_time").get<double>();
  if (j.contains("warnings")) s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

namespace {

// internal real symmetric form: complex blocks doubled via hermitian_to_real
struct RealProblem {
  std::vector<int> dims;
  std::vector<bool> was_complex;
  std::vector<RMat> obj;
  struct Entry {
    int blk, p, q;
    double v;
  };
  std::vector<std::vector<Entry>> rows;  // full entry lists (both triangles)
  std::vector<double> rhs;
};

std::vector<RealProblem::Entry> sparsify(int blk, const RMat& m) {
  std::vector<RealProblem::Entry> out;
  for (int p = 0; p < m.rows(); ++p) {
    for (int q = 0; q < m.cols(); ++q) {
      if (std::abs(m(p, q)) > 1e-14) out.push_back({blk, p, q, m(p, q)});
    }
  }
  return out;
}

RMat realize(const SparseHerm& s, bool cplx) {
  Mat d = s.dense();
  if (!cplx) return d.real();
  return 0.5 * hermitian_to_real(d);
}

RealProblem build_real(const SdpProblem& p) {
  const size_t nb = p.blocks.size();
  std::vector<bool> cplx(nb, false);
  for (size_t k = 0; k < nb; ++k) {
    cplx[k] = p.blocks[k].force_complex || p.objective[k].has_imag();
    for (const auto& con : p.constraints) cplx[k] = cplx[k] || con.coeffs[k].has_imag();
  }
  RealProblem rp;
  rp.was_complex.assign(cplx.begin(), cplx.end());
  for (size_t k = 0; k < nb; ++k) {
    rp.dims.push_back(cplx[k] ? 2 * p.blocks[k].dim : p.blocks[k].dim);
    rp.obj.push_back(realize(p.objective[k], cplx[k]));
  }
  for (const auto& con : p.constraints) {
    std::vector<RealProblem::Entry> row;
    for (size_t k = 0; k < nb; ++k) {
      if (con.coeffs[k].entries.empty()) continue;
      auto part = sparsify(static_cast<int>(k), realize(con.coeffs[k], cplx[k]));
      row.insert(row.end(), part.begin(), part.end());
    }
    rp.rows.push_back(std::move(row));
    rp.rhs.push_back(con.rhs);
  }
  return rp;
}

double sparse_dot_dense(const std::vector<RealProblem::Entry>& row, const std::vector<RMat>& mats) {
  double acc = 0.0;
  for (const auto& e : row) acc += e.v * mats[e.blk](e.p, e.q);
  return acc;
}

// rank-revealing pass over the constraint Gram matrix; returns kept row indices
// and flags inconsistent dependencies as infeasibility
struct Presolve {
  std::vector<int> kept;
  std::vector<std::string> warnings;
  bool inconsistent = false;
};

Presolve presolve_rows(const RealProblem& rp) {
  Presolve out;
  const int m = static_cast<int>(rp.rows.size());
  if (m == 0) return out;
  int total = 0;
  std::vector<int> offs;
  for (int d : rp.dims) {
    offs.push_back(total);
    total += d * d;
  }
  RMat gram(m, m);
  Eigen::VectorXd scatter = Eigen::VectorXd::Zero(total);
  for (int i = 0; i < m; ++i) {
    for (const auto& e : rp.rows[i]) scatter(offs[e.blk] + e.p * rp.dims[e.blk] + e.q) += e.v;
    for (int j = i; j < m; ++j) {
      double acc = 0.0;
      for (const auto& e : rp.rows[j]) acc += e.v * scatter(offs[e.blk] + e.p * rp.dims[e.blk] + e.q);
      gram(i, j) = acc;
      gram(j, i) = acc;
    }
    for (const auto& e : rp.rows[i]) scatter(offs[e.blk] + e.p * rp.dims[e.blk] + e.q) = 0.0;
  }

  RMat lower = RMat::Zero(m, m);  // cholesky factor of the kept-row gram
  std::vector<double> kept_rhs;
  for (int i = 0; i < m; ++i) {
    const int r = static_cast<int>(out.kept.size());
    Eigen::VectorXd g(r);
    for (int t = 0; t < r; ++t) g(t) = gram(i, out.kept[t]);
    Eigen::VectorXd w(r);
    for (int t = 0; t < r; ++t) {
      double acc = g(t);
      for (int s = 0; s < t; ++s) acc -= lower(t, s) * w(s);
      w(t) = acc / lower(t, t);
    }
    double res = gram(i, i) - w.squaredNorm();
    double scale = std::max(gram(i, i), 1e-12);
    if (res > 1e-12 * scale) {
      lower.row(r).head(r) = w.transpose();
      lower(r, r) = std::sqrt(std::max(res, 0.0));
      out.kept.push_back(i);
      kept_rhs.push_back(rp.rhs[i]);
    } else {
      // row i = sum lambda_t * kept rows; lambda from the normal equations
      Eigen::VectorXd lambda(r);
      for (int t = r - 1; t >= 0; --t) {
        double acc = w(t);
        for (int s = t + 1; s < r; ++s) acc -= lower(s, t) * lambda(s);
        lambda(t) = acc / lower(t, t);
      }
      double implied = 0.0;
      for (int t = 0; t < r; ++t) implied += lambda(t) * kept_rhs[t];
      if (std::abs(implied - rp.rhs[i]) > 1e-8 * (1.0 + std::abs(rp.rhs[i]))) {
        out.inconsistent = true;
        out.warnings.push_back("constraint " + std::to_string(i) +
                               " contradicts earlier rows (rhs " + std::to_string(rp.rhs[i]) +
                               " vs implied " + std::to_string(implied) + ")");
      } else {
        out.warnings.push_back("dropped dependent constraint " + std::to_string(i));
      }
    }
  }
  return out;
}

struct Scaling {
  std::vector<RMat> w;      // NT scaling matrix per block
  std::vector<RMat> zinv;   // Z^-1 per block
};

RMat sym_sqrt(const RMat& m, bool invert) {
  Eigen::SelfAdjointEigenSolver<RMat> es(m);
  double floor = std::max(es.eigenvalues().maxCoeff(), 1e-100) * 1e-14;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  Eigen::VectorXd root = ev.cwiseSqrt();
  if (invert) root = root.cwiseInverse();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Scaling nt_scaling(const std::vector<RMat>& x, const std::vector<RMat>& z) {
  Scaling s;
  for (size_t k = 0; k < x.size(); ++k) {
    RMat sx = sym_sqrt(x[k], false);
    RMat inner = sym_sqrt(sx * z[k] * sx, true);
    s.w.push_back(sx * inner * sx);
    Eigen::SelfAdjointEigenSolver<RMat> es(z[k]);
    double floor = std::max(es.eigenvalues().maxCoeff(), 1e-100) * 1e-14;
    s.zinv.push_back(es.eigenvectors() *
                     es.eigenvalues().cwiseMax(floor).cwiseInverse().asDiagonal() *
                     es.eigenvectors().transpose());
  }
  return s;
}

// largest step alpha with m + alpha*dm staying positive semidefinite
double step_to_boundary(const RMat& m, const RMat& dm) {
  Eigen::LLT<RMat> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  RMat l = llt.matrixL();
  RMat scaled = l.template triangularView<Eigen::Lower>().solve(dm);
  scaled = l.template triangularView<Eigen::Lower>().solve(scaled.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (scaled + scaled.transpose()));
  double lo = es.eigenvalues().minCoeff();
  if (lo >= -1e-14) return 1e30;
  return -1.0 / lo;
}

struct Residuals {
  Eigen::VectorXd rp;
  std::vector<RMat> rd;
  double pres = 0.0, dres = 0.0;
};

}  // namespace

SdpSolution solve(const SdpProblem& p, double tol, int max_iter) {
  auto t0 = std::chrono::steady_clock::now();
  p.validate();
  SdpSolution sol;
  RealProblem rp = build_real(p);
  Presolve pre = presolve_rows(rp);
  sol.warnings = pre.warnings;
  const int m_orig = static_cast<int>(rp.rows.size());
  if (pre.inconsistent) {
    sol.status = SolveStatus::Infeasible;
    sol.dual.assign(m_orig, 0.0);
    return sol;
  }
  std::vector<std::vector<RealProblem::Entry>> rows;
  Eigen::VectorXd b(pre.kept.size());
  for (size_t t = 0; t < pre.kept.size(); ++t) {
    rows.push_back(rp.rows[pre.kept[t]]);
    b(static_cast<Eigen::Index>(t)) = rp.rhs[pre.kept[t]];
  }
  const int m = static_cast<int>(rows.size());
  const size_t nb = rp.dims.size();
  double ndim = 0.0;
  for (int d : rp.dims) ndim += d;

  double obj_scale = 1.0;
  for (const auto& o : rp.obj) obj_scale = std::max(obj_scale, o.cwiseAbs().maxCoeff());
  double rhs_scale = (m > 0) ? std::max(1.0, b.cwiseAbs().maxCoeff()) : 1.0;

  std::vector<RMat> X, Z;
  for (int d : rp.dims) {
    X.push_back(rhs_scale * RMat::Identity(d, d));
    Z.push_back(obj_scale * RMat::Identity(d, d));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  auto primal_value = [&]() {
    double v = 0.0;
    for (size_t k = 0; k < nb; ++k) v += (rp.obj[k].array() * X[k].array()).sum();
    return v;
  };
  auto residuals = [&]() {
    Residuals r;
    r.rp.resize(m);
    for (int i = 0; i < m; ++i) r.rp(i) = b(i) - sparse_dot_dense(rows[i], X);
    for (size_t k = 0; k < nb; ++k) r.rd.push_back(rp.obj[k] + Z[k]);
    for (int i = 0; i < m; ++i) {
      for (const auto& e : rows[i]) r.rd[e.blk](e.p, e.q) -= y(i) * e.v;
    }
    r.pres = (m > 0) ? r.rp.cwiseAbs().maxCoeff() / rhs_scale : 0.0;
    r.dres = 0.0;
    for (const auto& d : r.rd) r.dres = std::max(r.dres, d.cwiseAbs().maxCoeff() / obj_scale);
    return r;
  };

  sol.status = SolveStatus::NumericalFailure;
  int it = 0;
  for (; it < max_iter; ++it) {
    Residuals res = residuals();
    double mu = 0.0;
    for (size_t k = 0; k < nb; ++k) mu += (X[k].array() * Z[k].array()).sum();
    mu /= ndim;
    double pval = primal_value();
    double dval = b.dot(y);
    double gap = std::abs(pval - dval);

    if (res.pres <= tol && res.dres <= tol && gap <= tol * (1.0 + std::abs(pval) + std::abs(dval))) {
      sol.status = SolveStatus::Optimal;
      break;
    }
    if (pval > 1e9 * obj_scale * rhs_scale && res.pres <= 1e-6) {
      sol.status = SolveStatus::Unbounded;
      break;
    }
    if (dval < -1e9 * obj_scale * rhs_scale && res.dres <= 1e-6) {
      sol.status = SolveStatus::Infeasible;
      break;
    }
    if (!std::isfinite(mu) || mu > 1e30) break;

    Scaling sc = nt_scaling(X, Z);

    // schur complement M_ij = <C_i, W C_j W>
    RMat schur = RMat::Zero(m, m);
    std::vector<RMat> wcjw(nb);
    for (int j = 0; j < m; ++j) {
      for (size_t k = 0; k < nb; ++k) wcjw[k].setZero(rp.dims[k], rp.dims[k]);
      for (const auto& e : rows[j]) {
        wcjw[e.blk].noalias() += e.v * (sc.w[e.blk].col(e.p) * sc.w[e.blk].row(e.q));
      }
      for (int i = 0; i <= j; ++i) {
        double acc = 0.0;
        for (const auto& e : rows[i]) acc += e.v * wcjw[e.blk](e.p, e.q);
        schur(i, j) = acc;
        schur(j, i) = acc;
      }
    }
    Eigen::LDLT<RMat> schur_fac(schur + 1e-13 * rhs_scale * RMat::Identity(m, m));

    auto solve_newton = [&](const std::vector<RMat>& rc, Eigen::VectorXd& dy,
                            std::vector<RMat>& dx, std::vector<RMat>& dz) {
      // rhs_i = <C_i, rc + W rd W> - rp_i ; M dy = rhs
      Eigen::VectorXd rhs(m);
      std::vector<RMat> wrw(nb);
      for (size_t k = 0; k < nb; ++k) {
        wrw[k] = rc[k] + sc.w[k] * res.rd[k] * sc.w[k];
      }
      for (int i = 0; i < m; ++i) rhs(i) = sparse_dot_dense(rows[i], wrw) - res.rp(i);
      dy = schur_fac.solve(rhs);
      dz.clear();
      dx.clear();
      for (size_t k = 0; k < nb; ++k) {
        RMat adj = -res.rd[k];
        dz.push_back(adj);
      }
      for (int i = 0; i < m; ++i) {
        for (const auto& e : rows[i]) dz[e.blk](e.p, e.q) += dy(i) * e.v;
      }
      for (size_t k = 0; k < nb; ++k) {
        RMat d = rc[k] - sc.w[k] * dz[k] * sc.w[k];
        dx.push_back(0.5 * (d + d.transpose()));
      }
    };

    // predictor: aim at mu' = 0
    std::vector<RMat> rc;
    for (size_t k = 0; k < nb; ++k) rc.push_back(-X[k]);
    Eigen::VectorXd dy_a;
    std::vector<RMat> dx_a, dz_a;
    solve_newton(rc, dy_a, dx_a, dz_a);
    double ap = 1e30, ad = 1e30;
    for (size_t k = 0; k < nb; ++k) {
      ap = std::min(ap, step_to_boundary(X[k], dx_a[k]));
      ad = std::min(ad, step_to_boundary(Z[k], dz_a[k]));
    }
    double tau = 0.98;
    double ap_a = std::min(1.0, tau * ap);
    double ad_a = std::min(1.0, tau * ad);
    double mu_aff = 0.0;
    for (size_t k = 0; k < nb; ++k) {
      mu_aff += ((X[k] + ap_a * dx_a[k]).array() * (Z[k] + ad_a * dz_a[k]).array()).sum();
    }
    mu_aff = std::max(mu_aff / ndim, 0.0);
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::min(std::max(sigma, 1e-6), 1.0);

    // corrector recentres toward sigma * mu
    for (size_t k = 0; k < nb; ++k) {
      rc[k] = sigma * mu * sc.zinv[k] - X[k];
    }
    Eigen::VectorXd dy;
    std::vector<RMat> dx, dz;
    solve_newton(rc, dy, dx, dz);
    ap = 1e30;
    ad = 1e30;
    for (size_t k = 0; k < nb; ++k) {
      ap = std::min(ap, step_to_boundary(X[k], dx[k]));
      ad = std::min(ad, step_to_boundary(Z[k], dz[k]));
    }
    double ap_c = std::min(1.0, tau * ap);
    double ad_c = std::min(1.0, tau * ad);
    if (ap_c <= 1e-12 || ad_c <= 1e-12) break;
    for (size_t k = 0; k < nb; ++k) {
      X[k] += ap_c * dx[k];
      X[k] = 0.5 * (X[k] + X[k].transpose()).eval();
      Z[k] += ad_c * dz[k];
      Z[k] = 0.5 * (Z[k] + Z[k].transpose()).eval();
    }
    y += ad_c * dy;
  }

  sol.iterations = it;
  sol.primal_value = primal_value();
  sol.dual_value = b.dot(y);
  sol.gap = std::abs(sol.primal_value - sol.dual_value);

  // map the primal back to the original (possibly complex) blocks
  for (size_t k = 0; k < nb; ++k) {
    if (!rp.was_complex[k]) {
      sol.primal.push_back(X[k].cast<cx>());
    } else {
      int d = p.blocks[k].dim;
      Mat xc(d, d);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          double re = 0.5 * (X[k](r, c) + X[k](d + r, d + c));
          double im = 0.5 * (X[k](d + r, c) - X[k](r, d + c));
          xc(r, c) = cx(re, im);
        }
      }
      sol.primal.push_back(0.5 * (xc + xc.adjoint()));
    }
  }
  sol.dual.assign(m_orig, 0.0);
  for (size_t t = 0; t < pre.kept.size(); ++t) sol.dual[pre.kept[t]] = y(static_cast<Eigen::Index>(t));
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

bool VerifyReport::ok(double tol) const {
  return primal_residual <= tol && primal_min_eig >= -tol && dual_min_eig >= -tol && gap <= tol;
}

json VerifyReport::to_json() const {
  return json{{"primal_residual", primal_residual}, {"primal_min_eig", primal_min_eig},
              {"dual_min_eig", dual_min_eig},       {"primal_value", primal_value},
              {"dual_value", dual_value},           {"gap", gap}};
}

VerifyReport verify_certificate(const SdpProblem& p, const SdpSolution& s, double) {
  p.validate();
  VerifyReport r;
  const size_t nb = p.blocks.size();
  if (s.primal.size() != nb || s.dual.size() != p.constraints.size()) {
    throw std::invalid_argument("certificate shape mismatch");
  }
  double pv = 0.0;
  for (size_t k = 0; k < nb; ++k) {
    pv += std::real((p.objective[k].dense().adjoint() * s.primal[k]).trace());
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s.primal[k] + s.primal[k].adjoint()));
    r.primal_min_eig = std::min(r.primal_min_eig, es.eigenvalues().minCoeff());
  }
  r.primal_value = pv;
  double dv = 0.0;
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    double lhs = 0.0;
    for (size_t k = 0; k < nb; ++k) {
      lhs += std::real((p.constraints[i].coeffs[k].dense().adjoint() * s.primal[k]).trace());
    }
    r.primal_residual = std::max(r.primal_residual, std::abs(lhs - p.constraints[i].rhs));
    dv += s.dual[i] * p.constraints[i].rhs;
  }
  r.dual_value = dv;
  for (size_t k = 0; k < nb; ++k) {
    Mat slack = -p.objective[k].dense();
    for (size_t i = 0; i < p.constraints.size(); ++i) {
      if (s.dual[i] != 0.0) slack += s.dual[i] * p.constraints[i].coeffs[k].dense();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (slack + slack.adjoint()));
    r.dual_min_eig = std::min(r.dual_min_eig, es.eigenvalues().minCoeff());
  }
  r.gap = std::abs(r.dual_value - r.primal_value);
  return r;
}

}  // namespace xot::sdp
