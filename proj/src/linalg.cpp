#include "xot/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace xot {

int total_dim(const std::vector<Register>& regs) {
  int d = 1;
  for (const auto& r : regs) d *= r.dim;
  return d;
}

Operator make_operator(std::vector<Register> regs, Mat m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator must be square");
  if (total_dim(regs) != m.rows())
    throw std::invalid_argument("register dims do not match matrix size");
  return Operator{std::move(regs), std::move(m)};
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Operator kron(const Operator& a, const Operator& b) {
  std::vector<Register> regs = a.regs;
  regs.insert(regs.end(), b.regs.begin(), b.regs.end());
  return make_operator(std::move(regs), kron(a.mat, b.mat));
}

namespace {

// Decompose a flat index into per-register digits (row-major, first register slowest).
void digits_of(int idx, const std::vector<Register>& regs, std::vector<int>& out) {
  out.resize(regs.size());
  for (int r = static_cast<int>(regs.size()) - 1; r >= 0; --r) {
    out[r] = idx % regs[r].dim;
    idx /= regs[r].dim;
  }
}

int index_of(const std::vector<int>& digits, const std::vector<Register>& regs) {
  int idx = 0;
  for (size_t r = 0; r < regs.size(); ++r) idx = idx * regs[r].dim + digits[r];
  return idx;
}

}  // namespace

Operator partial_trace(const Operator& op, const std::vector<std::string>& kill) {
  std::vector<int> killed(op.regs.size(), 0);
  for (const auto& name : kill) {
    auto it = std::find_if(op.regs.begin(), op.regs.end(),
                           [&](const Register& r) { return r.name == name; });
    if (it == op.regs.end()) throw std::invalid_argument("no register named " + name);
    killed[it - op.regs.begin()] = 1;
  }
  std::vector<Register> keep_regs, kill_regs;
  for (size_t r = 0; r < op.regs.size(); ++r)
    (killed[r] ? kill_regs : keep_regs).push_back(op.regs[r]);
  const int dkeep = total_dim(keep_regs);
  const int dkill = total_dim(kill_regs);

  Mat out = Mat::Zero(dkeep, dkeep);
  std::vector<int> kd, id, jd, full_i(op.regs.size()), full_j(op.regs.size());
  for (int i = 0; i < dkeep; ++i) {
    digits_of(i, keep_regs, id);
    for (int j = 0; j < dkeep; ++j) {
      digits_of(j, keep_regs, jd);
      cx acc = 0;
      for (int t = 0; t < dkill; ++t) {
        digits_of(t, kill_regs, kd);
        int pk = 0, pt = 0;
        for (size_t r = 0; r < op.regs.size(); ++r) {
          if (killed[r]) {
            full_i[r] = kd[pt];
            full_j[r] = kd[pt];
            ++pt;
          } else {
            full_i[r] = id[pk];
            full_j[r] = jd[pk];
            ++pk;
          }
        }
        acc += op.mat(index_of(full_i, op.regs), index_of(full_j, op.regs));
      }
      out(i, j) = acc;
    }
  }
  return make_operator(std::move(keep_regs), std::move(out));
}

Operator dagger(const Operator& op) {
  return Operator{op.regs, op.mat.adjoint()};
}

bool is_hermitian(const Mat& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_projector(const Mat& m, double tol) {
  return is_hermitian(m, tol) && (m * m - m).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Mat& m, double tol) {
  Mat id = Mat::Identity(m.rows(), m.cols());
  return (m.adjoint() * m - id).cwiseAbs().maxCoeff() <= tol &&
         (m * m.adjoint() - id).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const Mat& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0,
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

RMat hermitian_to_real(const Mat& h) {
  const auto n = h.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

Operator embed(const std::vector<Register>& space,
               const std::vector<std::pair<std::string, Mat>>& factors) {
  Mat acc = Mat::Identity(1, 1);
  std::vector<Register> regs;
  for (const auto& r : space) {
    auto it = std::find_if(factors.begin(), factors.end(),
                           [&](const auto& f) { return f.first == r.name; });
    if (it != factors.end()) {
      if (it->second.rows() != r.dim)
        throw std::invalid_argument("factor dim mismatch on " + r.name);
      acc = kron(acc, it->second);
    } else {
      acc = kron(acc, Mat::Identity(r.dim, r.dim).eval());
    }
    regs.push_back(r);
  }
  for (const auto& f : factors) {
    if (std::find_if(space.begin(), space.end(),
                     [&](const Register& r) { return r.name == f.first; }) == space.end())
      throw std::invalid_argument("no register named " + f.first);
  }
  return make_operator(std::move(regs), std::move(acc));
}

Vec basis_ket(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v(k) = 1.0;
  return v;
}

}  // namespace xot
