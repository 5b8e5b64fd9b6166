#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace xot {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;

inline constexpr double kStructTol = 1e-9;

struct Register {
  std::string name;
  int dim = 0;
};

// Square operator acting on an ordered tensor product of named registers.
struct Operator {
  std::vector<Register> regs;
  Mat mat;

  int dim() const { return static_cast<int>(mat.rows()); }
};

int total_dim(const std::vector<Register>& regs);
Operator make_operator(std::vector<Register> regs, Mat m);

Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);
Operator kron(const Operator& a, const Operator& b);

// Trace out the named registers; remaining registers keep their order.
Operator partial_trace(const Operator& op, const std::vector<std::string>& kill);

Operator dagger(const Operator& op);

bool is_hermitian(const Mat& m, double tol = kStructTol);
bool is_projector(const Mat& m, double tol = kStructTol);
bool is_unitary(const Mat& m, double tol = kStructTol);
bool is_psd(const Mat& m, double tol = kStructTol);

// [[Re, -Im], [Im, Re]]; doubles eigenvalue multiplicities and inner products.
RMat hermitian_to_real(const Mat& h);

// Place factors on the named registers of `space`, identity elsewhere.
Operator embed(const std::vector<Register>& space,
               const std::vector<std::pair<std::string, Mat>>& factors);

Vec basis_ket(int dim, int k);

}  // namespace xot
