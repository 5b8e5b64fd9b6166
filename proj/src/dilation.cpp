#include "xot/dilation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace xot::dilation {
namespace {

using nlohmann::json;

constexpr double kIsoTol = 1e-9;

void check_isometry(const Mat& v, const char* what) {
  if (v.rows() < v.cols()) throw std::invalid_argument(std::string(what) + ": shrinking map");
  Mat g = v.adjoint() * v;
  if ((g - Mat::Identity(v.cols(), v.cols())).norm() > kIsoTol)
    throw std::invalid_argument(std::string(what) + ": not an isometry");
}

Mat outcome_projector(int outcomes, int o, int inner_dim) {
  Mat e = Mat::Zero(outcomes, outcomes);
  e(o, o) = 1.0;
  return kron(e, Mat::Identity(inner_dim, inner_dim));
}

// inner placed on the subspace at (off, off); outcome 0 also claims the
// identity on the rest of L so the family stays complete
Mat padded(int total, int off, const Mat& inner, bool pad_rest) {
  Mat m = pad_rest ? Mat(Mat::Identity(total, total)) : Mat(Mat::Zero(total, total));
  m.block(off, off, inner.rows(), inner.cols()) = inner;
  return m;
}

}  // namespace

Embedding layout(const IsometryFamily& fam) {
  if (fam.first.empty()) throw std::invalid_argument("need at least one first-layer isometry");
  Embedding e;
  const int d0 = static_cast<int>(fam.first[0].cols());
  e.h_offset.push_back(0);
  e.h_dim.push_back(d0);
  int off = d0;
  for (const Mat& v : fam.first) {
    if (v.cols() != d0) throw std::invalid_argument("first-layer domains differ");
    e.h_offset.push_back(off);
    e.h_dim.push_back(static_cast<int>(v.rows()));
    off += static_cast<int>(v.rows());
  }
  const int dn = e.h_dim.back();
  for (const Mat& v : fam.second) {
    if (v.cols() != dn)
      throw std::invalid_argument("second-layer domain must be the last first-layer codomain");
    e.k_offset.push_back(off);
    e.k_dim.push_back(static_cast<int>(v.rows()));
    off += static_cast<int>(v.rows());
  }
  e.total = off;
  return e;
}

Vec embed_state(const Embedding& e, const Vec& v, int subspace) {
  if (subspace < 0 || subspace >= static_cast<int>(e.h_dim.size()))
    throw std::invalid_argument("bad subspace index");
  if (v.size() != e.h_dim[subspace]) throw std::invalid_argument("state dim mismatch");
  Vec out = Vec::Zero(e.total);
  out.segment(e.h_offset[subspace], e.h_dim[subspace]) = v;
  return out;
}

SznagyUnitaries sznagy_unitaries(const IsometryFamily& fam) {
  SznagyUnitaries out;
  out.space = layout(fam);
  const Embedding& e = out.space;
  const int n = static_cast<int>(fam.first.size());
  for (int j = 0; j < n; ++j) {
    const Mat& v = fam.first[j];
    check_isometry(v, "first-layer isometry");
    Mat u = Mat::Identity(e.total, e.total);
    const int o0 = e.h_offset[0], d0 = e.h_dim[0];
    const int oj = e.h_offset[j + 1], dj = e.h_dim[j + 1];
    u.block(o0, o0, d0, d0).setZero();
    u.block(oj, o0, dj, d0) = v;
    u.block(o0, oj, d0, dj) = -v.adjoint();
    u.block(oj, oj, dj, dj) = Mat::Identity(dj, dj) - v * v.adjoint();
    out.first.push_back(std::move(u));
  }
  for (std::size_t k = 0; k < fam.second.size(); ++k) {
    const Mat& v = fam.second[k];
    check_isometry(v, "second-layer isometry");
    Mat u = Mat::Identity(e.total, e.total);
    const int on = e.h_offset[n], dn = e.h_dim[n];
    const int ok = e.k_offset[k], dk = e.k_dim[k];
    u.block(on, on, dn, dn).setZero();
    u.block(ok, on, dk, dn) = v;
    u.block(on, ok, dn, dk) = -v.adjoint();
    u.block(ok, ok, dk, dk) = Mat::Identity(dk, dk) - v * v.adjoint();
    out.second.push_back(std::move(u));
  }
  return out;
}

Mat recording_isometry(const std::vector<Mat>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("empty Kraus family");
  const int r = static_cast<int>(kraus[0].rows());
  const int c = static_cast<int>(kraus[0].cols());
  Mat sum = Mat::Zero(c, c);
  Mat v = Mat::Zero(static_cast<int>(kraus.size()) * r, c);
  for (std::size_t y = 0; y < kraus.size(); ++y) {
    if (kraus[y].rows() != r || kraus[y].cols() != c)
      throw std::invalid_argument("Kraus operators differ in shape");
    v.block(static_cast<int>(y) * r, 0, r, c) = kraus[y];
    sum += kraus[y].adjoint() * kraus[y];
  }
  if ((sum - Mat::Identity(c, c)).norm() > kIsoTol)
    throw std::invalid_argument("Kraus family does not sum to the identity");
  return v;
}

SingleDilation dilate_single_stage(const std::vector<std::vector<Mat>>& families) {
  IsometryFamily fam;
  for (const auto& f : families) fam.first.push_back(recording_isometry(f));
  SingleDilation out;
  out.u = sznagy_unitaries(fam);
  const Embedding& e = out.u.space;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const int nout = static_cast<int>(families[f].size());
    const int inner = e.h_dim[f + 1] / nout;
    std::vector<Mat> projs;
    for (int o = 0; o < nout; ++o) {
      Mat p = padded(e.total, e.h_offset[f + 1], outcome_projector(nout, o, inner), o == 0);
      projs.push_back(out.u.first[f].adjoint() * p * out.u.first[f]);
    }
    out.proj.push_back(std::move(projs));
  }
  return out;
}

SequentialDilation dilate_to_pvm(const SequentialKraus& k) {
  if (k.stage.empty()) throw std::invalid_argument("empty stage family");
  const int d = static_cast<int>(k.stage[0].cols());
  const int nstage = static_cast<int>(k.stage.size());

  IsometryFamily fam;
  for (const auto& f : k.test) fam.first.push_back(recording_isometry(f));
  fam.first.push_back(recording_isometry(k.stage));
  for (const auto& f : k.guess) {
    std::vector<Mat> lifted;
    for (const Mat& g : f) lifted.push_back(kron(Mat::Identity(nstage, nstage), g));
    fam.second.push_back(recording_isometry(lifted));
  }

  SequentialDilation out;
  out.u = sznagy_unitaries(fam);
  const Embedding& e = out.u.space;
  const int nb = static_cast<int>(k.test.size());
  for (int b = 0; b < nb; ++b) {
    const int nout = static_cast<int>(k.test[b].size());
    std::vector<Mat> projs;
    for (int y = 0; y < nout; ++y) {
      Mat p = padded(e.total, e.h_offset[b + 1], outcome_projector(nout, y, d), y == 0);
      projs.push_back(out.u.first[b].adjoint() * p * out.u.first[b]);
    }
    out.test.push_back(std::move(projs));
  }
  const Mat& ustage = out.u.first[nb];
  for (int y = 0; y < nstage; ++y) {
    Mat p = padded(e.total, e.h_offset[nb + 1], outcome_projector(nstage, y, d), y == 0);
    out.stage.push_back(ustage.adjoint() * p * ustage);
  }
  for (std::size_t m = 0; m < k.guess.size(); ++m) {
    const int nout = static_cast<int>(k.guess[m].size());
    const Mat conj = out.u.second[m] * ustage;
    std::vector<Mat> projs;
    for (int g = 0; g < nout; ++g) {
      Mat p = padded(e.total, e.k_offset[m], outcome_projector(nout, g, nstage * d), g == 0);
      projs.push_back(conj.adjoint() * p * conj);
    }
    out.guess.push_back(std::move(projs));
  }
  return out;
}

json PreservationReport::to_json() const {
  return {{"states", states},
          {"comparisons", comparisons},
          {"max_residual", max_residual},
          {"threshold", threshold},
          {"pass", pass}};
}

PreservationReport verify_probability_preservation(
    const std::vector<std::vector<Mat>>& sender, const SequentialKraus& receiver,
    const SingleDilation& sender_d, const SequentialDilation& receiver_d,
    const std::vector<Vec>& states, double threshold) {
  const int da = static_cast<int>(sender.at(0).at(0).cols());
  const int db = static_cast<int>(receiver.stage.at(0).cols());

  PreservationReport rep;
  rep.states = static_cast<int>(states.size());
  rep.threshold = threshold;

  // the embedded state only occupies the leading da x db block, so only the
  // leading columns of each dilated operator ever touch it
  std::vector<Mat> send_orig, send_dil;
  for (std::size_t a = 0; a < sender.size(); ++a)
    for (std::size_t x = 0; x < sender[a].size(); ++x) {
      send_orig.push_back(sender[a][x]);
      send_dil.push_back(sender_d.proj[a][x].leftCols(da));
    }
  std::vector<Mat> recv_orig, recv_dil;
  for (std::size_t b = 0; b < receiver.test.size(); ++b)
    for (std::size_t y = 0; y < receiver.test[b].size(); ++y) {
      recv_orig.push_back(receiver.test[b][y]);
      recv_dil.push_back(receiver_d.test[b][y].leftCols(db));
    }
  for (std::size_t m = 0; m < receiver.guess.size(); ++m)
    for (std::size_t g = 0; g < receiver.guess[m].size(); ++g)
      for (std::size_t y = 0; y < receiver.stage.size(); ++y) {
        recv_orig.push_back(receiver.guess[m][g] * receiver.stage[y]);
        recv_dil.push_back((receiver_d.guess[m][g] * receiver_d.stage[y]).leftCols(db));
      }

  for (const Vec& psi : states) {
    if (psi.size() != da * db) throw std::invalid_argument("state dim mismatch");
    Mat orig = Mat::Zero(da, db);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < db; ++j) orig(i, j) = psi(i * db + j);
    for (std::size_t s = 0; s < send_orig.size(); ++s) {
      const Mat left_dil = send_dil[s] * orig;  // la x db
      const Mat left_orig = send_orig[s] * orig;
      for (std::size_t r = 0; r < recv_orig.size(); ++r) {
        const double lhs = (left_dil * recv_dil[r].transpose()).norm();
        const double rhs = (left_orig * recv_orig[r].transpose()).norm();
        rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
        ++rep.comparisons;
      }
    }
  }
  rep.pass = rep.max_residual <= threshold;
  return rep;
}

}  // namespace xot::dilation
