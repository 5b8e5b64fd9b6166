#include "xot/certificates.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace xot::cert {

using nlohmann::json;

namespace {

json sparse_row(const std::vector<double>& v) {
  json out = json::array();
  for (size_t c = 0; c < v.size(); ++c) {
    if (v[c] != 0.0) out.push_back({static_cast<int>(c), v[c]});
  }
  return out;
}

std::vector<double> dense_row(const json& j, int nclasses) {
  std::vector<double> v(nclasses, 0.0);
  for (const auto& e : j) {
    int c = e.at(0).get<int>();
    if (c < 0 || c >= nclasses) throw std::runtime_error("class index out of range");
    v[c] = e.at(1).get<double>();
  }
  return v;
}

// symmetric matrices travel as the upper triangle, row major
template <typename M>
json upper_triangle(const M& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = r; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

template <typename M>
void fill_symmetric(M& m, const json& j, int n) {
  if (static_cast<int>(j.size()) != n * (n + 1) / 2) {
    throw std::runtime_error("triangle size mismatch");
  }
  m.resize(n, n);
  size_t k = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      m(r, c) = j[k].get<typename M::Scalar>();
      m(c, r) = m(r, c);
      ++k;
    }
  }
}

json moment_problem_json(const moment::MomentProblem& p) {
  json jp{{"n", p.n},
          {"nclasses", p.nclasses},
          {"identity_class", p.identity_class},
          {"cls", upper_triangle(p.cls)},
          {"objective", sparse_row(p.objective)}};
  if (p.has_gate) {
    jp["gate"] = sparse_row(p.gate);
    jp["gate_rhs"] = p.gate_rhs;
  }
  return jp;
}

moment::MomentProblem moment_problem_from_json(const json& j) {
  moment::MomentProblem p;
  p.n = j.at("n").get<int>();
  p.nclasses = j.at("nclasses").get<int>();
  p.identity_class = j.at("identity_class").get<int>();
  fill_symmetric(p.cls, j.at("cls"), p.n);
  p.objective = dense_row(j.at("objective"), p.nclasses);
  if (j.contains("gate")) {
    p.gate = dense_row(j.at("gate"), p.nclasses);
    p.gate_rhs = j.at("gate_rhs").get<double>();
    p.has_gate = true;
  }
  p.validate();
  return p;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

}  // namespace

json sdp_certificate(const dd::CheatBound& b) {
  return json{{"format", kFormat},
              {"kind", "sdp"},
              {"label", b.scenario},
              {"bound", b.value},
              {"created", RunRecord::now_utc()},
              {"tool_version", kToolVersion},
              {"problem", b.problem.to_json()},
              {"solution", b.certificate.to_json()},
              {"metadata", b.metadata}};
}

json moment_certificate(const std::string& label, const moment::MomentProblem& p,
                        const moment::MomentSolution& s) {
  return json{{"format", kFormat},
              {"kind", "moment"},
              {"label", label},
              {"bound", s.upper_bound},
              {"created", RunRecord::now_utc()},
              {"tool_version", kToolVersion},
              {"problem", moment_problem_json(p)},
              {"witness", json{{"gate_multiplier", s.witness_gate},
                               {"matrix", upper_triangle(s.witness)}}},
              {"stats", s.to_json()}};
}

json checkpoint(const std::string& label, const moment::MomentProblem& p,
                const moment::MomentSolution& s) {
  json ck = moment_certificate(label, p, s);
  ck["resume"] = json{{"y", s.y}, {"beta", s.beta}};
  return ck;
}

void apply_resume(const json& ck, const moment::MomentProblem& p, moment::AdmmOptions& opt) {
  if (ck.value("kind", "") != "moment" || !ck.contains("resume")) {
    throw std::runtime_error("not a resumable moment checkpoint");
  }
  const auto& jp = ck.at("problem");
  if (jp.at("n").get<int>() != p.n || jp.at("nclasses").get<int>() != p.nclasses ||
      jp.at("identity_class").get<int>() != p.identity_class ||
      dense_row(jp.at("objective"), p.nclasses) != p.objective) {
    throw std::runtime_error("checkpoint was produced for a different problem");
  }
  opt.warm_y = ck.at("resume").at("y").get<std::vector<double>>();
  if (static_cast<int>(opt.warm_y.size()) != p.nclasses) {
    throw std::runtime_error("checkpoint state size mismatch");
  }
  fill_symmetric(opt.warm_witness, ck.at("witness").at("matrix"), p.n);
  opt.warm_gate = ck.at("witness").at("gate_multiplier").get<double>();
  double b = ck.at("resume").value("beta", 0.0);
  if (b > 0.0) opt.beta = b;
}

VerifyOutcome verify(const json& cert, double tol) {
  if (!cert.is_object() || cert.value("format", "") != kFormat) {
    throw std::runtime_error("not a certificate file");
  }
  VerifyOutcome out;
  out.kind = cert.at("kind").get<std::string>();
  out.label = cert.value("label", "");
  out.claimed = cert.at("bound").get<double>();
  if (out.kind == "sdp") {
    auto p = sdp::SdpProblem::from_json(cert.at("problem"));
    auto s = sdp::SdpSolution::from_json(cert.at("solution"));
    auto r = sdp::verify_certificate(p, s);
    out.recomputed = r.dual_value;
    out.pass = r.ok(tol) && r.dual_value <= out.claimed + tol;
    out.detail = fmt("primal residual %.3e, min eig %.3e, gap %.3e", r.primal_residual,
                     std::min(r.primal_min_eig, r.dual_min_eig), r.gap);
  } else if (out.kind == "moment") {
    auto p = moment_problem_from_json(cert.at("problem"));
    const auto& jw = cert.at("witness");
    Eigen::MatrixXd w;
    fill_symmetric(w, jw.at("matrix"), p.n);
    double g = jw.at("gate_multiplier").get<double>();
    if (g < 0.0 || (!p.has_gate && g != 0.0)) throw std::runtime_error("bad gate multiplier");
    out.recomputed = moment::certified_bound(p, w, g);
    out.pass = out.recomputed <= out.claimed + tol;
    out.detail = fmt("recomputed %.7f vs claimed %.7f, witness min eig %.3e", out.recomputed,
                     out.claimed, moment::min_eigenvalue(w));
  } else {
    throw std::runtime_error("unknown certificate kind: " + out.kind);
  }
  return out;
}

json VerifyOutcome::to_json() const {
  return json{{"pass", pass},           {"kind", kind},
              {"label", label},         {"claimed", claimed},
              {"recomputed", recomputed}, {"detail", detail}};
}

void save(const std::filesystem::path& path, const json& cert) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << cert.dump() << '\n';
}

json load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt certificate " + path.string() + ": " + e.what());
  }
  return j;
}

json RunRecord::to_json() const {
  return json{{"command", command},
              {"parameters", parameters},
              {"scenario", scenario},
              {"value", value},
              {"certificate", certificate_path},
              {"solver_stats", solver_stats},
              {"timestamp", timestamp},
              {"tool_version", tool_version}};
}

std::string RunRecord::now_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace xot::cert
