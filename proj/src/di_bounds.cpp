#include "xot/di_bounds.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <stdexcept>
#include <thread>

#include "xot/magic_square.hpp"

namespace xot::di {

using npa::Letter;
using npa::Operand;
using npa::Polynomial;
using npa::Word;

std::string party_name(Party party) { return party == Party::alice ? "alice" : "bob"; }

namespace {

// cheating Alice
Operand at_letter(int x, int a) {
  return x < 3 ? Operand::projector({0, 0, a, x}) : Operand::eliminated(0, 0, a, 4);
}
Operand ag_letter(int g, int y) {
  return g < 2 ? Operand::projector({0, 1, y, g}) : Operand::eliminated(0, 1, y, 3);
}
Operand ab_letter(int y, int b) {
  return y < 3 ? Operand::projector({1, 0, b, y}) : Operand::eliminated(1, 0, b, 4);
}

// cheating Bob
Operand bm_letter(int x, int a) {
  return x < 3 ? Operand::projector({0, 0, a, x}) : Operand::eliminated(0, 0, a, 4);
}
Operand bt_letter(int y, int b) {
  return y < 3 ? Operand::projector({1, 0, b, y}) : Operand::eliminated(1, 0, b, 4);
}
Operand by_letter(int y) {
  return y < 3 ? Operand::projector({1, 1, 0, y}) : Operand::eliminated(1, 1, 0, 4);
}
Operand bg_letter(int g, int m) {
  return g < 3 ? Operand::projector({1, 2, m, g}) : Operand::eliminated(1, 2, m, 4);
}

template <typename S, typename R>
Polynomial test_poly(S sender, R receiver) {
  Polynomial p;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          if (ms::wins(a, b, x, y)) p.add(sender(x, a) * receiver(y, b), 1.0 / 9.0);
  return p;
}

}  // namespace

bool message_compatible(int x, int a, int y) {
  const int t = ms::trit_y(y, a);
  return t == ms::trit_x(x, 0) || t == ms::trit_x(x, 1) || t == ms::trit_x(x, 2);
}

std::vector<Word> alice_words() {
  std::vector<Word> lhs, rhs;
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 3; ++x) lhs.push_back({Letter{0, 0, a, x}});
  for (int y = 0; y < 4; ++y)
    for (int g = 0; g < 2; ++g) lhs.push_back({Letter{0, 1, y, g}});
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 3; ++y) rhs.push_back({Letter{1, 0, b, y}});
  std::vector<Word> words{{}};
  for (const Word& l : lhs) words.push_back(l);
  for (const Word& r : rhs) words.push_back(r);
  for (const Word& l : lhs)
    for (const Word& r : rhs) words.push_back({l[0], r[0]});
  return words;
}

std::vector<Word> bob_words(bool reduced) {
  std::vector<Word> left{{}};
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 3; ++x) left.push_back({Letter{0, 0, a, x}});
  std::vector<Word> right;
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 3; ++y) right.push_back({Letter{1, 0, b, y}});
  for (int m = 0; m < 3; ++m)
    for (int g = 0; g < 3; ++g) right.push_back({Letter{1, 2, m, g}});
  for (int y = 0; y < 3; ++y) right.push_back({Letter{1, 1, 0, y}});
  for (int m = 0; m < 3; ++m)
    for (int g = 0; g < 3; ++g)
      for (int y = 0; y < 3; ++y) right.push_back({Letter{1, 2, m, g}, Letter{1, 1, 0, y}});
  std::vector<Word> words;
  for (const Word& l : left) {
    words.push_back(l);
    for (const Word& r : right) {
      if (reduced && !l.empty() && r.size() == 1 && r[0].fam == 2) continue;
      Word w = l;
      w.insert(w.end(), r.begin(), r.end());
      words.push_back(w);
    }
  }
  return words;
}

Polynomial alice_test_objective() { return test_poly(at_letter, ab_letter); }
Polynomial bob_test_objective() { return test_poly(bm_letter, bt_letter); }

Polynomial alice_prot_objective() {
  Polynomial p;
  for (int b = 0; b < 3; ++b)
    for (int y = 0; y < 4; ++y) p.add(ag_letter(b, y) * ab_letter(y, b), 1.0 / 3.0);
  return p;
}

Polynomial bob_prot_objective() {
  Polynomial p;
  for (int a = 0; a < 3; ++a)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        if (message_compatible(x, a, y))
          p.add(bm_letter(x, a) * by_letter(y) * bg_letter(x, a) * by_letter(y), 1.0 / 3.0);
  return p;
}

Polynomial DiObjective::combined() const {
  Polynomial p;
  p.constant = q * test.constant + (1.0 - q) * prot.constant;
  for (const auto& [w, c] : test.coeffs) p.coeffs[w] += q * c;
  for (const auto& [w, c] : prot.coeffs) p.coeffs[w] += (1.0 - q) * c;
  return p;
}

DiObjective objective(Party party, double q) {
  DiObjective o;
  o.party = party;
  o.q = q;
  if (party == Party::alice) {
    o.test = alice_test_objective();
    o.prot = alice_prot_objective();
  } else {
    o.test = bob_test_objective();
    o.prot = bob_prot_objective();
  }
  return o;
}

nlohmann::json DiBound::to_json() const {
  nlohmann::json j{{"party", party_name(party)},
                   {"bound", bound},
                   {"words", nwords},
                   {"reduced", reduced},
                   {"solution", solution.to_json()}};
  if (eps)
    j["eps"] = *eps;
  else
    j["q"] = q;
  return j;
}

moment::AdmmOptions default_admm(Party party) {
  moment::AdmmOptions o;
  o.tol = 1e-8;
  if (party == Party::alice) {
    o.max_iter = 150000;
    o.check_every = 200;
  } else {
    o.max_iter = 200000;
    o.check_every = 100;
  }
  return o;
}

DiBound cheat_bound(Party party, double q, const DiOptions& opt) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("cheat_bound: q must lie in (0, 1)");
  const bool reduced = party == Party::bob && opt.reduced;
  const auto words = party == Party::alice ? alice_words() : bob_words(reduced);
  const auto sk = npa::build_skeleton(words);
  const auto mp = npa::assemble(sk, objective(party, q).combined());
  DiBound b;
  b.party = party;
  b.q = q;
  b.nwords = static_cast<int>(words.size());
  b.reduced = reduced;
  b.solution = moment::solve_admm(mp, opt.admm);
  b.bound = b.solution.upper_bound;
  return b;
}

DiBound cheat_bound(Party party, double q) {
  DiOptions opt;
  opt.admm = default_admm(party);
  return cheat_bound(party, q, opt);
}

std::pair<DiBound, DiBound> protocol5_bounds(double qa, double qb, const DiOptions& alice_opt,
                                             const DiOptions& bob_opt) {
  return {cheat_bound(Party::alice, qb, alice_opt), cheat_bound(Party::bob, qa, bob_opt)};
}

std::pair<DiBound, DiBound> protocol5_bounds(double qa, double qb) {
  return {cheat_bound(Party::alice, qb), cheat_bound(Party::bob, qa)};
}

DiBound gapped_bound(Party party, double eps, const DiOptions& opt) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("gapped_bound: eps must lie in (0, 1]");
  const bool reduced = party == Party::bob && opt.reduced;
  const auto words = party == Party::alice ? alice_words() : bob_words(reduced);
  const auto sk = npa::build_skeleton(words);
  const auto obj = objective(party, 0.5);
  const auto mp = npa::assemble(sk, obj.prot, obj.test, 1.0 - eps);
  DiBound b;
  b.party = party;
  b.eps = eps;
  b.nwords = static_cast<int>(words.size());
  b.reduced = reduced;
  b.solution = moment::solve_admm(mp, opt.admm);
  b.bound = b.solution.upper_bound;
  return b;
}

DiBound gapped_bound(Party party, double eps) {
  DiOptions opt;
  opt.admm = default_admm(party);
  return gapped_bound(party, eps, opt);
}

GappedCombine gapped_combine(double q, double eps, double prot_bound) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("gapped_combine: q must lie in (0, 1)");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("gapped_combine: eps must lie in [0, 1]");
  const double cutoff = 1.0 - eps / (1.0 - q);
  GappedCombine r;
  if (prot_bound <= cutoff + 1e-12) {
    r.ok = true;
    r.bound = 1.0 - q * eps;
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "protocol bound %.6f exceeds 1 - eps/(1-q) = %.6f, the combined bound does not apply",
                  prot_bound, cutoff);
    r.ok = false;
    r.bound = 1.0;
    r.reason = buf;
  }
  return r;
}

int thread_cap() {
  if (const char* env = std::getenv("DIXOT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Sweep q_sweep(Party party, double step, const DiOptions& opt) {
  if (!(step > 0.0 && step < 1.0))
    throw std::invalid_argument("q_sweep: step must lie in (0, 1)");
  std::vector<double> grid;
  for (int k = 1; k * step < 1.0 - 1e-12; ++k) grid.push_back(k * step);
  Sweep sw;
  sw.party = party;
  sw.step = step;
  sw.rows.resize(grid.size());
  const auto cap = static_cast<size_t>(std::max(1, thread_cap()));
  for (size_t base = 0; base < grid.size(); base += cap) {
    const size_t hi = std::min(base + cap, grid.size());
    std::vector<std::future<DiBound>> futs;
    for (size_t i = base; i < hi; ++i)
      futs.push_back(std::async(std::launch::async,
                                [&, i] { return cheat_bound(party, grid[i], opt); }));
    for (size_t i = base; i < hi; ++i) sw.rows[i] = futs[i - base].get();
  }
  for (size_t i = 1; i < sw.rows.size(); ++i)
    if (sw.rows[i].bound < sw.rows[sw.best].bound) sw.best = static_cast<int>(i);
  return sw;
}

std::string bounds_table(const std::vector<DiBound>& bounds) {
  std::string out =
      "party  q     eps      bound     words  reduced  iters     time\n"
      "-----  ----  -------  --------  -----  -------  --------  --------\n";
  char line[160];
  for (const auto& b : bounds) {
    char qcol[16] = "-";
    char ecol[16] = "-";
    if (b.eps)
      std::snprintf(ecol, sizeof ecol, "%.0e", *b.eps);
    else
      std::snprintf(qcol, sizeof qcol, "%.2f", b.q);
    std::snprintf(line, sizeof line, "%-5s  %-4s  %-7s  %.5f   %-5d  %-7s  %-8d  %.1fs\n",
                  party_name(b.party).c_str(), qcol, ecol, b.bound, b.nwords,
                  b.reduced ? "yes" : "no", b.solution.iterations, b.solution.wall_time);
    out += line;
  }
  return out;
}

std::string Sweep::table() const {
  std::string out = bounds_table(rows);
  if (!rows.empty()) {
    char line[96];
    std::snprintf(line, sizeof line, "best:  q = %.2f  bound = %.5f\n", rows[best].q,
                  rows[best].bound);
    out += line;
  }
  return out;
}

nlohmann::json Sweep::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) rows_json.push_back(r.to_json());
  return nlohmann::json{{"party", party_name(party)},
                        {"step", step},
                        {"rows", rows_json},
                        {"best_q", rows.empty() ? 0.0 : rows[best].q},
                        {"best_bound", rows.empty() ? 0.0 : rows[best].bound}};
}

}  // namespace xot::di
