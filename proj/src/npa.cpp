#include "xot/npa.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace xot::npa {

std::optional<Word> reduce(const Word& w) {
  Word s = w;
  std::stable_sort(s.begin(), s.end(),
                   [](const Letter& a, const Letter& b) { return a.party < b.party; });
  Word out;
  for (const Letter& l : s) {
    if (!out.empty()) {
      const Letter& back = out.back();
      if (back == l) continue;
      if (back.party == l.party && back.fam == l.fam && back.input == l.input) {
        return std::nullopt;
      }
    }
    out.push_back(l);
  }
  return out;
}

Word reversed_word(const Word& w) { return Word(w.rbegin(), w.rend()); }

Word adjoint_word(const Word& w) {
  auto r = reduce(reversed_word(w));
  if (!r) throw std::invalid_argument("adjoint of an unreduced word");
  return *r;
}

Word moment_class(const Word& w) { return std::min(w, adjoint_word(w)); }

Operand Operand::identity() { return Operand{{{Word{}, 1.0}}}; }

Operand Operand::projector(const Letter& l) { return Operand{{{Word{l}, 1.0}}}; }

Operand Operand::eliminated(int party, int fam, int input, int noutcomes) {
  Operand op = identity();
  for (int o = 0; o + 1 < noutcomes; ++o) {
    op.terms[Word{Letter{party, fam, input, o}}] -= 1.0;
  }
  return op;
}

Operand operator*(const Operand& a, const Operand& b) {
  Operand out;
  for (const auto& [wa, ca] : a.terms) {
    for (const auto& [wb, cb] : b.terms) {
      Word cat = wa;
      cat.insert(cat.end(), wb.begin(), wb.end());
      if (auto r = reduce(cat)) out.terms[*r] += ca * cb;
    }
  }
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    it = std::abs(it->second) < 1e-15 ? out.terms.erase(it) : std::next(it);
  }
  return out;
}

Operand operator*(double s, const Operand& a) {
  Operand out = a;
  for (auto& [w, c] : out.terms) c *= s;
  return out;
}

Operand operator+(const Operand& a, const Operand& b) {
  Operand out = a;
  for (const auto& [w, c] : b.terms) out.terms[w] += c;
  return out;
}

void Polynomial::add(const Operand& op, double scale) {
  for (const auto& [w, c] : op.terms) {
    if (w.empty()) {
      constant += c * scale;
    } else {
      coeffs[moment_class(w)] += c * scale;
    }
  }
}

Skeleton build_skeleton(const std::vector<Word>& words) {
  if (words.empty() || !words[0].empty()) {
    throw std::invalid_argument("index set must start with the identity word");
  }
  std::set<Word> seen;
  for (const auto& w : words) {
    auto r = reduce(w);
    if (!r || *r != w) throw std::invalid_argument("index set word not reduced");
    if (!seen.insert(w).second) throw std::invalid_argument("duplicate index set word");
  }
  Skeleton sk;
  sk.words = words;
  const int n = static_cast<int>(words.size());
  sk.cls = Eigen::MatrixXi::Constant(n, n, -1);
  for (int i = 0; i < n; ++i) {
    Word left = reversed_word(words[i]);
    for (int j = i; j < n; ++j) {
      Word cat = left;
      cat.insert(cat.end(), words[j].begin(), words[j].end());
      auto r = reduce(cat);
      if (!r) continue;
      Word key = moment_class(*r);
      auto [it, inserted] = sk.class_of.try_emplace(key, static_cast<int>(sk.classes.size()));
      if (inserted) sk.classes.push_back(key);
      sk.cls(i, j) = it->second;
      sk.cls(j, i) = it->second;
    }
  }
  sk.identity_class = sk.cls(0, 0);
  return sk;
}

namespace {

void fill_coeffs(const Skeleton& sk, const Polynomial& poly, std::vector<double>& out) {
  out.assign(sk.classes.size(), 0.0);
  out[sk.identity_class] += poly.constant;
  for (const auto& [w, c] : poly.coeffs) {
    auto it = sk.class_of.find(w);
    if (it == sk.class_of.end()) {
      throw std::invalid_argument("polynomial word outside the skeleton");
    }
    out[it->second] += c;
  }
}

}  // namespace

moment::MomentProblem assemble(const Skeleton& sk, const Polynomial& objective) {
  moment::MomentProblem mp;
  mp.n = static_cast<int>(sk.words.size());
  mp.cls = sk.cls;
  mp.nclasses = static_cast<int>(sk.classes.size());
  mp.identity_class = sk.identity_class;
  fill_coeffs(sk, objective, mp.objective);
  mp.validate();
  return mp;
}

moment::MomentProblem assemble(const Skeleton& sk, const Polynomial& objective,
                               const Polynomial& gate, double gate_rhs) {
  moment::MomentProblem mp = assemble(sk, objective);
  fill_coeffs(sk, gate, mp.gate);
  mp.gate_rhs = gate_rhs;
  mp.has_gate = true;
  mp.validate();
  return mp;
}

}  // namespace xot::npa
