#pragma once

#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "xot/moment.hpp"

// Symbolic layer for moment relaxations of noncommutative polynomial
// optimization over projective measurements held by two non-communicating
// devices: letters of different parties commute, letters within one
// measurement are idempotent and mutually orthogonal.
namespace xot::npa {

struct Letter {
  int party = 0;
  int fam = 0;  // measurement family within the party
  int input = 0;
  int outcome = 0;
  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;  // empty = identity

// canonical form: stable-sort by party, then stack-collapse neighbours
// (equal letters merge, same-measurement different-outcome letters
// annihilate); nullopt = the zero operator
std::optional<Word> reduce(const Word& w);

Word reversed_word(const Word& w);

// canonical form of the adjoint; defined for every reduced word
Word adjoint_word(const Word& w);

// representative of {w, adjoint(w)}: their moments agree for real moment
// matrices, and restricting to real ones is lossless because entrywise
// conjugation is a symmetry of the feasible set
Word moment_class(const Word& w);

// real linear combination of reduced words
struct Operand {
  std::map<Word, double> terms;

  static Operand identity();
  static Operand projector(const Letter& l);
  // measurement element written as 1 minus the kept outcomes; used for the
  // top outcome so index sets never carry a redundant projector
  static Operand eliminated(int party, int fam, int input, int noutcomes);
};
Operand operator*(const Operand& a, const Operand& b);
Operand operator*(double s, const Operand& a);
Operand operator+(const Operand& a, const Operand& b);

// linear functional of moments, keyed by moment-class representatives
struct Polynomial {
  double constant = 0.0;
  std::map<Word, double> coeffs;

  void add(const Operand& op, double scale = 1.0);
};

struct Skeleton {
  std::vector<Word> words;  // index set, words[0] = identity
  Eigen::MatrixXi cls;      // moment class per entry, -1 annihilated
  std::vector<Word> classes;
  std::map<Word, int> class_of;
  int identity_class = 0;
};

// words must be reduced, distinct, and start with the identity
Skeleton build_skeleton(const std::vector<Word>& words);

// moment program for max <objective>, optionally gated by <gate> >= gate_rhs;
// throws if a polynomial word does not occur in the skeleton
moment::MomentProblem assemble(const Skeleton& sk, const Polynomial& objective);
moment::MomentProblem assemble(const Skeleton& sk, const Polynomial& objective,
                               const Polynomial& gate, double gate_rhs);

}  // namespace xot::npa
