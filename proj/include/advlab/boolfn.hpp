#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advlab/matrix.hpp"

namespace advlab {

// ---------------------------------------------------------------------------
// Input labels.
//
// An n-bit input x is stored as an unsigned integer in [0, 2^n).  Bit i of x
// (1-based, i in [n]) is the coefficient of 2^(i-1), i.e. bit 1 is the least
// significant bit.  When x is written as a string (x_1, ..., x_n), x_1 comes
// first; so the integer 1 with n = 2 is the string "10".
//
// Composed inputs to f . g^N (f of arity N, g of arity m) pack block p into
// bits (p-1)m + 1 ... p m; block 1 occupies the least significant bits.
// ---------------------------------------------------------------------------

using InputLabel = std::uint32_t;

inline int input_bit(InputLabel x, int i) { return static_cast<int>((x >> (i - 1)) & 1u); }

// Builds a label from bits b[0] = x_1, b[1] = x_2, ...
InputLabel assemble_bits(const std::vector<int>& bits);

// Extracts block p (1-based) of m bits from a composed label.
inline InputLabel block_of(InputLabel x, int p, int m) {
  return (x >> ((p - 1) * m)) & ((1u << m) - 1u);
}

inline constexpr int kMaxArity = 12;
inline constexpr int kMaxAlphabet = 64;

// ---------------------------------------------------------------------------
// Total Boolean function on n-bit inputs, stored as a full truth table
// indexed by input label.
// ---------------------------------------------------------------------------
class BooleanFunction {
 public:
  BooleanFunction(int arity, std::vector<std::uint8_t> table, int max_arity = kMaxArity);

  int arity() const { return arity_; }
  std::uint32_t domain_size() const { return 1u << arity_; }
  int evaluate(InputLabel x) const;
  const std::vector<std::uint8_t>& table() const { return table_; }

  bool operator==(const BooleanFunction& o) const {
    return arity_ == o.arity_ && table_ == o.table_;
  }

 private:
  int arity_;
  std::vector<std::uint8_t> table_;
};

// ---------------------------------------------------------------------------
// Relation on n-bit inputs with output alphabet [K]: an incidence table
// telling which outputs a are valid for which inputs x.  Outputs are 1-based.
// ---------------------------------------------------------------------------
class Relation {
 public:
  Relation(int arity, int alphabet, std::vector<std::vector<std::uint8_t>> incidence);

  int arity() const { return arity_; }
  int alphabet() const { return alphabet_; }
  std::uint32_t domain_size() const { return 1u << arity_; }

  bool contains(InputLabel x, int a) const;  // is (x, a) in the relation?
  int valid_count(InputLabel x) const;
  bool is_total() const;

  const std::vector<std::vector<std::uint8_t>>& incidence() const { return incidence_; }

  bool operator==(const Relation& o) const {
    return arity_ == o.arity_ && alphabet_ == o.alphabet_ && incidence_ == o.incidence_;
  }

 private:
  int arity_;
  int alphabet_;
  std::vector<std::vector<std::uint8_t>> incidence_;  // [2^n][K]
};

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

// h = f . g^N where N = f.arity(); h has arity N * g.arity().
BooleanFunction compose_function(const BooleanFunction& f, const BooleanFunction& g);

// The outer input string tilde(x) = (g(x_1), ..., g(x_N)) as a label.
InputLabel tilde(const BooleanFunction& g, InputLabel x, int blocks);

// Composed relation: (x, a) in f . g^N  iff  (tilde(x), a) in f.
Relation compose_relation(const Relation& f, const BooleanFunction& g);

// Rows with no valid output are replaced by all-valid rows ("don't care").
Relation totalize(const Relation& f);

// 0/1 indicator column of {x : (x, a) in f}, length 2^n.
std::vector<double> chi_vector(const Relation& f, int a);

// Indicator of {x : (tilde(x), a) in f} over composed inputs; identical to
// chi_vector(compose_relation(f, g), a).
std::vector<double> phi_vector(const Relation& f, const BooleanFunction& g, int a);

// The Boolean function x -> [ (x, a) in f ] for a fixed output a.
BooleanFunction relation_slice(const Relation& f, int a);

// A total function viewed as a relation with K = 2: (x, a) valid iff
// g(x) = a - 1.
Relation as_relation(const BooleanFunction& g);

// D_i(x, y) = [x_i != y_i], a 2^n x 2^n 0/1 matrix.
DenseMatrix difference_matrix(int n, int i);

// ---------------------------------------------------------------------------
// Named fixtures.
// ---------------------------------------------------------------------------
BooleanFunction and_function(int n);
BooleanFunction or_function(int n);
BooleanFunction parity_function(int n);
BooleanFunction majority3();
BooleanFunction identity1();

// FIND-ONE_n: outputs in [n], (x, a) valid iff x_a = 1; the all-zero row is
// totalized to all-valid.
Relation find_one_relation(int n);

// Every (x, a) valid; the trivial relation with bound 0.
Relation all_pairs_relation(int n, int k);

}  // namespace advlab
