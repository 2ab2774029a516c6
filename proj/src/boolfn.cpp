#include "advlab/boolfn.hpp"

#include <string>

#include "advlab/errors.hpp"

namespace advlab {

InputLabel assemble_bits(const std::vector<int>& bits) {
  if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxArity))
    throw SizeError("assemble_bits: need between 1 and " + std::to_string(kMaxArity) + " bits");
  InputLabel x = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw DomainError("assemble_bits: bits must be 0/1");
    x |= static_cast<InputLabel>(bits[i]) << i;
  }
  return x;
}

BooleanFunction::BooleanFunction(int arity, std::vector<std::uint8_t> table, int max_arity)
    : arity_(arity), table_(std::move(table)) {
  if (arity < 1 || arity > max_arity)
    throw SizeError("function arity " + std::to_string(arity) + " outside [1, " +
                    std::to_string(max_arity) + "]");
  if (table_.size() != (std::size_t{1} << arity))
    throw SizeError("truth table length " + std::to_string(table_.size()) + " != 2^" +
                    std::to_string(arity));
  for (auto v : table_)
    if (v > 1) throw DomainError("truth table entries must be 0/1");
}

int BooleanFunction::evaluate(InputLabel x) const {
  if (x >= domain_size()) throw DomainError("input label out of range");
  return table_[x];
}

Relation::Relation(int arity, int alphabet, std::vector<std::vector<std::uint8_t>> incidence)
    : arity_(arity), alphabet_(alphabet), incidence_(std::move(incidence)) {
  if (arity < 1 || arity > kMaxArity)
    throw SizeError("relation arity " + std::to_string(arity) + " outside [1, " +
                    std::to_string(kMaxArity) + "]");
  if (alphabet < 1 || alphabet > kMaxAlphabet)
    throw SizeError("relation alphabet size " + std::to_string(alphabet) + " outside [1, " +
                    std::to_string(kMaxAlphabet) + "]");
  if (incidence_.size() != (std::size_t{1} << arity))
    throw SizeError("incidence table must have 2^arity rows");
  for (const auto& row : incidence_) {
    if (row.size() != static_cast<std::size_t>(alphabet))
      throw SizeError("incidence row length != alphabet size");
    for (auto v : row)
      if (v > 1) throw DomainError("incidence entries must be 0/1");
  }
}

bool Relation::contains(InputLabel x, int a) const {
  if (x >= domain_size()) throw DomainError("input label out of range");
  if (a < 1 || a > alphabet_) throw DomainError("output label out of range");
  return incidence_[x][a - 1] != 0;
}

int Relation::valid_count(InputLabel x) const {
  if (x >= domain_size()) throw DomainError("input label out of range");
  int c = 0;
  for (auto v : incidence_[x]) c += v;
  return c;
}

bool Relation::is_total() const {
  for (InputLabel x = 0; x < domain_size(); ++x)
    if (valid_count(x) == 0) return false;
  return true;
}

BooleanFunction compose_function(const BooleanFunction& f, const BooleanFunction& g) {
  int big = f.arity() * g.arity();
  if (big > kMaxArity)
    throw SizeError("composed arity " + std::to_string(big) + " exceeds cap " +
                    std::to_string(kMaxArity));
  std::vector<std::uint8_t> table(std::size_t{1} << big);
  for (InputLabel x = 0; x < (1u << big); ++x)
    table[x] = static_cast<std::uint8_t>(f.evaluate(tilde(g, x, f.arity())));
  return BooleanFunction(big, std::move(table));
}

InputLabel tilde(const BooleanFunction& g, InputLabel x, int blocks) {
  int m = g.arity();
  if (blocks < 1 || blocks * m > kMaxArity) throw SizeError("tilde: block count out of range");
  if (x >= (1u << (blocks * m))) throw DomainError("tilde: input label out of range");
  InputLabel t = 0;
  for (int p = 1; p <= blocks; ++p)
    t |= static_cast<InputLabel>(g.evaluate(block_of(x, p, m))) << (p - 1);
  return t;
}

Relation compose_relation(const Relation& f, const BooleanFunction& g) {
  int big = f.arity() * g.arity();
  if (big > kMaxArity) throw SizeError("composed arity exceeds cap");
  std::vector<std::vector<std::uint8_t>> inc(std::size_t{1} << big);
  for (InputLabel x = 0; x < (1u << big); ++x)
    inc[x] = f.incidence()[tilde(g, x, f.arity())];
  return Relation(big, f.alphabet(), std::move(inc));
}

Relation totalize(const Relation& f) {
  auto inc = f.incidence();
  for (auto& row : inc) {
    bool any = false;
    for (auto v : row) any = any || v;
    if (!any) row.assign(row.size(), 1);
  }
  return Relation(f.arity(), f.alphabet(), std::move(inc));
}

std::vector<double> chi_vector(const Relation& f, int a) {
  if (a < 1 || a > f.alphabet()) throw DomainError("chi_vector: output label out of range");
  std::vector<double> chi(f.domain_size());
  for (InputLabel x = 0; x < f.domain_size(); ++x) chi[x] = f.contains(x, a) ? 1.0 : 0.0;
  return chi;
}

std::vector<double> phi_vector(const Relation& f, const BooleanFunction& g, int a) {
  return chi_vector(compose_relation(f, g), a);
}

BooleanFunction relation_slice(const Relation& f, int a) {
  if (a < 1 || a > f.alphabet()) throw DomainError("relation_slice: output label out of range");
  std::vector<std::uint8_t> table(f.domain_size());
  for (InputLabel x = 0; x < f.domain_size(); ++x)
    table[x] = f.contains(x, a) ? 1 : 0;
  return BooleanFunction(f.arity(), std::move(table));
}

Relation as_relation(const BooleanFunction& g) {
  std::vector<std::vector<std::uint8_t>> inc(g.domain_size());
  for (InputLabel x = 0; x < g.domain_size(); ++x) {
    inc[x] = {0, 0};
    inc[x][g.evaluate(x)] = 1;
  }
  return Relation(g.arity(), 2, std::move(inc));
}

DenseMatrix difference_matrix(int n, int i) {
  if (n < 1 || n > kMaxArity) throw SizeError("difference_matrix: arity out of range");
  if (i < 1 || i > n) throw DomainError("difference_matrix: bit index out of range");
  if ((1u << n) > static_cast<unsigned>(kMaxMatrixDim))
    throw SizeError("difference_matrix exceeds matrix cap");
  int dim = 1 << n;
  DenseMatrix d(dim, dim);
  for (InputLabel x = 0; x < static_cast<InputLabel>(dim); ++x)
    for (InputLabel y = 0; y < static_cast<InputLabel>(dim); ++y)
      d(x, y) = input_bit(x, i) != input_bit(y, i) ? 1.0 : 0.0;
  return d;
}

BooleanFunction and_function(int n) {
  std::vector<std::uint8_t> t(std::size_t{1} << n, 0);
  t.back() = 1;
  return BooleanFunction(n, std::move(t));
}

BooleanFunction or_function(int n) {
  std::vector<std::uint8_t> t(std::size_t{1} << n, 1);
  t.front() = 0;
  return BooleanFunction(n, std::move(t));
}

BooleanFunction parity_function(int n) {
  std::vector<std::uint8_t> t(std::size_t{1} << n);
  for (InputLabel x = 0; x < t.size(); ++x)
    t[x] = static_cast<std::uint8_t>(__builtin_popcount(x) & 1);
  return BooleanFunction(n, std::move(t));
}

BooleanFunction majority3() {
  std::vector<std::uint8_t> t(8);
  for (InputLabel x = 0; x < 8; ++x) t[x] = __builtin_popcount(x) >= 2 ? 1 : 0;
  return BooleanFunction(3, std::move(t));
}

BooleanFunction identity1() { return BooleanFunction(1, {0, 1}); }

Relation find_one_relation(int n) {
  if (n < 1 || n > kMaxArity) throw SizeError("find_one_relation: arity out of range");
  std::vector<std::vector<std::uint8_t>> inc(std::size_t{1} << n);
  for (InputLabel x = 0; x < (1u << n); ++x) {
    inc[x].resize(n);
    for (int a = 1; a <= n; ++a) inc[x][a - 1] = static_cast<std::uint8_t>(input_bit(x, a));
  }
  return totalize(Relation(n, n, std::move(inc)));
}

Relation all_pairs_relation(int n, int k) {
  std::vector<std::vector<std::uint8_t>> inc(std::size_t{1} << n,
                                             std::vector<std::uint8_t>(k, 1));
  return Relation(n, k, std::move(inc));
}

}  // namespace advlab
