#include "advlab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "advlab/eig.hpp"
#include "advlab/errors.hpp"
#include "advlab/sdp.hpp"

namespace advlab {
namespace {

int pow2(int n) { return 1 << n; }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return 0.0;
  if (a.size() != b.size()) throw SizeError("inner product: dimension mismatch");
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
  return s;
}

double norm2(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

void require_gamma_shape(const DenseMatrix& gamma, int arity, const char* what) {
  const int nx = pow2(arity);
  if (gamma.rows() != nx || gamma.cols() != nx)
    throw SizeError(std::string(what) + ": matrix must be 2^arity x 2^arity");
  if (!gamma.all_finite())
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
}

void validate_uv_shape(int arity, int dim,
                       const std::vector<std::vector<std::vector<double>>>& u,
                       const std::vector<std::vector<std::vector<double>>>& v) {
  if (arity < 1 || arity > kMaxArity) throw StructuralError("witness: arity out of range");
  if (dim < 0) throw StructuralError("witness: negative dimension");
  const auto nx = static_cast<std::size_t>(pow2(arity));
  if (u.size() != nx || v.size() != nx)
    throw StructuralError("witness: need one u and one v family per input label");
  for (const auto* fam : {&u, &v})
    for (const auto& per_x : *fam) {
      if (per_x.size() != static_cast<std::size_t>(arity))
        throw StructuralError("witness: need one vector per input coordinate");
      for (const auto& vec : per_x)
        if (!vec.empty() && vec.size() != static_cast<std::size_t>(dim))
          throw StructuralError("witness: vector length differs from declared dim");
    }
}

std::string format_tol(double tol) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", tol);
  return buf;
}

std::string function_cache_key(const BooleanFunction& g) {
  std::string key = "f" + std::to_string(g.arity()) + ":";
  for (auto b : g.table()) key.push_back(b ? '1' : '0');
  return key;
}

std::string relation_cache_key(const Relation& f) {
  std::string key = "r" + std::to_string(f.arity()) + "x" + std::to_string(f.alphabet()) + ":";
  for (const auto& row : f.incidence())
    for (auto b : row) key.push_back(b ? '1' : '0');
  return key;
}

// Read-mostly cache of completed bound solves, keyed by content and tolerance.
class SolveCache {
 public:
  static SolveCache& instance() {
    static SolveCache c;
    return c;
  }
  bool lookup(const std::string& key, BoundCertificate& out) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    out = it->second;
    return true;
  }
  void store(const std::string& key, const BoundCertificate& cert) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_.emplace(key, cert);
  }

 private:
  std::mutex mu_;
  std::map<std::string, BoundCertificate> entries_;
};

// ---------------------------------------------------------------------------
// Gram-program construction.
//
// Variables live in one Gram block G of pairwise inner products, with index
// layout u(x,i) = x*n + (i-1), v(x,i) = n*2^n + x*n + (i-1), and (for the
// relational program) one trailing index per valid pair (x,a), ordered by x
// then a.  Block 1 is the scalar objective t; then one slack scalar per
// u-row-sum constraint and per v-row-sum constraint.
//
// Constraints, in order: ordered pairs (x,y), x != y (x-major); u row sums;
// v row sums; (relational only) per-x sigma normalizations.
// ---------------------------------------------------------------------------
struct BuiltProgram {
  SdpProblem problem;
  int n = 0;
  int nx = 0;
  int gdim = 0;
  std::vector<std::vector<int>> sigma_index;  // [x][a-1] -> Gram index or -1
  std::vector<std::vector<int>> pair_k;       // [x][y] -> constraint index or -1
  std::vector<int> norm_k;                    // [x] -> constraint index (relational)
};

int u_index(int n, InputLabel x, int i0) { return static_cast<int>(x) * n + i0; }
int v_index(int n, int nx, InputLabel x, int i0) {
  return nx * n + static_cast<int>(x) * n + i0;
}

// Exactly one of target (functional / filtered-norm mode) and f (relational
// mode) is non-null.
BuiltProgram build_gram_program(int n, const DenseMatrix* target, const Relation* f) {
  const int nx = pow2(n);
  int gdim = 2 * n * nx;
  std::vector<std::vector<int>> sigma_index;
  if (f != nullptr) {
    sigma_index.assign(nx, std::vector<int>(f->alphabet(), -1));
    for (InputLabel x = 0; x < static_cast<InputLabel>(nx); ++x)
      for (int a = 1; a <= f->alphabet(); ++a)
        if (f->contains(x, a)) sigma_index[x][a - 1] = gdim++;
  }

  std::vector<int> blocks;
  blocks.push_back(gdim);
  blocks.push_back(1);  // t
  for (int s = 0; s < 2 * nx; ++s) blocks.push_back(1);
  SdpProblem p(std::move(blocks), SdpSense::Minimize);
  p.set_objective_entry(1, 0, 0, 1.0);

  std::vector<std::vector<int>> pair_k(nx, std::vector<int>(nx, -1));
  for (InputLabel x = 0; x < static_cast<InputLabel>(nx); ++x)
    for (InputLabel y = 0; y < static_cast<InputLabel>(nx); ++y) {
      if (x == y) continue;
      const double rhs = (target != nullptr) ? (*target)(x, y) : 1.0;
      const int k = p.add_constraint(rhs);
      pair_k[x][y] = k;
      for (int i = 1; i <= n; ++i)
        if (input_bit(x, i) != input_bit(y, i))
          p.set_constraint_entry(k, 0, u_index(n, x, i - 1), v_index(n, nx, y, i - 1), 0.5);
      if (f != nullptr)
        for (int a = 1; a <= f->alphabet(); ++a) {
          const int sx = sigma_index[x][a - 1];
          const int sy = sigma_index[y][a - 1];
          if (sx >= 0 && sy >= 0)
            p.set_constraint_entry(k, 0, std::min(sx, sy), std::max(sx, sy), 0.5);
        }
    }

  for (InputLabel x = 0; x < static_cast<InputLabel>(nx); ++x) {
    const int k = p.add_constraint(0.0);
    for (int i = 0; i < n; ++i)
      p.set_constraint_entry(k, 0, u_index(n, x, i), u_index(n, x, i), 1.0);
    p.set_constraint_entry(k, 1, 0, 0, -1.0);
    p.set_constraint_entry(k, 2 + static_cast<int>(x), 0, 0, 1.0);
  }
  for (InputLabel x = 0; x < static_cast<InputLabel>(nx); ++x) {
    const int k = p.add_constraint(0.0);
    for (int i = 0; i < n; ++i)
      p.set_constraint_entry(k, 0, v_index(n, nx, x, i), v_index(n, nx, x, i), 1.0);
    p.set_constraint_entry(k, 1, 0, 0, -1.0);
    p.set_constraint_entry(k, 2 + nx + static_cast<int>(x), 0, 0, 1.0);
  }

  std::vector<int> norm_k;
  if (f != nullptr) {
    norm_k.assign(nx, -1);
    for (InputLabel x = 0; x < static_cast<InputLabel>(nx); ++x) {
      const int k = p.add_constraint(1.0);
      norm_k[x] = k;
      for (int a = 1; a <= f->alphabet(); ++a) {
        const int s = sigma_index[x][a - 1];
        if (s >= 0) p.set_constraint_entry(k, 0, s, s, 1.0);
      }
    }
  }

  BuiltProgram bp{std::move(p), n, nx, gdim, std::move(sigma_index), std::move(pair_k),
                  std::move(norm_k)};
  return bp;
}

// Factor the solved Gram block into one vector per index, dropping the
// near-null eigendirections.
std::vector<std::vector<double>> extract_vectors(const DenseMatrix& gram) {
  const double gn = spectral_norm(gram);
  const double cutoff = std::max(kRankCutoffScale * gn, 1e-14 * (1.0 + gn));
  return gram_to_vectors(gram, cutoff);
}

int vector_dim(const std::vector<std::vector<double>>& vecs) {
  return vecs.empty() ? 0 : static_cast<int>(vecs.front().size());
}

void fill_uv(const BuiltProgram& bp, const std::vector<std::vector<double>>& vecs,
             std::vector<std::vector<std::vector<double>>>& u,
             std::vector<std::vector<std::vector<double>>>& v) {
  u.assign(bp.nx, std::vector<std::vector<double>>(bp.n));
  v.assign(bp.nx, std::vector<std::vector<double>>(bp.n));
  for (InputLabel x = 0; x < static_cast<InputLabel>(bp.nx); ++x)
    for (int i = 0; i < bp.n; ++i) {
      u[x][i] = vecs[u_index(bp.n, x, i)];
      v[x][i] = vecs[v_index(bp.n, bp.nx, x, i)];
    }
}

void merge_solver_residuals(BoundCertificate& cert, const SdpSolution& sol) {
  cert.residuals["duality_gap"] = sol.duality_gap;
  cert.residuals["sdp_constraint"] = sol.max_constraint_residual;
  cert.residuals["sdp_dual"] = sol.max_dual_residual;
}

}  // namespace

// ---------------------------------------------------------------------------
// Certificate types.
// ---------------------------------------------------------------------------

FunctionalAdversaryMatrix::FunctionalAdversaryMatrix(BooleanFunction fn, DenseMatrix m)
    : g(std::move(fn)), gamma(std::move(m)) {
  require_gamma_shape(gamma, g.arity(), "functional certificate");
  if (!gamma.is_symmetric())
    throw CertificateError("functional certificate: matrix is not symmetric");
  const int nx = pow2(g.arity());
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < nx; ++y)
      if (g.evaluate(x) == g.evaluate(y) && gamma(x, y) != 0.0)
        throw CertificateError(
            "functional certificate: nonzero entry on agreement pair (" +
            std::to_string(x) + "," + std::to_string(y) + ")");
  gamma.symmetrize();
}

std::vector<InputLabel> FunctionalAdversaryMatrix::canonical_order() const {
  std::vector<InputLabel> order;
  for (int bit = 0; bit <= 1; ++bit)
    for (InputLabel x = 0; x < g.domain_size(); ++x)
      if (g.evaluate(x) == bit) order.push_back(x);
  return order;
}

DenseMatrix FunctionalAdversaryMatrix::z_block() const {
  std::vector<InputLabel> zeros, ones;
  for (InputLabel x = 0; x < g.domain_size(); ++x)
    (g.evaluate(x) == 0 ? zeros : ones).push_back(x);
  if (zeros.empty() || ones.empty())
    throw DomainError("z_block: constant function has no cross block");
  DenseMatrix z(static_cast<int>(zeros.size()), static_cast<int>(ones.size()));
  for (std::size_t r = 0; r < zeros.size(); ++r)
    for (std::size_t c = 0; c < ones.size(); ++c)
      z(static_cast<int>(r), static_cast<int>(c)) = gamma(zeros[r], ones[c]);
  return z;
}

RelationalAdversaryMatrix::RelationalAdversaryMatrix(Relation rel, DenseMatrix m, double tol)
    : f(totalize(rel)), gamma(std::move(m)) {
  require_gamma_shape(gamma, f.arity(), "relational certificate");
  if (!gamma.is_symmetric())
    throw CertificateError("relational certificate: matrix is not symmetric");
  gamma.symmetrize();
  const double scale = 1.0 + spectral_norm(gamma);
  const auto margins = nsd_margins();
  for (int a = 1; a <= f.alphabet(); ++a)
    if (margins[a - 1] > tol * scale)
      throw CertificateError("relational certificate: mask for symbol " + std::to_string(a) +
                             " is not negative semidefinite (lambda_max = " +
                             std::to_string(margins[a - 1]) + ")");
}

std::vector<double> RelationalAdversaryMatrix::nsd_margins() const {
  const int nx = pow2(f.arity());
  std::vector<double> out;
  out.reserve(f.alphabet());
  for (int a = 1; a <= f.alphabet(); ++a) {
    const auto chi = chi_vector(f, a);
    DenseMatrix mask(nx, nx);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < nx; ++y) mask(x, y) = gamma(x, y) * chi[x] * chi[y];
    out.push_back(lambda_max(mask));
  }
  return out;
}

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::PrimalMatrix: return "primal-matrix";
    case CertificateKind::DualWitness: return "dual-witness";
    case CertificateKind::SdpSolve: return "sdp-solve";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Primal objective values.
// ---------------------------------------------------------------------------

namespace {
double max_difference_norm(const DenseMatrix& gamma, int n) {
  double denom = 0.0;
  for (int i = 1; i <= n; ++i)
    denom = std::max(denom, spectral_norm(hadamard(gamma, difference_matrix(n, i))));
  return denom;
}
}  // namespace

double adv_primal_value(const FunctionalAdversaryMatrix& m) {
  if (m.gamma.max_abs() == 0.0) return 0.0;
  const double denom = max_difference_norm(m.gamma, m.g.arity());
  // a nonzero functional certificate has a nonzero disagreement entry, and
  // every disagreement pair differs in some coordinate, so denom > 0
  return spectral_norm(m.gamma) / denom;
}

double adv_rel_primal_value(const RelationalAdversaryMatrix& m) {
  const double lam = lambda_max(m.gamma);
  if (lam <= 0.0) return 0.0;
  const double denom = max_difference_norm(m.gamma, m.f.arity());
  if (denom <= 0.0) return 0.0;  // only reachable inside the NSD tolerance
  return lam / denom;
}

DenseMatrix disagreement_matrix(const BooleanFunction& g) {
  const int nx = pow2(g.arity());
  DenseMatrix d(nx, nx);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < nx; ++y) d(x, y) = (g.evaluate(x) != g.evaluate(y)) ? 1.0 : 0.0;
  return d;
}

// ---------------------------------------------------------------------------
// Witness checkers.
// ---------------------------------------------------------------------------

BoundCertificate check_gram_witness(const DenseMatrix& target, const FunctionalDualWitness& w,
                                    double tol) {
  validate_uv_shape(w.arity, w.dim, w.u, w.v);
  const int n = w.arity;
  const int nx = pow2(n);
  if (target.rows() != nx || target.cols() != nx)
    throw SizeError("witness check: target must be 2^arity x 2^arity");
  if (!target.all_finite()) throw DomainError("witness check: target has non-finite entries");

  double value = 0.0;
  for (int x = 0; x < nx; ++x) {
    double su = 0.0, sv = 0.0;
    for (int i = 0; i < n; ++i) {
      su += norm2(w.u[x][i]);
      sv += norm2(w.v[x][i]);
    }
    value = std::max({value, su, sv});
  }

  double resid = 0.0;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < nx; ++y) {
      double lhs = 0.0;
      for (int i = 1; i <= n; ++i)
        if (input_bit(x, i) != input_bit(y, i)) lhs += dot(w.u[x][i - 1], w.v[y][i - 1]);
      resid = std::max(resid, std::fabs(lhs - target(x, y)));
    }

  BoundCertificate cert;
  cert.value = value;
  cert.kind = CertificateKind::DualWitness;
  cert.tolerance = tol;
  cert.residuals["pair_constraint"] = resid;
  cert.pass = resid <= tol;
  cert.functional_witness = w;
  return cert;
}

BoundCertificate check_functional_witness(const BooleanFunction& g,
                                          const FunctionalDualWitness& w, double tol) {
  if (w.arity != g.arity())
    throw StructuralError("witness check: witness arity differs from the function's");
  return check_gram_witness(disagreement_matrix(g), w, tol);
}

BoundCertificate check_relational_witness(const Relation& f, const RelationalDualWitness& w,
                                          double tol) {
  const Relation ft = totalize(f);
  if (w.arity != ft.arity() || w.alphabet != ft.alphabet())
    throw StructuralError("witness check: witness shape differs from the relation's");
  validate_uv_shape(w.arity, w.dim, w.u, w.v);
  const int n = w.arity;
  const int nx = pow2(n);
  const int K = ft.alphabet();
  if (w.sigma.size() != static_cast<std::size_t>(nx))
    throw StructuralError("witness check: need one sigma family per input label");

  std::vector<std::size_t> sigma_dim(K, 0);
  for (int x = 0; x < nx; ++x) {
    if (w.sigma[x].size() != static_cast<std::size_t>(K))
      throw StructuralError("witness check: need one sigma slot per output symbol");
    for (int a = 1; a <= K; ++a) {
      const auto& s = w.sigma[x][a - 1];
      if (s.empty()) continue;
      if (!ft.contains(static_cast<InputLabel>(x), a))
        throw StructuralError("witness check: sigma present on invalid pair (" +
                              std::to_string(x) + "," + std::to_string(a) + ")");
      if (sigma_dim[a - 1] == 0) sigma_dim[a - 1] = s.size();
      if (s.size() != sigma_dim[a - 1])
        throw StructuralError("witness check: sigma dimensions for symbol " +
                              std::to_string(a) + " disagree");
    }
  }

  double value = 0.0;
  for (int x = 0; x < nx; ++x) {
    double su = 0.0, sv = 0.0;
    for (int i = 0; i < n; ++i) {
      su += norm2(w.u[x][i]);
      sv += norm2(w.v[x][i]);
    }
    value = std::max({value, su, sv});
  }

  double pair_resid = 0.0;
  double norm_resid = 0.0;
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < nx; ++y) {
      double sig = 0.0;
      for (int a = 0; a < K; ++a) sig += dot(w.sigma[x][a], w.sigma[y][a]);
      if (x == y) {
        norm_resid = std::max(norm_resid, std::fabs(sig - 1.0));
        continue;
      }
      double lhs = 0.0;
      for (int i = 1; i <= n; ++i)
        if (input_bit(x, i) != input_bit(y, i)) lhs += dot(w.u[x][i - 1], w.v[y][i - 1]);
      pair_resid = std::max(pair_resid, std::fabs(lhs + sig - 1.0));
    }
  }

  BoundCertificate cert;
  cert.value = value;
  cert.kind = CertificateKind::DualWitness;
  cert.tolerance = tol;
  cert.residuals["pair_constraint"] = pair_resid;
  cert.residuals["normalization"] = norm_resid;
  cert.pass = pair_resid <= tol && norm_resid <= tol;
  cert.relational_witness = w;
  return cert;
}

int relational_gram_dimension(const Relation& f) {
  const Relation ft = totalize(f);
  const int n = ft.arity();
  int dim = 2 * n * pow2(n);
  for (InputLabel x = 0; x < ft.domain_size(); ++x) dim += ft.valid_count(x);
  return dim;
}

// ---------------------------------------------------------------------------
// SDP solves.
// ---------------------------------------------------------------------------

BoundCertificate solve_adv(const BooleanFunction& g, double tol) {
  if (g.arity() > kMaxSolveArity)
    throw SizeError("solve_adv: arity " + std::to_string(g.arity()) +
                    " exceeds the Gram-program cap of " + std::to_string(kMaxSolveArity));
  if (!(tol > 0.0)) throw DomainError("solve_adv: tolerance must be positive");

  const std::string key = "adv|" + function_cache_key(g) + "|" + format_tol(tol);
  BoundCertificate cert;
  if (SolveCache::instance().lookup(key, cert)) return cert;

  const DenseMatrix target = disagreement_matrix(g);
  BuiltProgram bp = build_gram_program(g.arity(), &target, nullptr);
  const SdpSolution sol = solve(bp.problem, tol);

  cert = BoundCertificate{};
  cert.value = sol.primal_value;
  cert.kind = CertificateKind::SdpSolve;
  cert.tolerance = tol;
  merge_solver_residuals(cert, sol);

  const auto vecs = extract_vectors(sol.primal[0]);
  FunctionalDualWitness w;
  w.arity = g.arity();
  w.dim = vector_dim(vecs);
  fill_uv(bp, vecs, w.u, w.v);
  const BoundCertificate chk = check_functional_witness(g, w, 1e-6);
  cert.residuals["witness_pair_constraint"] = chk.residuals.at("pair_constraint");
  cert.residuals["witness_value_gap"] = std::fabs(chk.value - cert.value);
  cert.functional_witness = std::move(w);

  // primal certificate from the pair-constraint multipliers, projected onto
  // the agreement zero pattern
  DenseMatrix gamma(bp.nx, bp.nx);
  for (int x = 0; x < bp.nx; ++x)
    for (int y = 0; y < bp.nx; ++y)
      if (x != y && g.evaluate(x) != g.evaluate(y))
        gamma(x, y) = sol.dual[bp.pair_k[x][y]] + sol.dual[bp.pair_k[y][x]];
  gamma.symmetrize();
  const FunctionalAdversaryMatrix pm(g, gamma);
  cert.residuals["primal_certificate_gap"] =
      std::fabs(adv_primal_value(pm) - cert.value) / (1.0 + std::fabs(cert.value));
  cert.gamma = pm.gamma;

  cert.pass = sol.status == SdpStatus::Optimal &&
              cert.residuals.at("witness_pair_constraint") <= 1e-6;
  SolveCache::instance().store(key, cert);
  return cert;
}

BoundCertificate solve_adv_rel(const Relation& f, double tol) {
  const Relation ft = totalize(f);
  if (ft.arity() > kMaxSolveArity)
    throw SizeError("solve_adv_rel: arity " + std::to_string(ft.arity()) +
                    " exceeds the Gram-program cap of " + std::to_string(kMaxSolveArity));
  if (ft.alphabet() > kMaxSolveAlphabet)
    throw SizeError("solve_adv_rel: alphabet " + std::to_string(ft.alphabet()) +
                    " exceeds the Gram-program cap of " + std::to_string(kMaxSolveAlphabet));
  if (!(tol > 0.0)) throw DomainError("solve_adv_rel: tolerance must be positive");

  const std::string key = "advrel|" + relation_cache_key(ft) + "|" + format_tol(tol);
  BoundCertificate cert;
  if (SolveCache::instance().lookup(key, cert)) return cert;

  BuiltProgram bp = build_gram_program(ft.arity(), nullptr, &ft);
  const SdpSolution sol = solve(bp.problem, tol);

  cert = BoundCertificate{};
  cert.value = sol.primal_value;
  cert.kind = CertificateKind::SdpSolve;
  cert.tolerance = tol;
  merge_solver_residuals(cert, sol);

  const auto vecs = extract_vectors(sol.primal[0]);
  RelationalDualWitness w;
  w.arity = ft.arity();
  w.alphabet = ft.alphabet();
  w.dim = vector_dim(vecs);
  fill_uv(bp, vecs, w.u, w.v);
  w.sigma.assign(bp.nx, std::vector<std::vector<double>>(ft.alphabet()));
  for (int x = 0; x < bp.nx; ++x)
    for (int a = 1; a <= ft.alphabet(); ++a) {
      const int s = bp.sigma_index[x][a - 1];
      if (s >= 0) w.sigma[x][a - 1] = vecs[s];
    }
  const BoundCertificate chk = check_relational_witness(ft, w, 1e-6);
  cert.residuals["witness_pair_constraint"] = chk.residuals.at("pair_constraint");
  cert.residuals["witness_normalization"] = chk.residuals.at("normalization");
  cert.residuals["witness_value_gap"] = std::fabs(chk.value - cert.value);
  cert.relational_witness = std::move(w);

  // primal certificate from the multipliers: pair multipliers fill the
  // off-diagonal, normalization multipliers the diagonal; then shift by the
  // worst mask eigenvalue so every mask is negative semidefinite outright
  DenseMatrix gamma(bp.nx, bp.nx);
  for (int x = 0; x < bp.nx; ++x) {
    gamma(x, x) = 2.0 * sol.dual[bp.norm_k[x]];
    for (int y = 0; y < bp.nx; ++y)
      if (x != y) gamma(x, y) = sol.dual[bp.pair_k[x][y]] + sol.dual[bp.pair_k[y][x]];
  }
  gamma.symmetrize();
  double shift = 0.0;
  {
    RelationalAdversaryMatrix probe(ft, gamma, std::numeric_limits<double>::infinity());
    for (double m : probe.nsd_margins()) shift = std::max(shift, m);
    gamma = probe.gamma;
  }
  for (int x = 0; x < bp.nx; ++x) gamma(x, x) -= shift;
  const RelationalAdversaryMatrix pm(ft, gamma);
  cert.residuals["nsd_repair_shift"] = shift;
  cert.residuals["primal_certificate_gap"] =
      std::fabs(adv_rel_primal_value(pm) - cert.value) / (1.0 + std::fabs(cert.value));
  cert.gamma = pm.gamma;

  cert.pass = sol.status == SdpStatus::Optimal &&
              cert.residuals.at("witness_pair_constraint") <= 1e-6 &&
              cert.residuals.at("witness_normalization") <= 1e-6;
  SolveCache::instance().store(key, cert);
  return cert;
}

BoundCertificate gamma2_filtered(const DenseMatrix& a, double tol) {
  if (!a.is_square() || a.rows() < 2)
    throw SizeError("gamma2: target must be square with at least two rows");
  int n = 0;
  while ((1 << n) < a.rows()) ++n;
  if ((1 << n) != a.rows())
    throw SizeError("gamma2: target side must be a power of two");
  if (n > kMaxSolveArity)
    throw SizeError("gamma2: arity exceeds the Gram-program cap");
  if (!a.all_finite()) throw DomainError("gamma2: target has non-finite entries");
  for (int x = 0; x < a.rows(); ++x)
    if (a(x, x) != 0.0)
      throw DomainError("gamma2: nonzero diagonal entry at " + std::to_string(x) +
                        " makes the program infeasible (the coordinate masks vanish there)");
  if (!(tol > 0.0)) throw DomainError("gamma2: tolerance must be positive");

  BuiltProgram bp = build_gram_program(n, &a, nullptr);
  const SdpSolution sol = solve(bp.problem, tol);

  BoundCertificate cert;
  cert.value = sol.primal_value;
  cert.kind = CertificateKind::SdpSolve;
  cert.tolerance = tol;
  merge_solver_residuals(cert, sol);

  const auto vecs = extract_vectors(sol.primal[0]);
  FunctionalDualWitness w;
  w.arity = n;
  w.dim = vector_dim(vecs);
  fill_uv(bp, vecs, w.u, w.v);
  const BoundCertificate chk = check_gram_witness(a, w, 1e-6);
  cert.residuals["witness_pair_constraint"] = chk.residuals.at("pair_constraint");
  cert.residuals["witness_value_gap"] = std::fabs(chk.value - cert.value);
  cert.functional_witness = std::move(w);
  cert.pass = sol.status == SdpStatus::Optimal &&
              cert.residuals.at("witness_pair_constraint") <= 1e-6;
  return cert;
}

// ---------------------------------------------------------------------------
// Target states and measurement accounting.
// ---------------------------------------------------------------------------

TargetStateAssembly assemble_target_states(const Relation& f, const RelationalDualWitness& w) {
  const Relation ft = totalize(f);
  const BoundCertificate chk = check_relational_witness(ft, w, 1e-6);
  if (!chk.pass)
    throw CertificateError("target states need a witness with residual <= 1e-6 "
                           "(pair constraint " +
                           std::to_string(chk.residuals.at("pair_constraint")) +
                           ", normalization " +
                           std::to_string(chk.residuals.at("normalization")) + ")");

  const int nx = pow2(ft.arity());
  const int K = ft.alphabet();
  TargetStateAssembly t;
  t.range_start.assign(K, 0);
  t.range_length.assign(K, 0);
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < K; ++a)
      t.range_length[a] =
          std::max(t.range_length[a], static_cast<int>(w.sigma[x][a].size()));
  int offset = 0;
  for (int a = 0; a < K; ++a) {
    t.range_start[a] = offset;
    offset += t.range_length[a];
  }
  t.total_dim = offset;
  t.states.assign(nx, std::vector<double>(t.total_dim, 0.0));
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < K; ++a) {
      const auto& s = w.sigma[x][a];
      for (std::size_t c = 0; c < s.size(); ++c)
        t.states[x][t.range_start[a] + static_cast<int>(c)] = s[c];
    }
  return t;
}

std::vector<double> measurement_error(const TargetStateAssembly& t,
                                      const std::vector<std::vector<double>>& approx,
                                      const Relation& f) {
  const Relation ft = totalize(f);
  const int nx = pow2(ft.arity());
  if (static_cast<int>(approx.size()) != nx)
    throw SizeError("measurement error: need one approximate state per input");
  if (static_cast<int>(t.states.size()) != nx ||
      static_cast<int>(t.range_start.size()) != ft.alphabet())
    throw SizeError("measurement error: assembly does not match the relation");
  std::vector<double> err(nx, 0.0);
  for (int x = 0; x < nx; ++x) {
    if (static_cast<int>(approx[x].size()) != t.total_dim)
      throw SizeError("measurement error: state dimension mismatch at input " +
                      std::to_string(x));
    for (int a = 1; a <= ft.alphabet(); ++a) {
      if (ft.contains(static_cast<InputLabel>(x), a)) continue;
      const int s = t.range_start[a - 1];
      for (int c = 0; c < t.range_length[a - 1]; ++c)
        err[x] += approx[x][s + c] * approx[x][s + c];
    }
  }
  return err;
}

VerifiabilityReport efficient_verifiability_report(const Relation& f, double tol) {
  const Relation ft = totalize(f);
  VerifiabilityReport rep;
  rep.relational_value = solve_adv_rel(ft, tol).value;
  rep.degenerate = rep.relational_value <= 1e-6;
  for (int a = 1; a <= ft.alphabet(); ++a) {
    rep.slice_values.push_back(solve_adv(relation_slice(ft, a), tol).value);
    rep.ratios.push_back(rep.degenerate
                             ? std::numeric_limits<double>::infinity()
                             : rep.slice_values.back() / rep.relational_value);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Curated certificates and witnesses for the named fixtures.
// ---------------------------------------------------------------------------

namespace {

DenseMatrix star_matrix(int nx, InputLabel center, std::vector<InputLabel> leaves) {
  DenseMatrix m(nx, nx);
  for (InputLabel leaf : leaves) {
    m(center, leaf) = 1.0;
    m(leaf, center) = 1.0;
  }
  return m;
}

// A function-as-relation has K = 2 and exactly one valid symbol per input;
// returns the underlying function if so.
std::optional<BooleanFunction> relation_as_function(const Relation& f) {
  if (f.alphabet() != 2) return std::nullopt;
  std::vector<std::uint8_t> table;
  for (InputLabel x = 0; x < f.domain_size(); ++x) {
    if (f.valid_count(x) != 1) return std::nullopt;
    table.push_back(f.contains(x, 2) ? 1 : 0);
  }
  return BooleanFunction(f.arity(), std::move(table));
}

bool is_all_pairs(const Relation& f) {
  for (InputLabel x = 0; x < f.domain_size(); ++x)
    if (f.valid_count(x) != f.alphabet()) return false;
  return true;
}

}  // namespace

std::optional<FunctionalAdversaryMatrix> curated_functional_certificate(const BooleanFunction& g) {
  if (g.arity() == 1 && g.table() != std::vector<std::uint8_t>{0, 0} &&
      g.table() != std::vector<std::uint8_t>{1, 1})
    return FunctionalAdversaryMatrix(g, DenseMatrix::from_rows({{0, 1}, {1, 0}}));
  if (g == or_function(2))
    return FunctionalAdversaryMatrix(g, star_matrix(4, 0, {1, 2}));
  if (g == and_function(2))
    return FunctionalAdversaryMatrix(g, star_matrix(4, 3, {1, 2}));
  if (g == parity_function(2))
    return FunctionalAdversaryMatrix(g, disagreement_matrix(g));
  return std::nullopt;
}

std::optional<RelationalAdversaryMatrix> curated_relational_certificate(const Relation& f) {
  const Relation ft = totalize(f);
  if (is_all_pairs(ft))
    return RelationalAdversaryMatrix(ft, DenseMatrix(pow2(ft.arity()), pow2(ft.arity())));
  if (auto g = relation_as_function(ft))
    if (auto cert = curated_functional_certificate(*g))
      return RelationalAdversaryMatrix(ft, cert->gamma);
  return std::nullopt;
}

std::optional<FunctionalDualWitness> curated_functional_witness(const BooleanFunction& g) {
  if (g.arity() == 1 && g.table() != std::vector<std::uint8_t>{0, 0} &&
      g.table() != std::vector<std::uint8_t>{1, 1}) {
    FunctionalDualWitness w;
    w.arity = 1;
    w.dim = 1;
    w.u.assign(2, {{1.0}});
    w.v.assign(2, {{1.0}});
    return w;
  }
  if (g == parity_function(2)) {
    // u_{x,i} = v_{x,i} = basis vector picked by the OTHER bit of x; the sum
    // over differing coordinates is then [x and y agree on the other bit],
    // which matches the parity disagreement pattern on all ordered pairs
    FunctionalDualWitness w;
    w.arity = 2;
    w.dim = 2;
    w.u.assign(4, std::vector<std::vector<double>>(2));
    for (InputLabel x = 0; x < 4; ++x) {
      for (int i = 1; i <= 2; ++i) {
        std::vector<double> e(2, 0.0);
        e[input_bit(x, 3 - i)] = 1.0;
        w.u[x][i - 1] = e;
      }
    }
    w.v = w.u;
    return w;
  }
  return std::nullopt;
}

std::optional<RelationalDualWitness> curated_relational_witness(const Relation& f) {
  const Relation ft = totalize(f);
  const int nx = pow2(ft.arity());
  if (is_all_pairs(ft)) {
    RelationalDualWitness w;
    w.arity = ft.arity();
    w.alphabet = ft.alphabet();
    w.dim = 1;
    w.u.assign(nx, std::vector<std::vector<double>>(ft.arity(), {0.0}));
    w.v = w.u;
    w.sigma.assign(nx, std::vector<std::vector<double>>(ft.alphabet()));
    for (int x = 0; x < nx; ++x) w.sigma[x][0] = {1.0};
    return w;
  }
  if (auto g = relation_as_function(ft)) {
    if (auto fw = curated_functional_witness(*g)) {
      RelationalDualWitness w;
      w.arity = ft.arity();
      w.alphabet = 2;
      w.dim = fw->dim;
      w.u = fw->u;
      w.v = fw->v;
      w.sigma.assign(nx, std::vector<std::vector<double>>(2));
      for (InputLabel x = 0; x < static_cast<InputLabel>(nx); ++x)
        w.sigma[x][g->evaluate(x)] = {1.0};
      return w;
    }
  }
  return std::nullopt;
}

FunctionalAdversaryMatrix best_functional_certificate(const BooleanFunction& g, double tol) {
  if (auto c = curated_functional_certificate(g)) return *c;
  const BoundCertificate cert = solve_adv(g, tol);
  if (!cert.gamma)
    throw CertificateError("no primal certificate available for this function");
  return FunctionalAdversaryMatrix(g, *cert.gamma);
}

RelationalAdversaryMatrix best_relational_certificate(const Relation& f, double tol) {
  if (auto c = curated_relational_certificate(f)) return *c;
  const Relation ft = totalize(f);
  const BoundCertificate cert = solve_adv_rel(ft, tol);
  if (!cert.gamma)
    throw CertificateError("no primal certificate available for this relation");
  return RelationalAdversaryMatrix(ft, *cert.gamma);
}

FunctionalDualWitness best_functional_witness(const BooleanFunction& g, double tol) {
  if (auto w = curated_functional_witness(g)) return *w;
  const BoundCertificate cert = solve_adv(g, tol);
  if (!cert.functional_witness)
    throw CertificateError("no dual witness available for this function");
  return *cert.functional_witness;
}

RelationalDualWitness best_relational_witness(const Relation& f, double tol) {
  if (auto w = curated_relational_witness(f)) return *w;
  const Relation ft = totalize(f);
  const BoundCertificate cert = solve_adv_rel(ft, tol);
  if (!cert.relational_witness)
    throw CertificateError("no dual witness available for this relation");
  return *cert.relational_witness;
}

}  // namespace advlab
