#include "advlab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "advlab/eig.hpp"
#include "advlab/errors.hpp"

namespace advlab {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal:
      return "optimal";
    case SdpStatus::MaxIterations:
      return "max-iterations";
    case SdpStatus::InfeasibleDetected:
      return "infeasible-detected";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Problem container.
// ---------------------------------------------------------------------------

SdpProblem::SdpProblem(std::vector<int> block_sizes, SdpSense sense)
    : block_sizes_(std::move(block_sizes)), sense_(sense), total_dim_(0) {
  if (block_sizes_.empty()) throw SizeError("SDP needs at least one block");
  for (int s : block_sizes_) {
    if (s < 1) throw SizeError("SDP block sizes must be positive");
    total_dim_ += s;
  }
  if (total_dim_ > kMaxSdpDimension)
    throw SizeError("SDP total dimension " + std::to_string(total_dim_) + " exceeds cap " +
                    std::to_string(kMaxSdpDimension));
  c_entries_.resize(block_sizes_.size());
}

void SdpProblem::check_entry(int block, int i, int j, double value) const {
  if (block < 0 || block >= num_blocks()) throw DomainError("SDP entry: block out of range");
  int s = block_sizes_[block];
  if (i < 0 || j < 0 || i >= s || j >= s) throw DomainError("SDP entry: index out of range");
  if (i > j) throw DomainError("SDP entry: need i <= j");
  if (!std::isfinite(value)) throw DomainError("SDP entry: value not finite");
}

void SdpProblem::set_objective_entry(int block, int i, int j, double value) {
  check_entry(block, i, j, value);
  c_entries_[block].push_back(Entry{i, j, value});
}

int SdpProblem::add_constraint(double rhs) {
  if (num_constraints() >= kMaxSdpConstraints)
    throw SizeError("SDP constraint count exceeds cap " + std::to_string(kMaxSdpConstraints));
  if (!std::isfinite(rhs)) throw DomainError("SDP constraint: rhs not finite");
  rhs_.push_back(rhs);
  a_entries_.emplace_back(block_sizes_.size());
  return num_constraints() - 1;
}

void SdpProblem::set_constraint_entry(int k, int block, int i, int j, double value) {
  if (k < 0 || k >= num_constraints()) throw DomainError("SDP entry: constraint out of range");
  check_entry(block, i, j, value);
  a_entries_[k][block].push_back(Entry{i, j, value});
}

namespace {
DenseMatrix densify(const std::vector<SdpProblem::Entry>& entries, int size) {
  DenseMatrix m(size, size);
  for (const auto& e : entries) {
    m(e.i, e.j) += e.value;
    if (e.i != e.j) m(e.j, e.i) += e.value;
  }
  return m;
}
}  // namespace

DenseMatrix SdpProblem::objective_matrix(int block) const {
  return densify(c_entries_.at(block), block_sizes_.at(block));
}

DenseMatrix SdpProblem::constraint_matrix(int k, int block) const {
  return densify(a_entries_.at(k).at(block), block_sizes_.at(block));
}

void SdpProblem::validate() const {
  if (num_constraints() < 1) throw StructuralError("SDP has no constraints");
  // Entries are validated on insertion; nothing else can go stale.
}

// ---------------------------------------------------------------------------
// Dense Cholesky helpers (lower-triangular factors).
// ---------------------------------------------------------------------------

namespace {

bool cholesky_in_place(DenseMatrix& a) {
  int n = a.rows();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0 || !std::isfinite(d)) return false;
    double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = 0.0;
  return true;
}

// Solves L L^T x = b in place.
void cholesky_solve(const DenseMatrix& l, std::vector<double>& b) {
  int n = l.rows();
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * b[k];
    b[i] = s / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
    b[i] = s / l(i, i);
  }
}

// Full inverse of L L^T from its Cholesky factor.
DenseMatrix cholesky_inverse(const DenseMatrix& l) {
  int n = l.rows();
  DenseMatrix inv(n, n);
  std::vector<double> col(n);
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    cholesky_solve(l, col);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  inv.symmetrize();
  return inv;
}

// L^{-1} m L^{-T} for symmetric m.
DenseMatrix two_sided_solve(const DenseMatrix& l, const DenseMatrix& m) {
  int n = l.rows();
  DenseMatrix y = m;
  // forward substitution applied to every column: y = L^{-1} m
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = y(i, j);
      for (int k = 0; k < i; ++k) s -= l(i, k) * y(k, j);
      y(i, j) = s / l(i, i);
    }
  // z = y L^{-T}  <=>  z^T = L^{-1} y^T
  DenseMatrix yt = y.transposed();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = yt(i, j);
      for (int k = 0; k < i; ++k) s -= l(i, k) * yt(k, j);
      yt(i, j) = s / l(i, i);
    }
  DenseMatrix z = yt.transposed();
  z.symmetrize();
  return z;
}

struct FullEntry {
  int r, c;
  double v;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// Interior-point solver.
// ---------------------------------------------------------------------------

namespace {

class InteriorPoint {
 public:
  InteriorPoint(const SdpProblem& p, double tol, int max_iter)
      : p_(p), tol_(tol), max_iter_(max_iter), nb_(p.num_blocks()), m_(p.num_constraints()) {
    sizes_ = p.block_sizes();
    ntot_ = p.total_dimension();
    flip_ = p.sense() == SdpSense::Maximize ? -1.0 : 1.0;

    b_.resize(m_);
    for (int k = 0; k < m_; ++k) b_[k] = p.rhs(k);

    // Dense objective per block, negated for maximize so the core always
    // minimizes.
    for (int blk = 0; blk < nb_; ++blk)
      cmat_.push_back(p.objective_matrix(blk).scaled(flip_));
    cmax_ = 0.0;
    for (const auto& c : cmat_) cmax_ = std::max(cmax_, c.max_abs());

    // Expanded (mirrored) constraint entries for fast trace products.
    full_.resize(m_);
    for (int k = 0; k < m_; ++k) {
      full_[k].resize(nb_);
      for (int blk = 0; blk < nb_; ++blk) {
        for (const auto& e : p.constraint_entries(k)[blk]) {
          full_[k][blk].push_back(FullEntry{e.i, e.j, e.value});
          if (e.i != e.j) full_[k][blk].push_back(FullEntry{e.j, e.i, e.value});
        }
      }
    }

    double bmax = 0.0;
    for (double v : b_) bmax = std::max(bmax, std::fabs(v));
    bmax_ = bmax;
    double rho = std::max(10.0, 2.0 * bmax);
    for (int blk = 0; blk < nb_; ++blk) {
      x_.push_back(DenseMatrix::identity(sizes_[blk]).scaled(rho));
      s_.push_back(DenseMatrix::identity(sizes_[blk]));
    }
    y_.assign(m_, 0.0);
  }

  SdpSolution run() {
    SdpSolution best;
    double best_score = kInfinity;
    double min_feasible_gap = kInfinity;
    int stall_count = 0;
    int iter = 0;
    SdpStatus status = SdpStatus::MaxIterations;

    const bool trace = std::getenv("ADVLAB_SDP_TRACE") != nullptr;
    for (iter = 0; iter <= max_iter_; ++iter) {
      compute_residuals();
      double score = std::max({prim_err_, dual_err_, gap_err_});
      if (trace)
        std::fprintf(stderr, "iter %3d  pobj % .6e  dobj % .6e  prim %.2e  dual %.2e  gap %.2e\n",
                     iter, pobj_, dobj_, prim_err_, dual_err_, gap_err_);
      if (prim_err_ <= tol_) min_feasible_gap = std::min(min_feasible_gap, pobj_ - dobj_);
      if (score < best_score) {
        best_score = score;
        snapshot(best);
      }
      if (score <= tol_) {
        status = SdpStatus::Optimal;
        snapshot(best);
        break;
      }
      if (diverging()) {
        status = SdpStatus::InfeasibleDetected;
        break;
      }
      if (iter == max_iter_) break;

      double ap = 0.0, ad = 0.0;
      if (!newton_step(ap, ad)) {
        status = SdpStatus::MaxIterations;  // numerical dead end; keep best
        break;
      }
      if (ap < 1e-4 && ad < 1e-4) {
        if (++stall_count >= 3) break;
      } else {
        stall_count = 0;
      }
    }

    // steps can bottom out a small factor above very tight targets; an
    // iterate that close is still a certified optimum (residuals are
    // reported as measured either way)
    if (status == SdpStatus::MaxIterations && best_score <= 100.0 * tol_)
      status = SdpStatus::Optimal;

    best.status = status;
    best.iterations = iter;
    if (!std::isfinite(min_feasible_gap)) min_feasible_gap = best.primal_value * flip_ - best.dual_value * flip_;
    best.min_feasible_gap = min_feasible_gap;
    return best;
  }

 private:
  const SdpProblem& p_;
  double tol_;
  int max_iter_;
  int nb_, m_, ntot_ = 0;
  double flip_ = 1.0, cmax_ = 0.0, bmax_ = 0.0;
  std::vector<int> sizes_;
  std::vector<double> b_, y_;
  std::vector<DenseMatrix> cmat_, x_, s_;
  std::vector<std::vector<std::vector<FullEntry>>> full_;  // [k][block]

  // residual state refreshed by compute_residuals()
  double pobj_ = 0.0, dobj_ = 0.0, prim_err_ = 0.0, dual_err_ = 0.0, gap_err_ = 0.0;
  std::vector<double> rp_;
  std::vector<DenseMatrix> rd_;

  static double trace_product(const DenseMatrix& a, const DenseMatrix& b) {
    double s = 0.0;
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) s += da[i] * db[i];
    return s;  // both symmetric
  }

  double constraint_value(int k, const std::vector<DenseMatrix>& x) const {
    double s = 0.0;
    for (int blk = 0; blk < nb_; ++blk)
      for (const auto& e : full_[k][blk]) s += e.v * x[blk](e.r, e.c);
    return s;
  }

  // Sum of y_k A_k, dense per block.
  std::vector<DenseMatrix> weighted_constraint_sum(const std::vector<double>& w) const {
    std::vector<DenseMatrix> out;
    for (int blk = 0; blk < nb_; ++blk) out.emplace_back(sizes_[blk], sizes_[blk]);
    for (int k = 0; k < m_; ++k) {
      double wk = w[k];
      if (wk == 0.0) continue;
      for (int blk = 0; blk < nb_; ++blk)
        for (const auto& e : full_[k][blk]) out[blk](e.r, e.c) += wk * e.v;
    }
    return out;
  }

  void compute_residuals() {
    pobj_ = 0.0;
    for (int blk = 0; blk < nb_; ++blk) pobj_ += trace_product(cmat_[blk], x_[blk]);
    dobj_ = 0.0;
    for (int k = 0; k < m_; ++k) dobj_ += b_[k] * y_[k];

    rp_.assign(m_, 0.0);
    prim_err_ = 0.0;
    for (int k = 0; k < m_; ++k) {
      rp_[k] = b_[k] - constraint_value(k, x_);
      prim_err_ = std::max(prim_err_, std::fabs(rp_[k]) / (1.0 + std::fabs(b_[k])));
    }

    rd_ = weighted_constraint_sum(y_);
    dual_err_ = 0.0;
    for (int blk = 0; blk < nb_; ++blk) {
      rd_[blk] = cmat_[blk] - s_[blk] - rd_[blk];
      dual_err_ = std::max(dual_err_, rd_[blk].max_abs() / (1.0 + cmax_));
    }

    gap_err_ = std::fabs(pobj_ - dobj_) / (1.0 + std::fabs(pobj_) + std::fabs(dobj_));
  }

  bool diverging() const {
    double xmax = 0.0, ymax = 0.0;
    for (const auto& xb : x_) xmax = std::max(xmax, xb.max_abs());
    for (double v : y_) ymax = std::max(ymax, std::fabs(v));
    return xmax > 1e12 * (1.0 + bmax_) || ymax > 1e11 * (1.0 + cmax_);
  }

  void snapshot(SdpSolution& out) const {
    out.primal = x_;
    out.dual_slack = s_;
    out.dual = y_;
    for (auto& yk : out.dual) yk *= flip_;
    out.primal_value = flip_ * pobj_;
    out.dual_value = flip_ * dobj_;
    out.max_constraint_residual = prim_err_;
    out.max_dual_residual = dual_err_;
    out.duality_gap = gap_err_;
    double mineig = kInfinity;
    for (const auto& xb : x_) mineig = std::min(mineig, lambda_min(xb));
    out.min_block_eigenvalue = mineig;
  }

  // Largest step alpha with x + alpha dx >= 0 (capped at 1).
  double max_step(const DenseMatrix& x, const DenseMatrix& dx) const {
    if (x.rows() == 1) {
      double xv = x(0, 0), dv = dx(0, 0);
      if (dv >= 0.0) return 1.0;
      return std::min(1.0, -xv / dv);
    }
    DenseMatrix l = x;
    if (!cholesky_in_place(l)) return 0.0;
    DenseMatrix t = two_sided_solve(l, dx);
    double lmin = sym_eigenvalues(t).back();
    if (lmin >= -1e-14) return 1.0;
    return std::min(1.0, -1.0 / lmin);
  }

  double joint_step(const std::vector<DenseMatrix>& base,
                    const std::vector<DenseMatrix>& dir) const {
    double a = 1.0;
    for (int blk = 0; blk < nb_; ++blk) a = std::min(a, max_step(base[blk], dir[blk]));
    return a;
  }

  // One predictor-corrector iteration; returns false on numerical breakdown.
  // ap/ad receive the taken step lengths.
  bool newton_step(double& ap, double& ad) {
    // Factor S and form its inverse per block.
    std::vector<DenseMatrix> sinv;
    for (int blk = 0; blk < nb_; ++blk) {
      DenseMatrix l = s_[blk];
      if (!cholesky_in_place(l)) return false;
      sinv.push_back(cholesky_inverse(l));
    }

    double mu = 0.0;
    for (int blk = 0; blk < nb_; ++blk) mu += trace_product(x_[blk], s_[blk]);
    mu /= ntot_;

    // Schur complement M_kj = Tr(A_k X A_j S^{-1}).
    DenseMatrix schur(std::max(m_, 1), std::max(m_, 1));
    for (int k = 0; k < m_; ++k)
      for (int j = k; j < m_; ++j) {
        double sum = 0.0;
        for (int blk = 0; blk < nb_; ++blk) {
          const auto& ek = full_[k][blk];
          const auto& ej = full_[j][blk];
          if (ek.empty() || ej.empty()) continue;
          const DenseMatrix& xb = x_[blk];
          const DenseMatrix& ib = sinv[blk];
          for (const auto& e : ek)
            for (const auto& f : ej) sum += e.v * f.v * xb(e.c, f.r) * ib(f.c, e.r);
        }
        schur(k, j) = sum;
        schur(j, k) = sum;
      }

    // Cholesky with a deterministic ridge fallback for the late, nearly
    // singular stage.
    DenseMatrix lm = schur;
    double ridge = 0.0;
    if (!cholesky_in_place(lm)) {
      double base = 0.0;
      for (int k = 0; k < m_; ++k) base = std::max(base, schur(k, k));
      ridge = 1e-14 * (1.0 + base);
      for (int attempt = 0; attempt < 8; ++attempt) {
        lm = schur;
        for (int k = 0; k < m_; ++k) lm(k, k) += ridge;
        if (cholesky_in_place(lm)) break;
        ridge *= 100.0;
        if (attempt == 7) return false;
      }
    }

    auto solve_schur = [&](std::vector<double> rhs) {
      std::vector<double> dy = rhs;
      cholesky_solve(lm, dy);
      // two rounds of iterative refinement with the exact Schur matrix
      for (int round = 0; round < 2; ++round) {
        std::vector<double> resid = rhs;
        for (int k = 0; k < m_; ++k) {
          double acc = 0.0;
          for (int j = 0; j < m_; ++j) acc += schur(k, j) * dy[j];
          resid[k] -= acc;
        }
        cholesky_solve(lm, resid);
        for (int k = 0; k < m_; ++k) dy[k] += resid[k];
      }
      return dy;
    };

    // W = X Rd S^{-1} per block (Rd from compute_residuals of this iterate).
    std::vector<DenseMatrix> w;
    for (int blk = 0; blk < nb_; ++blk) w.push_back(x_[blk] * rd_[blk] * sinv[blk]);

    auto trace_against = [&](int k, const std::vector<DenseMatrix>& mats) {
      double s = 0.0;
      for (int blk = 0; blk < nb_; ++blk)
        for (const auto& e : full_[k][blk]) s += e.v * mats[blk](e.c, e.r);
      return s;
    };

    auto assemble_direction = [&](const std::vector<double>& dy, double nu,
                                  const std::vector<DenseMatrix>* w2,
                                  std::vector<DenseMatrix>& dxout,
                                  std::vector<DenseMatrix>& dsout) {
      dsout = weighted_constraint_sum(dy);
      for (int blk = 0; blk < nb_; ++blk) dsout[blk] = rd_[blk] - dsout[blk];
      dxout.clear();
      for (int blk = 0; blk < nb_; ++blk) {
        DenseMatrix dx = x_[blk].scaled(-1.0) - x_[blk] * dsout[blk] * sinv[blk];
        if (nu != 0.0) dx = dx + sinv[blk].scaled(nu);
        if (w2) dx = dx - (*w2)[blk];
        dx.symmetrize();
        dxout.push_back(std::move(dx));
      }
    };

    // Predictor: pure Newton step toward complementarity zero.
    std::vector<double> rhs_aff(m_);
    for (int k = 0; k < m_; ++k) rhs_aff[k] = b_[k] + trace_against(k, w);
    std::vector<double> dy_aff = solve_schur(rhs_aff);
    std::vector<DenseMatrix> dx_aff, ds_aff;
    assemble_direction(dy_aff, 0.0, nullptr, dx_aff, ds_aff);

    double ap_aff = joint_step(x_, dx_aff);
    double ad_aff = joint_step(s_, ds_aff);
    double mu_aff = 0.0;
    for (int blk = 0; blk < nb_; ++blk) {
      DenseMatrix xa = x_[blk] + dx_aff[blk].scaled(ap_aff);
      DenseMatrix sa = s_[blk] + ds_aff[blk].scaled(ad_aff);
      mu_aff += trace_product(xa, sa);
    }
    mu_aff = std::max(0.0, mu_aff / ntot_);
    double sigma = mu > 0.0 ? std::pow(mu_aff / mu, 3.0) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);
    double nu = sigma * mu;

    // Corrector with the Mehrotra second-order term dX_aff dS_aff S^{-1}.
    std::vector<DenseMatrix> w2;
    for (int blk = 0; blk < nb_; ++blk) w2.push_back(dx_aff[blk] * ds_aff[blk] * sinv[blk]);
    std::vector<double> rhs_cor(m_);
    for (int k = 0; k < m_; ++k)
      rhs_cor[k] = b_[k] - nu * trace_against(k, sinv) + trace_against(k, w) +
                   trace_against(k, w2);
    std::vector<double> dy = solve_schur(rhs_cor);
    std::vector<DenseMatrix> dx, ds;
    assemble_direction(dy, nu, &w2, dx, ds);

    const double tau = 0.95;
    ap = std::min(1.0, tau * joint_step(x_, dx));
    ad = std::min(1.0, tau * joint_step(s_, ds));

    // Apply, retreating deterministically if rounding pushed an update to the
    // cone boundary.
    for (int attempt = 0; attempt < 30; ++attempt) {
      bool ok = true;
      std::vector<DenseMatrix> xn, sn;
      for (int blk = 0; blk < nb_; ++blk) {
        xn.push_back(x_[blk] + dx[blk].scaled(ap));
        sn.push_back(s_[blk] + ds[blk].scaled(ad));
      }
      for (int blk = 0; blk < nb_ && ok; ++blk) {
        DenseMatrix lx = xn[blk], ls = sn[blk];
        ok = cholesky_in_place(lx) && cholesky_in_place(ls);
      }
      if (ok) {
        x_ = std::move(xn);
        s_ = std::move(sn);
        for (int k = 0; k < m_; ++k) y_[k] += ad * dy[k];
        return true;
      }
      ap *= 0.8;
      ad *= 0.8;
    }
    return false;
  }
};

}  // namespace

SdpSolution solve(const SdpProblem& problem, double tol, int max_iter) {
  problem.validate();
  if (tol <= 0.0 || !std::isfinite(tol)) throw DomainError("SDP tolerance must be positive");
  if (max_iter < 1) throw DomainError("SDP max_iter must be positive");
  InteriorPoint ip(problem, tol, max_iter);
  return ip.run();
}

std::vector<std::vector<double>> gram_to_vectors(const DenseMatrix& g, double tol) {
  if (!g.is_square()) throw DomainError("gram_to_vectors requires a square matrix");
  auto eig = sym_eig(g);
  int n = g.rows();
  double norm = std::max(std::fabs(eig.eigenvalues.front()), std::fabs(eig.eigenvalues.back()));
  double floor = -tol * (1.0 + norm);
  if (eig.eigenvalues.back() < floor)
    throw DomainError("gram_to_vectors: matrix is indefinite (min eigenvalue " +
                      std::to_string(eig.eigenvalues.back()) + ")");
  std::vector<int> kept;
  for (int k = 0; k < n; ++k)
    if (eig.eigenvalues[k] > tol) kept.push_back(k);
  int r = static_cast<int>(kept.size());
  std::vector<std::vector<double>> vecs(n, std::vector<double>(std::max(r, 0)));
  for (int idx = 0; idx < r; ++idx) {
    double root = std::sqrt(eig.eigenvalues[kept[idx]]);
    for (int row = 0; row < n; ++row) vecs[row][idx] = root * eig.eigenvectors(row, kept[idx]);
  }
  return vecs;
}

}  // namespace advlab
