#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "vtorch/core.hpp"

namespace vtorch {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

// Full symmetric pattern in compressed column storage. Symmetry is an
// invariant checked at assembly time, not a storage optimization.
struct SymSparse {
  SpMat A;
  int n() const { return static_cast<int>(A.rows()); }
};

inline double max_abs_value(const SpMat& A) {
  double m = 0;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// Largest |A - A^T| entry over the stored pattern.
inline double symmetry_gap(const SymSparse& s) {
  SpMat D = SpMat(s.A.transpose()) - s.A;
  return max_abs_value(D);
}

inline void check_symmetry(const SymSparse& s) {
  const double gap = symmetry_gap(s);
  if (gap > 1e-12 * max_abs_value(s.A))
    throw AsymmetricMatrix("assembled matrix asymmetry " + std::to_string(gap) +
                           " exceeds 1e-12 * max|A|");
}

// Builds an n x n symmetric matrix from triplets, summing duplicates. The
// diagonal is always part of the pattern so Dirichlet elimination can pivot
// on it later.
inline SymSparse assemble(int n, const std::vector<Triplet>& triplets) {
  for (const Triplet& t : triplets)
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n)
      throw ValidationError("triplet index out of range");
  std::vector<Triplet> full = triplets;
  full.reserve(full.size() + n);
  for (int i = 0; i < n; ++i) full.emplace_back(i, i, 0.0);
  SymSparse s;
  s.A.resize(n, n);
  s.A.setFromTriplets(full.begin(), full.end());
  s.A.makeCompressed();
  check_symmetry(s);
  return s;
}

// Direct solver for symmetric (possibly indefinite) systems: symmetric row
// equilibration (the monolithic tangents mix stiffness-, interface-, and
// mass-scaled blocks) followed by simplicial LDLT with iterative refinement
// to the 1e-10 relative-residual contract, sparse LU as fallback when the
// Cholesky-type factorization is not accurate enough.
class SymSolver {
 public:
  void factorize(const SymSparse& s) {
    const SpMat& A = s.A;
    Eigen::VectorXd rmax = Eigen::VectorXd::Zero(A.rows());
    for (int j = 0; j < A.outerSize(); ++j)
      for (SpMat::InnerIterator it(A, j); it; ++it) {
        const double a = std::abs(it.value());
        rmax[it.row()] = std::max(rmax[it.row()], a);
        rmax[it.col()] = std::max(rmax[it.col()], a);
      }
    scale_ = (rmax.array() > 0).select(rmax.array().rsqrt(), 1.0);
    scaled_ = scale_.asDiagonal() * A * scale_.asDiagonal();
    if (!analyzed_ || pat_n_ != A.rows() || pat_nnz_ != A.nonZeros()) {
      ldlt_.analyzePattern(scaled_);
      analyzed_ = true;
      lu_analyzed_ = false;
      pat_n_ = A.rows();
      pat_nnz_ = A.nonZeros();
    }
    use_lu_ = false;
    lu_ok_ = false;
    ldlt_.factorize(scaled_);
    if (ldlt_.info() != Eigen::Success) switch_to_lu();
  }

  Eigen::VectorXd solve(const SymSparse& s, const Eigen::VectorXd& b) {
    const double bnorm = b.norm();
    Eigen::VectorXd x = refine(s.A, b, bnorm);
    if (x.size() > 0) return x;
    if (!use_lu_) {
      switch_to_lu();
      x = refine(s.A, b, bnorm);
      if (x.size() > 0) return x;
    }
    throw SingularMatrix("linear solve failed to reach 1e-10 relative residual");
  }

 private:
  void switch_to_lu() {
    use_lu_ = true;
    if (!lu_analyzed_) {
      lu_.analyzePattern(scaled_);
      lu_analyzed_ = true;
    }
    lu_.factorize(scaled_);
    lu_ok_ = (lu_.info() == Eigen::Success);
    if (!lu_ok_) throw SingularMatrix("sparse LU factorization failed");
  }

  Eigen::VectorXd backsolve(const Eigen::VectorXd& b) const {
    const Eigen::VectorXd w = scale_.cwiseProduct(b);
    if (use_lu_) return scale_.cwiseProduct(lu_.solve(w));
    return scale_.cwiseProduct(ldlt_.solve(w));
  }

  // Residual in extended precision: near-singular steps have |x| >> |b|, and
  // the double-precision floor eps*|A||x| can sit above the 1e-10 target.
  static Eigen::VectorXd residual(const SpMat& A, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& x) {
    std::vector<long double> acc(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) acc[i] = b[i];
    for (int j = 0; j < A.outerSize(); ++j)
      for (SpMat::InnerIterator it(A, j); it; ++it)
        acc[it.row()] -= static_cast<long double>(it.value()) * x[it.col()];
    Eigen::VectorXd r(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) r[i] = static_cast<double>(acc[i]);
    return r;
  }

  // Empty vector signals that the residual target was not met.
  Eigen::VectorXd refine(const SpMat& A, const Eigen::VectorXd& b, double bnorm) {
    Eigen::VectorXd x = backsolve(b);
    if (!x.allFinite()) return {};
    for (int round = 0; round < 8; ++round) {
      const Eigen::VectorXd r = residual(A, b, x);
      if (r.norm() <= 1e-10 * bnorm) return x;
      if (round == 7) break;
      Eigen::VectorXd dx = backsolve(r);
      if (!dx.allFinite()) return {};
      x += dx;
    }
    return {};
  }

  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::SparseLU<SpMat> lu_;
  Eigen::VectorXd scale_;
  SpMat scaled_;
  bool analyzed_ = false, lu_analyzed_ = false, lu_ok_ = false, use_lu_ = false;
  Eigen::Index pat_n_ = -1, pat_nnz_ = -1;
};

inline Eigen::VectorXd solve_sym(const SymSparse& s, const Eigen::VectorXd& b) {
  SymSolver solver;
  solver.factorize(s);
  return solver.solve(s, b);
}

// Global DOF numbering (dof = node * dofs_per_node + component) plus the
// constrained subset with prescribed values.
struct DofLayout {
  int n_dofs = 0;
  int dofs_per_node = 1;
  std::vector<std::pair<int, double>> constraints;  // sorted by finalize()

  int dof(int node, int comp) const { return node * dofs_per_node + comp; }

  void constrain(int d, double value) { constraints.emplace_back(d, value); }

  void finalize() {
    std::sort(constraints.begin(), constraints.end());
    for (size_t i = 0; i + 1 < constraints.size(); ++i)
      if (constraints[i].first == constraints[i + 1].first &&
          constraints[i].second != constraints[i + 1].second)
        throw ValidationError("conflicting prescribed values on dof " +
                              std::to_string(constraints[i].first));
    constraints.erase(std::unique(constraints.begin(), constraints.end()),
                      constraints.end());
    for (auto& [d, v] : constraints)
      if (d < 0 || d >= n_dofs) throw ValidationError("constrained dof out of range");
  }

  bool is_constrained(int d) const {
    auto it = std::lower_bound(constraints.begin(), constraints.end(),
                               std::make_pair(d, -std::numeric_limits<double>::infinity()));
    return it != constraints.end() && it->first == d;
  }
};

// Symmetric elimination: zero row and column, 1 on the diagonal, prescribed
// values moved to the right-hand side.
inline void apply_dirichlet(SymSparse& s, Eigen::VectorXd& b, const DofLayout& layout) {
  const int n = s.n();
  std::vector<char> mark(n, 0);
  std::vector<double> val(n, 0.0);
  for (const auto& [d, v] : layout.constraints) {
    mark[d] = 1;
    val[d] = v;
  }
  SpMat& A = s.A;
  for (const auto& [d, v] : layout.constraints) {
    if (v == 0.0) continue;
    for (SpMat::InnerIterator it(A, d); it; ++it)
      if (!mark[it.row()]) b[it.row()] -= it.value() * v;
  }
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it)
      if (mark[c] || mark[it.row()]) it.valueRef() = (it.row() == c) ? 1.0 : 0.0;
  for (const auto& [d, v] : layout.constraints) b[d] = v;
}

// Fixed-pattern assembler over the free DOFs of a layout. Scatter positions
// are resolved once; reassembly only writes values, so Newton loops and
// density sweeps avoid repeated setFromTriplets calls.
class ReducedPattern {
 public:
  ReducedPattern() = default;

  ReducedPattern(const DofLayout& layout, std::vector<std::vector<int>> element_dofs)
      : edofs_(std::move(element_dofs)) {
    const int n = layout.n_dofs;
    red_.assign(n, -1);
    cval_.assign(n, 0.0);
    std::vector<char> mark(n, 0);
    for (const auto& [d, v] : layout.constraints) {
      mark[d] = 1;
      cval_[d] = v;
    }
    free_.reserve(n - layout.constraints.size());
    for (int d = 0; d < n; ++d)
      if (!mark[d]) {
        red_[d] = static_cast<int>(free_.size());
        free_.push_back(d);
      }
    const int nf = n_free();

    std::vector<Triplet> trips;
    for (const auto& ed : edofs_)
      for (int gi : ed)
        for (int gj : ed)
          if (red_[gi] >= 0 && red_[gj] >= 0)
            trips.emplace_back(red_[gi], red_[gj], 0.0);
    for (int i = 0; i < nf; ++i) trips.emplace_back(i, i, 0.0);
    A_.A.resize(nf, nf);
    A_.A.setFromTriplets(trips.begin(), trips.end());
    A_.A.makeCompressed();
    b_.resize(nf);
    bacc_.assign(nf, 0.0L);

    scat_.resize(edofs_.size());
    rowmap_.resize(edofs_.size());
    for (size_t e = 0; e < edofs_.size(); ++e) {
      const auto& ed = edofs_[e];
      const int m = static_cast<int>(ed.size());
      rowmap_[e].resize(m);
      for (int i = 0; i < m; ++i) rowmap_[e][i] = red_[ed[i]];
      scat_[e].assign(static_cast<size_t>(m) * m, -1);
      for (int j = 0; j < m; ++j) {
        const int fj = red_[ed[j]];
        if (fj < 0) continue;
        for (int i = 0; i < m; ++i) {
          const int fi = red_[ed[i]];
          if (fi < 0) continue;
          scat_[e][static_cast<size_t>(i) * m + j] = value_slot(fi, fj);
        }
      }
    }

    tperm_.resize(A_.A.nonZeros());
    const int* outer = A_.A.outerIndexPtr();
    const int* inner = A_.A.innerIndexPtr();
    for (int c = 0; c < nf; ++c)
      for (int k = outer[c]; k < outer[c + 1]; ++k) tperm_[k] = value_slot(c, inner[k]);
  }

  int n_free() const { return static_cast<int>(free_.size()); }
  int free_index(int full_dof) const { return red_[full_dof]; }
  const std::vector<int>& free_dofs() const { return free_; }
  double constrained_value(int full_dof) const { return cval_[full_dof]; }

  void begin() {
    std::fill(A_.A.valuePtr(), A_.A.valuePtr() + A_.A.nonZeros(), 0.0);
    std::fill(bacc_.begin(), bacc_.end(), 0.0L);
  }

  // Scatters the element matrix (and optionally an element residual) onto the
  // free block; prescribed values contribute -K_ic * value_c to the rhs. The
  // rhs accumulates in extended precision: a converged residual is a tiny
  // difference of element-scale terms, and plain double accumulation leaves
  // noise above the Newton tolerance on fine meshes.
  template <class Scalar = double>
  void add(int e, const Eigen::Ref<const Eigen::MatrixXd>& Kloc,
           const Scalar* Rloc = nullptr) {
    const auto& ed = edofs_[e];
    const int m = static_cast<int>(ed.size());
    const int* rows = rowmap_[e].data();
    const int* slots = scat_[e].data();
    double* vals = A_.A.valuePtr();
    for (int i = 0; i < m; ++i) {
      const int fi = rows[i];
      if (fi < 0) continue;
      if (Rloc) bacc_[fi] += Rloc[i];
      for (int j = 0; j < m; ++j) {
        const int s = slots[i * m + j];
        if (s >= 0) {
          vals[s] += Kloc(i, j);
        } else {
          const double v = cval_[ed[j]];
          if (v != 0.0) bacc_[fi] -= static_cast<long double>(Kloc(i, j)) * v;
        }
      }
    }
  }

  void add_rhs(int full_dof, double v) {
    const int fi = red_[full_dof];
    if (fi >= 0) bacc_[fi] += v;
  }

  // Symmetry audit over the cached pattern; mirrors assemble()'s invariant.
  void finish() {
    for (int i = 0; i < n_free(); ++i) b_[i] = static_cast<double>(bacc_[i]);
    const double* vals = A_.A.valuePtr();
    double gap = 0, amax = 0;
    for (Eigen::Index k = 0; k < A_.A.nonZeros(); ++k) {
      amax = std::max(amax, std::abs(vals[k]));
      gap = std::max(gap, std::abs(vals[k] - vals[tperm_[k]]));
    }
    asym_ = (amax > 0) ? gap / amax : 0.0;
    if (gap > 1e-12 * amax)
      throw AsymmetricMatrix("assembled matrix asymmetry ratio " + std::to_string(asym_));
  }

  double asymmetry_ratio() const { return asym_; }
  SymSparse& matrix() { return A_; }
  const SymSparse& matrix() const { return A_; }
  Eigen::VectorXd& rhs() { return b_; }

  // Writes a free-dof vector back into a full-size vector.
  void scatter_free(const Eigen::VectorXd& xf, Eigen::VectorXd& full) const {
    for (int i = 0; i < n_free(); ++i) full[free_[i]] = xf[i];
  }

 private:
  int value_slot(int row, int col) const {
    const int* outer = A_.A.outerIndexPtr();
    const int* inner = A_.A.innerIndexPtr();
    const int* lo = inner + outer[col];
    const int* hi = inner + outer[col + 1];
    const int* it = std::lower_bound(lo, hi, row);
    return static_cast<int>(it - inner);
  }

  std::vector<std::vector<int>> edofs_;
  std::vector<int> red_, free_;
  std::vector<double> cval_;
  std::vector<std::vector<int>> scat_, rowmap_;
  std::vector<int> tperm_;
  SymSparse A_;
  Eigen::VectorXd b_;
  std::vector<long double> bacc_;
  double asym_ = 0;
};

}  // namespace vtorch
