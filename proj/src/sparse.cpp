#include "ccg/sparse.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <sstream>

namespace ccg {

SparseMatrix::SparseMatrix(Storage m) : m_(std::move(m)) { m_.makeCompressed(); }

SparseMatrix::SparseMatrix(int n, std::vector<int> row_offsets, std::vector<int> columns,
                           std::vector<double> values) {
  if (static_cast<int>(row_offsets.size()) != n + 1 || columns.size() != values.size() ||
      static_cast<std::size_t>(row_offsets.back()) != columns.size()) {
    throw std::invalid_argument("inconsistent CSR arrays");
  }
  m_ = Eigen::Map<const Storage>(n, n, static_cast<int>(values.size()), row_offsets.data(),
                                 columns.data(), values.data());
  m_.makeCompressed();
}

SparseMatrix SparseMatrix::identity(int n) {
  Storage m(n, n);
  m.setIdentity();
  return SparseMatrix(std::move(m));
}

SparseMatrix SparseMatrix::diagonal(const Eigen::VectorXd& d) {
  const int n = static_cast<int>(d.size());
  std::vector<int> offsets(n + 1);
  std::vector<int> cols(n);
  std::vector<double> vals(d.data(), d.data() + n);
  for (int i = 0; i <= n; ++i) offsets[i] = i;
  for (int i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

std::span<const int> SparseMatrix::row_offsets() const {
  return {m_.outerIndexPtr(), static_cast<std::size_t>(m_.rows() + 1)};
}

std::span<const int> SparseMatrix::columns() const {
  return {m_.innerIndexPtr(), nnz()};
}

std::span<const double> SparseMatrix::values() const { return {m_.valuePtr(), nnz()}; }

void SparseMatrix::prune(double tol) {
  m_.prune([tol](int, int, double v) { return std::abs(v) > tol; });
  m_.makeCompressed();
}

SparseMatrix SparseMatrix::transpose() const {
  Storage t = m_.transpose();
  return SparseMatrix(std::move(t));
}

void SparseMatrix::pin_row(int i) {
  for (Storage::InnerIterator it(m_, i); it; ++it) it.valueRef() = it.col() == i ? 1.0 : 0.0;
  if (m_.coeff(i, i) != 1.0) m_.coeffRef(i, i) = 1.0;
  prune(0.0);
}

SparseMatrix combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  SparseMatrix::Storage m = alpha * a.eigen() + beta * b.eigen();
  return SparseMatrix(std::move(m));
}

NnzReport nnz_report(const SparseMatrix& m) {
  NnzReport r;
  r.rows = m.rows();
  for (double v : m.values()) {
    if (std::abs(v) > kDropTolerance) ++r.nnz;
  }
  r.nnz_per_row = r.rows > 0 ? static_cast<double>(r.nnz) / r.rows : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = (a.eigen() * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

std::uint64_t pattern_hash(const SparseMatrix& a) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(a.rows()));
  for (int v : a.row_offsets()) mix(static_cast<std::uint64_t>(v));
  for (int v : a.columns()) mix(static_cast<std::uint64_t>(v));
  return h;
}

}  // namespace

struct LinearSolver::Impl {
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
  std::uint64_t analyzed = 0;
  bool has_analysis = false;
};

LinearSolver::LinearSolver(SolverOptions options)
    : options_(options), impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  const int n = a.rows();
  if (b.size() != n) {
    throw std::invalid_argument("rhs length " + std::to_string(b.size()) +
                                " does not match matrix size " + std::to_string(n));
  }
  info_ = {};
  if (n == 0) return Eigen::VectorXd();
  if (b.norm() == 0.0) return Eigen::VectorXd::Zero(n);

  Eigen::VectorXd x;
  if (n <= options_.direct_cap) {
    info_.direct = true;
    const ColMatrix col = a.eigen();
    const std::uint64_t h = pattern_hash(a);
    if (!impl_->has_analysis || impl_->analyzed != h) {
      impl_->lu.analyzePattern(col);
      impl_->analyzed = h;
      impl_->has_analysis = true;
    }
    impl_->lu.factorize(col);
    if (impl_->lu.info() != Eigen::Success) {
      impl_->has_analysis = false;
      throw SolveError("sparse LU factorization failed (n = " + std::to_string(n) +
                       "): " + impl_->lu.lastErrorMessage());
    }
    x = impl_->lu.solve(b);
    info_.residual = relative_residual(a, x, b);
    // one step of iterative refinement when LU alone misses the target
    if (info_.residual > options_.tolerance) {
      x += impl_->lu.solve(b - a.eigen() * x);
      info_.residual = relative_residual(a, x, b);
    }
  } else {
    info_.direct = false;
    const ColMatrix col = a.eigen();
    Eigen::GMRES<ColMatrix, Eigen::IncompleteLUT<double>> gmres;
    gmres.preconditioner().setDroptol(1e-5);
    gmres.preconditioner().setFillfactor(20);
    gmres.set_restart(options_.restart);
    gmres.setTolerance(options_.tolerance * 0.5);
    gmres.setMaxIterations(options_.max_iterations);
    gmres.compute(col);
    if (gmres.info() != Eigen::Success) {
      throw SolveError("ILUT preconditioner setup failed (n = " + std::to_string(n) + ")");
    }
    x = gmres.solve(b);
    info_.iterations = static_cast<int>(gmres.iterations());
    info_.residual = relative_residual(a, x, b);
    // GMRES stops on its own residual estimate; tighten and restart from x
    // while the true residual misses the target
    double tol = options_.tolerance * 0.5;
    for (int attempt = 0; attempt < 4 && info_.residual > options_.tolerance; ++attempt) {
      tol *= 0.1;
      gmres.setTolerance(tol);
      x = gmres.solveWithGuess(b, x);
      info_.iterations += static_cast<int>(gmres.iterations());
      info_.residual = relative_residual(a, x, b);
    }
  }
  if (!(info_.residual <= options_.tolerance)) {
    std::ostringstream msg;
    msg << (info_.direct ? "direct" : "GMRES") << " solve missed the residual target: n = " << n
        << ", relative residual = " << info_.residual << ", iterations = " << info_.iterations;
    throw SolveError(msg.str());
  }
  return x;
}

Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b,
                             const SolverOptions& options, SolveInfo* info) {
  LinearSolver solver(options);
  Eigen::VectorXd x = solver.solve(a, b);
  if (info) *info = solver.info();
  return x;
}

Eigen::VectorXd solve_cg(const SparseMatrix& a, const Eigen::VectorXd& b, double tolerance,
                         int max_iterations) {
  Eigen::ConjugateGradient<SparseMatrix::Storage, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(tolerance);
  cg.setMaxIterations(max_iterations);
  cg.compute(a.eigen());
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "conjugate gradients did not converge: iterations = " << cg.iterations()
        << ", estimated error = " << cg.error();
    throw SolveError(msg.str());
  }
  return x;
}

}  // namespace ccg
