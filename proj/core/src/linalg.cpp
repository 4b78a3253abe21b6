#include "latact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "latact/rng.hpp"

namespace latact {

namespace {

void check_entries_finite(const std::vector<double>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i])) {
      throw std::invalid_argument("non-finite entry at index " +
                                  std::to_string(i));
    }
  }
}

void check_nonempty(const std::vector<double>& entries) {
  if (entries.empty()) {
    throw std::invalid_argument("vector must have at least one entry");
  }
}

}  // namespace

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  check_nonempty(entries_);
  check_entries_finite(entries_);
}

Vector::Vector(std::initializer_list<double> entries)
    : Vector(std::vector<double>(entries)) {}

Vector::Vector(std::vector<double> entries, UncheckedTag)
    : entries_(std::move(entries)) {
  check_nonempty(entries_);
}

Vector Vector::zeros(int dim) {
  if (dim < 1) throw std::invalid_argument("vector dim must be >= 1");
  return Vector(std::vector<double>(static_cast<std::size_t>(dim), 0.0),
                UncheckedTag{});
}

Vector Vector::unit(int dim, int axis) {
  if (axis < 0 || axis >= dim) {
    throw std::invalid_argument("unit vector axis out of range");
  }
  Vector v = zeros(dim);
  v[axis] = 1.0;
  return v;
}

Vector Vector::unchecked(std::vector<double> entries) {
  return Vector(std::move(entries), UncheckedTag{});
}

double dot(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("dot: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
  double sum = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector add(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("add: dimension mismatch");
  }
  std::vector<double> out(a.entries());
  for (int i = 0; i < b.dim(); ++i) out[static_cast<std::size_t>(i)] += b[i];
  return Vector::unchecked(std::move(out));
}

Vector sub(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("sub: dimension mismatch");
  }
  std::vector<double> out(a.entries());
  for (int i = 0; i < b.dim(); ++i) out[static_cast<std::size_t>(i)] -= b[i];
  return Vector::unchecked(std::move(out));
}

Vector scaled(const Vector& a, double s) {
  std::vector<double> out(a.entries());
  for (double& x : out) x *= s;
  return Vector::unchecked(std::move(out));
}

Matrix::Matrix(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
               0.0) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("matrix dims must be >= 1");
  }
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("matrix dims must be >= 1");
  }
  const std::size_t expected =
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (entries_.size() != expected) {
    throw std::invalid_argument(
        "matrix entries length " + std::to_string(entries_.size()) +
        " does not equal rows*cols = " + std::to_string(expected));
  }
  check_entries_finite(entries_);
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) throw std::invalid_argument("from_rows: no rows");
  const int cols = rows.front().dim();
  Matrix m(static_cast<int>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].dim() != cols) {
      throw std::invalid_argument("from_rows: ragged row " + std::to_string(r));
    }
    for (int c = 0; c < cols; ++c) m.at(static_cast<int>(r), c) = rows[r][c];
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  }
  return t;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.dim()) {
    throw std::invalid_argument("matvec: matrix has " +
                                std::to_string(a.cols()) +
                                " cols but vector dim is " +
                                std::to_string(x.dim()));
  }
  std::vector<double> out(static_cast<std::size_t>(a.rows()), 0.0);
  for (int r = 0; r < a.rows(); ++r) {
    double sum = 0.0;
    for (int c = 0; c < a.cols(); ++c) sum += a.at(r, c) * x[c];
    out[static_cast<std::size_t>(r)] = sum;
  }
  return Vector::unchecked(std::move(out));
}

namespace {

// Row echelon form with partial pivoting. Pivot magnitudes <= threshold
// count as zero; their columns are left free.
struct Echelon {
  std::vector<double> u;  // row-major, rows x cols
  std::vector<int> pivot_cols;
  int rows = 0;
  int cols = 0;

  double at(int r, int c) const {
    return u[static_cast<std::size_t>(r) * cols + c];
  }
  double& at(int r, int c) { return u[static_cast<std::size_t>(r) * cols + c]; }
};

Echelon eliminate(const Matrix& m, double tol) {
  Echelon e;
  e.rows = m.rows();
  e.cols = m.cols();
  e.u = m.entries();

  double scale = 0.0;
  for (double x : e.u) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0) return e;  // zero matrix, rank 0
  const double threshold = tol * scale;

  int pivot_row = 0;
  for (int c = 0; c < e.cols && pivot_row < e.rows; ++c) {
    int best = pivot_row;
    for (int r = pivot_row + 1; r < e.rows; ++r) {
      if (std::fabs(e.at(r, c)) > std::fabs(e.at(best, c))) best = r;
    }
    if (std::fabs(e.at(best, c)) <= threshold) continue;  // free column

    if (best != pivot_row) {
      for (int j = 0; j < e.cols; ++j) std::swap(e.at(best, j), e.at(pivot_row, j));
    }
    for (int r = pivot_row + 1; r < e.rows; ++r) {
      const double factor = e.at(r, c) / e.at(pivot_row, c);
      if (factor == 0.0) continue;
      for (int j = c; j < e.cols; ++j) {
        e.at(r, j) -= factor * e.at(pivot_row, j);
      }
      e.at(r, c) = 0.0;
    }
    e.pivot_cols.push_back(c);
    ++pivot_row;
  }
  return e;
}

}  // namespace

int rank(const Matrix& m, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("rank: tol must be > 0");
  return static_cast<int>(eliminate(m, tol).pivot_cols.size());
}

std::optional<Vector> null_space_vector(const Matrix& m, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("null_space_vector: tol must be > 0");
  }
  const Echelon e = eliminate(m, tol);
  const int r = static_cast<int>(e.pivot_cols.size());
  if (r == m.cols()) return std::nullopt;

  // First free column: pivot columns are increasing, so the first index
  // where they disagree with 0,1,2,... is free.
  int free_col = r;  // if all pivots are the leading columns
  for (int k = 0; k < r; ++k) {
    if (e.pivot_cols[static_cast<std::size_t>(k)] != k) {
      free_col = k;
      break;
    }
  }

  std::vector<double> x(static_cast<std::size_t>(m.cols()), 0.0);
  x[static_cast<std::size_t>(free_col)] = 1.0;
  for (int k = r - 1; k >= 0; --k) {
    const int c = e.pivot_cols[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (int j = c + 1; j < e.cols; ++j) {
      sum += e.at(k, j) * x[static_cast<std::size_t>(j)];
    }
    x[static_cast<std::size_t>(c)] = -sum / e.at(k, c);
  }

  double len = 0.0;
  for (double v : x) len += v * v;
  len = std::sqrt(len);
  for (double& v : x) v /= len;
  return Vector::unchecked(std::move(x));
}

OrthogonalBasis::OrthogonalBasis(std::vector<Vector> vectors)
    : vectors_(std::move(vectors)) {
  const int n = static_cast<int>(vectors_.size());
  if (n < 1) throw std::invalid_argument("basis must contain vectors");
  std::vector<double> norms(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const Vector& v = vectors_[static_cast<std::size_t>(i)];
    if (v.dim() != n) {
      throw std::invalid_argument(
          "basis of R^" + std::to_string(n) + " needs " + std::to_string(n) +
          "-dimensional vectors, got dim " + std::to_string(v.dim()));
    }
    norms[static_cast<std::size_t>(i)] = norm(v);
    if (norms[static_cast<std::size_t>(i)] < kBasisMinNorm) {
      throw std::invalid_argument("basis vector " + std::to_string(i) +
                                  " is numerically zero");
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = dot(vectors_[static_cast<std::size_t>(i)],
                           vectors_[static_cast<std::size_t>(j)]);
      const double limit = kOrthogonalityTol * norms[static_cast<std::size_t>(i)] *
                           norms[static_cast<std::size_t>(j)];
      if (std::fabs(d) > limit) {
        throw std::invalid_argument(
            "basis vectors " + std::to_string(i) + " and " + std::to_string(j) +
            " are not orthogonal (dot = " + std::to_string(d) + ")");
      }
    }
  }
}

OrthogonalBasis OrthogonalBasis::standard(int n) {
  std::vector<Vector> vs;
  vs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) vs.push_back(Vector::unit(n, i));
  return OrthogonalBasis(std::move(vs));
}

OrthogonalBasis random_orthogonal_basis(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("basis dim must be >= 1");
  Rng rng(seed);
  std::vector<Vector> vs;
  vs.reserve(static_cast<std::size_t>(n));

  while (static_cast<int>(vs.size()) < n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (double& x : g) x = rng.gaussian();
    Vector v = Vector::unchecked(std::move(g));
    const double original = norm(v);
    if (original < 1e-12) continue;

    // Modified Gram-Schmidt with one re-orthogonalization pass; classical
    // GS loses orthogonality at the 1e-9 tolerance used here.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& u : vs) {
        const double proj = dot(v, u);
        for (int i = 0; i < n; ++i) v[i] -= proj * u[i];
      }
    }
    const double residual = norm(v);
    if (residual < 1e-6 * original) continue;  // near-dependent draw, retry
    vs.push_back(scaled(v, 1.0 / residual));
  }
  return OrthogonalBasis(std::move(vs));
}

}  // namespace latact
