#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

namespace latact {

// Relative tolerance for pairwise dots of an orthogonal basis.
inline constexpr double kOrthogonalityTol = 1e-9;
// Relative pivot threshold for numerical rank.
inline constexpr double kRankTol = 1e-9;
// Minimum norm for a basis vector to count as non-zero.
inline constexpr double kBasisMinNorm = 1e-9;

/// Dense real vector. Checked constructors reject empty vectors and
/// non-finite entries; `unchecked` skips the finite scan for internal
/// hot paths whose inputs are already validated.
class Vector {
 public:
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries);

  static Vector zeros(int dim);
  static Vector unit(int dim, int axis);
  static Vector unchecked(std::vector<double> entries);

  int dim() const { return static_cast<int>(entries_.size()); }
  double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  struct UncheckedTag {};
  Vector(std::vector<double> entries, UncheckedTag);

  std::vector<double> entries_;
};

// Left-to-right sequential sum, so repeated runs of one build are
// bit-identical. Throws on dimension mismatch.
double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);

Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scaled(const Vector& a, double s);

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix(int rows, int cols);  // zero-filled
  Matrix(int rows, int cols, std::vector<double> entries);

  static Matrix identity(int n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double at(int r, int c) const {
    return entries_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double& at(int r, int c) {
    return entries_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const std::vector<double>& entries() const { return entries_; }

  Matrix transposed() const;

 private:
  int rows_;
  int cols_;
  std::vector<double> entries_;
};

Vector matvec(const Matrix& a, const Vector& x);

// Numerical rank via row reduction with partial pivoting. Pivots with
// absolute value <= tol * max|entry| count as zero.
int rank(const Matrix& m, double tol = kRankTol);

// A unit-norm x with m*x ~ 0, found by back-substitution on the row echelon
// form, or nullopt when the matrix has full column rank.
std::optional<Vector> null_space_vector(const Matrix& m, double tol = kRankTol);

/// A full orthogonal basis of R^n: n mutually orthogonal non-zero vectors.
/// The constructor validates the pairwise-orthogonality and non-zero-norm
/// invariants and throws if they do not hold.
class OrthogonalBasis {
 public:
  explicit OrthogonalBasis(std::vector<Vector> vectors);

  static OrthogonalBasis standard(int n);

  int dim() const { return static_cast<int>(vectors_.size()); }
  const std::vector<Vector>& vectors() const { return vectors_; }
  const Vector& operator[](int i) const {
    return vectors_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<Vector> vectors_;
};

// n orthonormal vectors from Gram-Schmidt on seeded Gaussian draws, with one
// re-orthogonalization pass and re-draw on near-dependence. Deterministic
// for a fixed seed.
OrthogonalBasis random_orthogonal_basis(int n, std::uint64_t seed);

}  // namespace latact
