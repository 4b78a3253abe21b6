#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "latact/linalg.hpp"
#include "latact/rng.hpp"

using namespace latact;

namespace {

Vector random_vector(int dim, Rng& rng) {
  std::vector<double> e(static_cast<std::size_t>(dim));
  for (double& v : e) v = rng.gaussian();
  return Vector::unchecked(std::move(e));
}

// Test-only rank oracle: counts Gram-Schmidt survivors among the rows.
// Independent of the row-reduction path used by rank().
int gram_schmidt_rank(const Matrix& m, double rel_tol) {
  std::vector<std::vector<double>> basis;
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (int c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m.at(r, c);
    double orig = 0.0;
    for (double x : v) orig += x * x;
    orig = std::sqrt(orig);
    if (orig == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const std::vector<double>& u : basis) {
        double proj = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) proj += v[i] * u[i];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
      }
    }
    double res = 0.0;
    for (double x : v) res += x * x;
    res = std::sqrt(res);
    if (res > rel_tol * orig) {
      for (double& x : v) x /= res;
      basis.push_back(std::move(v));
    }
  }
  return static_cast<int>(basis.size());
}

}  // namespace

TEST_CASE("dot computes the sum of products") {
  CHECK(dot(Vector{1, 2}, Vector{3, 4}) == 11.0);
  CHECK(dot(Vector{1, 0, 0}, Vector{0, 1, 0}) == 0.0);
  // 0.5*4 - 2*1 + 3*2 = 2 - 2 + 6
  CHECK(dot(Vector{0.5, -2, 3}, Vector{4, 1, 2}) == 6.0);
}

TEST_CASE("dot rejects mismatched dimensions") {
  CHECK_THROWS_AS(dot(Vector{1, 2}, Vector{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("dot is bitwise symmetric") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + rng.below(32);
    const Vector a = random_vector(dim, rng);
    const Vector b = random_vector(dim, rng);
    // Same summation order, products commute exactly.
    CHECK(dot(a, b) == dot(b, a));
  }
}

TEST_CASE("Cauchy-Schwarz holds on random vectors") {
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + rng.below(48);
    const Vector a = random_vector(dim, rng);
    const Vector b = random_vector(dim, rng);
    CHECK(std::fabs(dot(a, b)) <= norm(a) * norm(b) + 1e-9);
  }
}

TEST_CASE("norm matches known values") {
  CHECK(norm(Vector{3, 4}) == 5.0);
  CHECK(norm(Vector{0, 0, 0}) == 0.0);
  CHECK(norm(Vector{1, 1, 1, 1}) == 2.0);
}

TEST_CASE("vector validation rejects bad input") {
  CHECK_THROWS_AS(Vector(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS((Vector{1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS((Vector{std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
}

TEST_CASE("random_orthogonal_basis produces orthonormal vectors") {
  const OrthogonalBasis basis = random_orthogonal_basis(3, 5);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::fabs(norm(basis[i]) - 1.0) <= 1e-12);
    for (int j = i + 1; j < 3; ++j) {
      CHECK(std::fabs(dot(basis[i], basis[j])) < 1e-9);
    }
  }
}

TEST_CASE("random_orthogonal_basis in R^1 is a sign") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 99ULL}) {
    const OrthogonalBasis basis = random_orthogonal_basis(1, seed);
    CHECK(std::fabs(std::fabs(basis[0][0]) - 1.0) <= 1e-12);
  }
}

TEST_CASE("random_orthogonal_basis spans R^8") {
  const OrthogonalBasis basis = random_orthogonal_basis(8, 42);
  const Matrix m = Matrix::from_rows(basis.vectors());
  CHECK(gram_schmidt_rank(m, 1e-6) == 8);
  CHECK(rank(m, 1e-9) == 8);
}

TEST_CASE("random_orthogonal_basis is deterministic per seed") {
  const OrthogonalBasis a = random_orthogonal_basis(6, 77);
  const OrthogonalBasis b = random_orthogonal_basis(6, 77);
  for (int i = 0; i < 6; ++i) {
    for (int c = 0; c < 6; ++c) {
      CHECK(std::bit_cast<std::uint64_t>(a[i][c]) ==
            std::bit_cast<std::uint64_t>(b[i][c]));
    }
  }
}

TEST_CASE("basis invariants hold across dims and seeds") {
  for (int n = 1; n <= 64; n += (n < 8 ? 1 : 7)) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const OrthogonalBasis basis = random_orthogonal_basis(n, seed);
      REQUIRE(basis.dim() == n);
      for (int i = 0; i < n; ++i) {
        REQUIRE(std::fabs(norm(basis[i]) - 1.0) <= 1e-12);
        for (int j = i + 1; j < n; ++j) {
          REQUIRE(std::fabs(dot(basis[i], basis[j])) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("OrthogonalBasis constructor rejects bad bases") {
  CHECK_THROWS_AS(OrthogonalBasis({Vector{1, 0}, Vector{1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OrthogonalBasis({Vector{1, 0}, Vector{0, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OrthogonalBasis({Vector{1, 0, 0}, Vector{0, 1, 0}}),
                  std::invalid_argument);  // incomplete
}

TEST_CASE("rank of known matrices") {
  CHECK(rank(Matrix::identity(3), 1e-9) == 3);
  // Third row is the sum of the first two.
  const Matrix dependent(3, 3, {1, 0, 1, 0, 1, 1, 1, 1, 2});
  CHECK(rank(dependent, 1e-9) == 2);
  CHECK(gram_schmidt_rank(dependent, 1e-6) == 2);
  CHECK(rank(Matrix(2, 4), 1e-9) == 0);
}

TEST_CASE("rank is bounded and unchanged by a duplicated row") {
  Rng rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 1 + rng.below(6);
    const int cols = 1 + rng.below(6);
    std::vector<Vector> rs;
    for (int r = 0; r < rows; ++r) rs.push_back(random_vector(cols, rng));
    const Matrix m = Matrix::from_rows(rs);
    const int r1 = rank(m, 1e-9);
    CHECK(r1 <= std::min(rows, cols));

    rs.push_back(rs[static_cast<std::size_t>(rng.below(rows))]);
    CHECK(rank(Matrix::from_rows(rs), 1e-9) == r1);
  }
}

TEST_CASE("null_space_vector finds a null combination") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    // rows x cols with rows < cols always has a null vector.
    const int cols = 2 + rng.below(8);
    const int rows = 1 + rng.below(cols - 1);
    std::vector<Vector> rs;
    for (int r = 0; r < rows; ++r) rs.push_back(random_vector(cols, rng));
    const Matrix m = Matrix::from_rows(rs);

    const auto x = null_space_vector(m, 1e-9);
    REQUIRE(x.has_value());
    CHECK(std::fabs(norm(*x) - 1.0) <= 1e-12);
    const Vector residual = matvec(m, *x);
    CHECK(norm(residual) <= 1e-9 * (1.0 + norm(Vector::unchecked(m.entries()))));
  }
}

TEST_CASE("null_space_vector is empty for full column rank") {
  CHECK_FALSE(null_space_vector(Matrix::identity(4), 1e-9).has_value());
  const Matrix tall(3, 2, {1, 0, 0, 1, 1, 1});
  CHECK_FALSE(null_space_vector(tall, 1e-9).has_value());
}

TEST_CASE("matrix validation") {
  CHECK_THROWS_AS(Matrix(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(0, 2), std::invalid_argument);
  const Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  const Matrix t = m.transposed();
  CHECK(t.rows() == 3);
  CHECK(t.at(0, 1) == 4.0);
  CHECK(matvec(m, Vector{1, 1, 1})[0] == 6.0);
  CHECK_THROWS_AS(matvec(m, Vector{1, 1}), std::invalid_argument);
}
