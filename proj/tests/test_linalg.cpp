#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fiax/linalg.hpp"

using namespace fiax;

namespace {

const Field Q{0};
const Field F2{2};
const Field F5{5};

Mat from_rows(Field f, std::vector<std::vector<long>> rows) {
  Mat m(f, (int)rows.size(), (int)rows[0].size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m.at(i, j) = Scalar(f, rows[i][j]);
  return m;
}

Mat random_mat(Field f, int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mat m(f, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = Scalar(f, (long)(rng() % 7) - 3);
  return m;
}

}  // namespace

TEST_CASE("scalar arithmetic is exact") {
  Scalar a = Scalar::parse(Q, "1/3"), b = Scalar::parse(Q, "1/6");
  CHECK((a + b).str() == "1/2");
  Scalar acc(Q, 0);
  for (long k = 1; k <= 50; ++k) acc += Scalar(Q, 1) / Scalar(Q, k);
  Scalar acc2 = acc;
  for (long k = 1; k <= 50; ++k) acc2 -= Scalar(Q, 1) / Scalar(Q, k);
  CHECK(acc2.is_zero());

  CHECK((Scalar(F5, 3) + Scalar(F5, 4)).rep() == 2);
  CHECK(Scalar(F5, 2).inv().rep() == 3);
  CHECK(Scalar::parse(F5, "7/3").rep() == 4);
  CHECK(Scalar(F5, -1).rep() == 4);  // canonical representative in [0,p)
}

TEST_CASE("rref identity and rank-deficient cases") {
  auto rr = rref(Mat::identity(Q, 2));
  CHECK(rr.r.is_identity());
  CHECK(rr.pivots == std::vector<int>{0, 1});

  auto rr2 = rref(from_rows(Q, {{1, 2}, {2, 4}}));
  CHECK(rr2.rank() == 1);
  CHECK(rr2.pivots == std::vector<int>{0});

  auto rr3 = rref(from_rows(F2, {{1, 1}, {1, 1}}));
  CHECK(rr3.rank() == 1);
}

TEST_CASE("rref is idempotent") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Mat m = random_mat(Q, 5, 7, seed);
    auto once = rref(m);
    auto twice = rref(once.r);
    CHECK(once.r == twice.r);
    CHECK(once.pivots == twice.pivots);
  }
}

TEST_CASE("kernel_basis") {
  CHECK(kernel_basis(Mat::identity(Q, 3)).cols() == 0);
  CHECK(kernel_basis(Mat(Q, 3, 3)).cols() == 3);

  Mat k = kernel_basis(from_rows(Q, {{1, 2}, {2, 4}}));
  REQUIRE(k.cols() == 1);
  // proportional to (2, -1): check 1*k0 + 2*k1 = 0 and k nonzero
  CHECK((k.at(0, 0) + Scalar(Q, 2) * k.at(1, 0)).is_zero());
  CHECK(!(k.at(0, 0).is_zero() && k.at(1, 0).is_zero()));
}

TEST_CASE("rank plus nullity equals cols") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    for (Field f : {Q, F5}) {
      Mat m = random_mat(f, 6, 9, seed);
      Mat k = kernel_basis(m);
      CHECK(rank(m) + k.cols() == m.cols());
      CHECK((m * k).is_zero());  // every kernel vector verified
    }
  }
}

TEST_CASE("solve") {
  std::vector<Scalar> b{Scalar(Q, 5), Scalar(Q, -2)};
  auto x = solve(Mat::identity(Q, 2), b);
  REQUIRE(x.has_value());
  CHECK(*x == b);

  Mat m = from_rows(Q, {{1, 2}, {2, 4}});
  auto x2 = solve(m, {Scalar(Q, 1), Scalar(Q, 2)});
  REQUIRE(x2.has_value());
  CHECK(((*x2)[0] + Scalar(Q, 2) * (*x2)[1]) == Scalar(Q, 1));

  CHECK(!solve(m, {Scalar(Q, 1), Scalar(Q, 3)}).has_value());
}

TEST_CASE("cokernel") {
  auto c0 = cokernel(Mat(Q, 2, 2));
  CHECK(c0.dim == 2);
  CHECK(c0.projection.is_identity());

  CHECK(cokernel(Mat::identity(Q, 4)).dim == 0);

  Mat diag = from_rows(Q, {{1}, {1}});
  auto c1 = cokernel(diag);
  CHECK(c1.dim == 1);
  CHECK((c1.projection * diag).is_zero());
  CHECK((c1.projection * c1.section).is_identity());

  for (std::uint64_t seed : {21u, 22u}) {
    Mat m = random_mat(Q, 6, 4, seed);
    auto c = cokernel(m);
    CHECK(c.dim == 6 - rank(m));
    CHECK((c.projection * m).is_zero());
    CHECK((c.projection * c.section).is_identity());
    CHECK(rank(c.projection) == c.dim);
  }
}

TEST_CASE("inverse") {
  Mat m = from_rows(Q, {{2, 1}, {1, 1}});
  auto inv = inverse(m);
  REQUIRE(inv.has_value());
  CHECK((*inv * m).is_identity());
  CHECK((m * *inv).is_identity());
  CHECK(!inverse(from_rows(Q, {{1, 2}, {2, 4}})).has_value());
}
