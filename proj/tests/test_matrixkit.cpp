#include <doctest.h>

#include "irsmc/matrixkit.hpp"
#include "support.hpp"

using namespace irsmc;
namespace mk = irsmc::matrixkit;

TEST_CASE("svd of identity has unit singular values") {
  const auto r = mk::svd(ComplexMatrix::Identity(3, 3));
  REQUIRE(r.s.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.s(i) == doctest::Approx(1.0));
  }
}

TEST_CASE("svd of a diagonal matrix sorts its magnitudes") {
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  a(2, 2) = Complex(0.0, -2.0);
  const auto r = mk::svd(a);
  CHECK(r.s(0) == doctest::Approx(3.0));
  CHECK(r.s(1) == doctest::Approx(2.0));
  CHECK(r.s(2) == doctest::Approx(1.0));
}

TEST_CASE("svd reconstructs random matrices with orthonormal factors") {
  Rng rng(7);
  for (auto [m, n] : {std::pair{8, 5}, std::pair{5, 8}, std::pair{6, 6}}) {
    const ComplexMatrix a = test::random_matrix(m, n, rng);
    for (auto mode : {mk::SvdMode::thin, mk::SvdMode::full}) {
      const auto r = mk::svd(a, mode);
      CHECK((a - r.reconstruct()).norm() / a.norm() < 1e-10);
      const auto p = r.u.cols();
      CHECK((r.u.adjoint() * r.u - ComplexMatrix::Identity(p, p)).norm() < 1e-10);
      const auto q = r.vh.rows();
      CHECK((r.vh * r.vh.adjoint() - ComplexMatrix::Identity(q, q)).norm() < 1e-10);
      for (Eigen::Index i = 1; i < r.s.size(); ++i) {
        CHECK(r.s(i - 1) >= r.s(i));
      }
    }
  }
}

TEST_CASE("svd phase convention makes each left vector's largest entry real positive") {
  Rng rng(11);
  const ComplexMatrix a = test::random_matrix(6, 4, rng);
  const auto r = mk::svd(a);
  for (Eigen::Index j = 0; j < r.u.cols(); ++j) {
    Eigen::Index imax = 0;
    r.u.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(std::abs(r.u(imax, j).imag()) < 1e-14);
    CHECK(r.u(imax, j).real() > 0.0);
  }
  // same input, same output
  const auto r2 = mk::svd(a);
  CHECK((r.u - r2.u).norm() == 0.0);
  CHECK((r.vh - r2.vh).norm() == 0.0);
}

TEST_CASE("svd rejects empty input") {
  CHECK_THROWS_WITH_AS(mk::svd(ComplexMatrix(0, 3)), "empty matrix", std::invalid_argument);
}

TEST_CASE("nullspace of an axis-aligned matrix") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  const ComplexMatrix v = mk::nullspace_basis(a, 1e-10);
  REQUIRE(v.cols() == 1);
  CHECK(std::abs(v(0, 0)) < 1e-14);
  CHECK(std::abs(v(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("nullspace of a matrix without rows is the identity") {
  const ComplexMatrix v = mk::nullspace_basis(ComplexMatrix(0, 4));
  CHECK(v.rows() == 4);
  CHECK(v.cols() == 4);
  CHECK((v - ComplexMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("nullspace of a constructed rank-3 matrix") {
  Rng rng(3);
  const ComplexMatrix a = test::random_matrix(5, 3, rng) * test::random_matrix(3, 8, rng);
  CHECK(mk::numerical_rank(a) == 3);
  const ComplexMatrix v = mk::nullspace_basis(a);
  CHECK(v.rows() == 8);
  CHECK(v.cols() == 5);
  CHECK((a * v).norm() < 1e-9);
  CHECK((v.adjoint() * v - ComplexMatrix::Identity(5, 5)).norm() < 1e-10);
}

TEST_CASE("pseudo-inverse of simple matrices") {
  CHECK((mk::pseudo_inverse(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const ComplexMatrix p = mk::pseudo_inverse(d);
  CHECK(p(0, 0).real() == doctest::Approx(0.5));
  CHECK(p(1, 1).real() == doctest::Approx(0.25));
  CHECK(std::abs(p(0, 1)) < 1e-15);
}

TEST_CASE("pseudo-inverse satisfies the Penrose conditions") {
  Rng rng(5);
  const ComplexMatrix tall = test::random_matrix(6, 3, rng);
  CHECK((mk::pseudo_inverse(tall) * tall - ComplexMatrix::Identity(3, 3)).norm() < 1e-9);

  const ComplexMatrix a = test::random_matrix(6, 2, rng) * test::random_matrix(2, 5, rng);
  const ComplexMatrix p = mk::pseudo_inverse(a);
  CHECK((a * p * a - a).norm() < 1e-9 * a.norm());
  CHECK((p * a * p - p).norm() < 1e-9 * p.norm());
  const ComplexMatrix ap = a * p;
  const ComplexMatrix pa = p * a;
  CHECK((ap - ap.adjoint()).norm() < 1e-9 * ap.norm());
  CHECK((pa - pa.adjoint()).norm() < 1e-9 * pa.norm());
}

TEST_CASE("hadamard product") {
  Rng rng(1);
  const ComplexMatrix a = test::random_matrix(3, 2, rng);
  CHECK((mk::hadamard(a, ComplexMatrix::Ones(3, 2)) - a).norm() == 0.0);
  CHECK(mk::hadamard(a, ComplexMatrix::Zero(3, 2)).norm() == 0.0);

  ComplexMatrix x(1, 2);
  x << Complex(1, 1), Complex(2, 0);
  ComplexMatrix y(1, 2);
  y << Complex(1, -1), Complex(3, 0);
  const ComplexMatrix z = mk::hadamard(x, y);
  CHECK(z(0, 0).real() == doctest::Approx(2.0));
  CHECK(z(0, 0).imag() == doctest::Approx(0.0));
  CHECK(z(0, 1).real() == doctest::Approx(6.0));

  CHECK_THROWS_AS(mk::hadamard(a, ComplexMatrix::Ones(2, 3)), std::invalid_argument);
}

TEST_CASE("frobenius norm and finiteness") {
  ComplexMatrix a(2, 1);
  a << Complex(3, 0), Complex(0, 4);
  CHECK(mk::frobenius_norm(a) == doctest::Approx(5.0));
  CHECK(mk::all_finite(a));
  a(0, 0) = Complex(std::nan(""), 0.0);
  CHECK_FALSE(mk::all_finite(a));
}
