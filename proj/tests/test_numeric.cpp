#include "doctest.h"
#include "oracles.hpp"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/rng.hpp"
#include "coherence_pursuit/synth.hpp"

#include <Eigen/QR>

using namespace cop;

TEST_CASE("normalize_columns scales each column to unit norm") {
  Matrix d(2, 1);
  d << 3, 4;
  const auto out = normalize_columns(d);
  CHECK(out.x(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.x(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.survivors == std::vector<Index>{0});
  CHECK(out.dropped.empty());
}

TEST_CASE("normalize_columns leaves unit columns unchanged") {
  Rng rng(11);
  const Matrix x = sample_unit_sphere(20, 30, rng);
  const auto out = normalize_columns(x);
  CHECK((out.x - x).cwiseAbs().maxCoeff() <= 1e-15);
  for (Index j = 0; j < out.x.cols(); ++j) CHECK(std::abs(out.x.col(j).norm() - 1.0) <= 1e-12);
}

TEST_CASE("normalize_columns zero-column policies") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1;
  d(2, 2) = 5;
  SUBCASE("strict rejects and names the column") {
    try {
      normalize_columns(d, ZeroColumnPolicy::Strict);
      FAIL("expected an error");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
  }
  SUBCASE("lenient drops and maps survivors") {
    const auto out = normalize_columns(d, ZeroColumnPolicy::Lenient);
    CHECK(out.x.cols() == 2);
    CHECK(out.survivors == std::vector<Index>{0, 2});
    CHECK(out.dropped == std::vector<Index>{1});
    CHECK(out.x(2, 1) == 1.0);
  }
}

TEST_CASE("normalize_columns rejects non-finite input") {
  Matrix d = Matrix::Ones(2, 2);
  d(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(normalize_columns(d), InvalidArgument);
}

TEST_CASE("coherence of duplicate and orthogonal columns") {
  Matrix x(2, 3);
  x << 1, 1, 0,
       0, 0, 1;
  const auto prof = coherence_kernel(x, CoherencePower::Abs);
  CHECK(prof.values(0) == 1.0);
  CHECK(prof.values(1) == 1.0);
  CHECK(prof.values(2) == 0.0);
  CHECK(prof.power == CoherencePower::Abs);
}

TEST_CASE("coherence of a single column is zero") {
  Matrix x(3, 1);
  x << 0, 1, 0;
  CHECK(coherence_kernel(x, CoherencePower::Squared).values(0) == 0.0);
  CHECK(coherence_kernel(x, CoherencePower::Abs).values(0) == 0.0);
}

TEST_CASE("coherence kernel matches the full Gram oracle") {
  Rng rng(3);
  const Matrix x = sample_unit_sphere(15, 50, rng);
  for (int p : {1, 2}) {
    const Vector ref = oracle::naive_coherence(x, p);
    for (Index block : {Index{1}, Index{7}, Index{64}, Index{50}}) {
      const auto prof = coherence_kernel(x, coherence_power_from_int(p), block, 1);
      CHECK((prof.values - ref).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("coherence kernel agrees across thread counts") {
  Rng rng(4);
  const Matrix x = sample_unit_sphere(10, 130, rng);
  const auto one = coherence_kernel(x, CoherencePower::Squared, 16, 1);
  const auto four = coherence_kernel(x, CoherencePower::Squared, 16, 4);
  CHECK((one.values - four.values).cwiseAbs().maxCoeff() <= 1e-9 * one.values.maxCoeff());
  const auto again = coherence_kernel(x, CoherencePower::Squared, 16, 4);
  CHECK(again.values == four.values);
}

TEST_CASE("coherence kernel p=2 lies in [0, n-1]") {
  Rng rng(5);
  Matrix x = sample_unit_sphere(3, 40, rng);
  x.col(7) = x.col(3);
  const auto prof = coherence_kernel(x, CoherencePower::Squared);
  CHECK(prof.values.minCoeff() >= 0.0);
  CHECK(prof.values.maxCoeff() <= 39.0);
}

TEST_CASE("coherence kernel rejects non-unit columns and bad block size") {
  Matrix x = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(coherence_kernel(x, CoherencePower::Abs, 0), InvalidArgument);
  x(0, 0) = 1.0 + 1e-6;
  CHECK_THROWS_AS(coherence_kernel(x, CoherencePower::Abs), InvalidArgument);
  x(0, 0) = 1.0 + 1e-10;
  CHECK_NOTHROW(coherence_kernel(x, CoherencePower::Abs));
}

TEST_CASE("raw Gram coherence excludes the self term") {
  Matrix d(2, 2);
  d << 2, 1,
       0, 1;
  const auto p1 = raw_gram_coherence(d, CoherencePower::Abs);
  const auto p2 = raw_gram_coherence(d, CoherencePower::Squared);
  CHECK(p1.values(0) == doctest::Approx(2.0));
  CHECK(p1.values(1) == doctest::Approx(2.0));
  CHECK(p2.values(0) == doctest::Approx(4.0));
}

TEST_CASE("orthonormal_basis of a scaled axis") {
  Matrix m = Matrix::Zero(3, 1);
  m(0, 0) = 2;
  const auto b = orthonormal_basis(m);
  CHECK(b.dim() == 1);
  CHECK(std::abs(std::abs(b.columns()(0, 0)) - 1.0) <= 1e-15);
}

TEST_CASE("orthonormal_basis drops numerically dependent columns") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 1;
  m(1, 1) = 1e-16;
  CHECK(orthonormal_basis(m, 1e-10).dim() == 1);
}

TEST_CASE("orthonormal_basis reproduces a rank-3 matrix") {
  const Matrix u = oracle::random_orthonormal(20, 3, 7);
  std::srand(8);
  const Matrix m = u * Matrix::Random(3, 9);
  const auto b = orthonormal_basis(m);
  CHECK(b.dim() == 3);
  CHECK((b.projector() * m - m).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(oracle::projector_distance(b.columns(), u) <= 1e-9);
  CHECK((b.columns().transpose() * b.columns() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-10);
}

TEST_CASE("orthonormal_basis rejects an all-zero matrix") {
  CHECK_THROWS_AS(orthonormal_basis(Matrix::Zero(4, 2)), InvalidArgument);
}

TEST_CASE("top_r_singular_subspace") {
  SUBCASE("diagonal") {
    Matrix m = Matrix::Zero(3, 3);
    m.diagonal() << 3, 2, 1;
    const auto b = top_r_singular_subspace(m, 2);
    Matrix e = Matrix::Zero(3, 2);
    e(0, 0) = e(1, 1) = 1;
    CHECK(oracle::projector_distance(b.columns(), e) <= 1e-12);
    CHECK_FALSE(b.non_unique());
  }
  SUBCASE("full column space") {
    std::srand(2);
    const Matrix m = Matrix::Random(6, 4);
    const auto b = top_r_singular_subspace(m, 4);
    CHECK((b.projector() * m - m).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("low rank plus noise matches full SVD") {
    const Matrix u = oracle::random_orthonormal(30, 4, 9);
    std::srand(10);
    const Matrix m = u * Matrix::Random(4, 40) + 1e-3 * Matrix::Random(30, 40);
    const auto b = top_r_singular_subspace(m, 4);
    CHECK((b.projector() - oracle::svd_projector(m, 4)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("tied singular values are flagged") {
    const Matrix m = Matrix::Identity(3, 3);
    CHECK(top_r_singular_subspace(m, 2).non_unique());
  }
  SUBCASE("r out of range") {
    CHECK_THROWS_AS(top_r_singular_subspace(Matrix::Identity(3, 2), 3), InvalidArgument);
    CHECK_THROWS_AS(top_r_singular_subspace(Matrix::Identity(3, 2), 0), InvalidArgument);
  }
}

TEST_CASE("random_projection") {
  Rng rng(1);
  const Matrix x = sample_unit_sphere(12, 8, rng);
  SUBCASE("identity hook") {
    CHECK(random_projection(x, 12, 0, ProjectionMode::Identity) == x);
  }
  SUBCASE("seeded determinism") {
    CHECK(random_projection(x, 5, 42) == random_projection(x, 5, 42));
    CHECK(random_projection(x, 5, 42) != random_projection(x, 5, 43));
  }
  SUBCASE("target dimension bounds") {
    CHECK_THROWS_AS(random_projection(x, 13, 0), InvalidArgument);
    CHECK_THROWS_AS(random_projection(x, 0, 0), InvalidArgument);
  }
  SUBCASE("entries have variance 1/d") {
    const Matrix phi = gaussian_projection(50, 400, 77);
    const double var = phi.squaredNorm() / static_cast<double>(phi.size());
    // 20000 entries of N(0, 1/50): se of the variance estimate = sqrt(2/20000)/50
    CHECK(std::abs(var - 1.0 / 50.0) <= 4.0 * std::sqrt(2.0 / 20000.0) / 50.0);
  }
}

TEST_CASE("projection to 2r dimensions preserves the rank of inliers") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ds = gen_unstructured(ModelSpec{Unstructured{}, 100, 5, 50, 0, seed, false});
    const Matrix y = random_projection(ds.d, 10, seed + 1000);
    Eigen::ColPivHouseholderQR<Matrix> qr(y);
    qr.setThreshold(1e-10);
    CHECK(qr.rank() == 5);
  }
}

TEST_CASE("deflate") {
  const SubspaceBasis b(oracle::random_orthonormal(10, 3, 21));
  std::srand(22);
  const Matrix x = Matrix::Random(10, 6);
  const Matrix dx = deflate(x, b);
  CHECK((b.columns().transpose() * dx).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((deflate(dx, b) - dx).cwiseAbs().maxCoeff() <= 1e-12);
  for (Index j = 0; j < x.cols(); ++j) CHECK(dx.col(j).norm() <= x.col(j).norm() + 1e-15);
  CHECK(deflate(b.columns(), b).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(deflate(Matrix::Ones(9, 2), b), InvalidArgument);
}

TEST_CASE("SubspaceBasis validation") {
  CHECK_THROWS_AS(SubspaceBasis(Matrix::Ones(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(SubspaceBasis(Matrix::Identity(2, 3)), InvalidArgument);
  CHECK_NOTHROW(SubspaceBasis(Matrix::Identity(3, 2)));
}

TEST_CASE("coherence_power_from_int") {
  CHECK(coherence_power_from_int(1) == CoherencePower::Abs);
  CHECK(coherence_power_from_int(2) == CoherencePower::Squared);
  CHECK_THROWS_AS(coherence_power_from_int(3), InvalidArgument);
}
