#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "geobeam/geom.hpp"
#include "geobeam/groups.hpp"
#include "geobeam/rng.hpp"

using namespace geobeam;
using geom::AmbientPoint;
using geom::CanonicalForm;
using geom::ComplexPoint;
using geom::Isometry;
using geom::Mat;
using geom::OrientedGeodesic;
using geom::Vec;

namespace {

constexpr double kPi = std::numbers::pi;

Vec basis(int i, int n = 4) {
  Vec e = Vec::Zero(n);
  e[i] = 1.0;
  return e;
}

Mat rotation_blockdiag(double t1, double t2) {
  Mat q = Mat::Zero(4, 4);
  q(0, 0) = std::cos(t1);
  q(0, 1) = -std::sin(t1);
  q(1, 0) = std::sin(t1);
  q(1, 1) = std::cos(t1);
  q(2, 2) = std::cos(t2);
  q(2, 3) = -std::sin(t2);
  q(3, 2) = std::sin(t2);
  q(3, 3) = std::cos(t2);
  return q;
}

// Rotation angles of phi read off its complex eigenvalues: the independent
// oracle for canonical_form.
std::vector<double> eigen_angle_oracle(const Mat& q) {
  Eigen::ComplexEigenSolver<Mat> es(q);
  std::vector<double> phases;
  for (int i = 0; i < q.rows(); ++i) {
    const double phase = std::arg(es.eigenvalues()[i]);
    if (phase >= -1e-12) phases.push_back(std::max(phase, 0.0));
  }
  std::sort(phases.begin(), phases.end());
  return phases;
}

}  // namespace

TEST_CASE("complexify basis vectors and round trip") {
  const ComplexPoint z1 = complexify(AmbientPoint(basis(0)));
  CHECK(std::abs(z1.coords()[0] - geom::Complex(1, 0)) == 0.0);
  CHECK(std::abs(z1.coords()[1]) == 0.0);

  const ComplexPoint z2 = complexify(AmbientPoint(basis(1)));
  CHECK(std::abs(z2.coords()[0] - geom::Complex(0, 1)) == 0.0);
  CHECK(std::abs(z2.coords()[1]) == 0.0);

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const AmbientPoint x(rng.unit_vector(6));
    const AmbientPoint back = realify(complexify(x));
    // bit-exact packing round trip
    for (int i = 0; i < 6; ++i) CHECK(back.coords()[i] == x.coords()[i]);
  }
}

TEST_CASE("even sphere dimensions are rejected") {
  Vec x = Vec::Zero(3);
  x[0] = 1.0;  // would be S^2
  CHECK_THROWS(AmbientPoint{x});
  Vec y = Vec::Zero(5);
  y[0] = 1.0;  // would be S^4
  CHECK_THROWS(AmbientPoint{y});
  CHECK_THROWS(geom::complex_dim(4));
  CHECK_NOTHROW(geom::complex_dim(5));
}

TEST_CASE("isometry validation") {
  CHECK_THROWS_WITH(Isometry(2.0 * Mat::Identity(4, 4)),
                    doctest::Contains("not special orthogonal"));
  Mat reflection = Mat::Identity(4, 4);
  reflection(3, 3) = -1.0;
  CHECK_THROWS_WITH(Isometry{reflection},
                    doctest::Contains("not special orthogonal"));
}

TEST_CASE("canonical form of the identity") {
  const CanonicalForm form = canonical_form(Isometry::identity(4));
  REQUIRE(form.angles.size() == 2);
  CHECK(form.angles[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(form.angles[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((form.conjugator.matrix() - Mat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("canonical form of a block rotation") {
  const Isometry phi(rotation_blockdiag(kPi / 3, kPi / 5));
  const CanonicalForm form = canonical_form(phi);
  REQUIRE(form.angles.size() == 2);
  // angles ascend deterministically
  CHECK(form.angles[0] == doctest::Approx(kPi / 5).epsilon(1e-12));
  CHECK(form.angles[1] == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK((form.reconstruct() - phi.matrix()).norm() < 1e-10);
}

TEST_CASE("canonical form round trip on seeded SO(4) and SO(6)") {
  Rng rng(1234);
  for (int n : {4, 6}) {
    double worst_residual = 0.0;
    double worst_angle = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Isometry phi(rng.special_orthogonal(n));
      const CanonicalForm form = canonical_form(phi);
      worst_residual =
          std::max(worst_residual, (form.reconstruct() - phi.matrix()).norm());

      // Angles must be ascending in (-pi, pi].
      for (std::size_t i = 0; i + 1 < form.angles.size(); ++i)
        CHECK(form.angles[i] <= form.angles[i + 1]);
      for (double t : form.angles) {
        CHECK(t > -kPi - 1e-12);
        CHECK(t <= kPi + 1e-12);
      }

      // Eigendecomposition oracle: |angles| match the eigenvalue phases.
      std::vector<double> mags;
      for (double t : form.angles) mags.push_back(std::abs(t));
      std::sort(mags.begin(), mags.end());
      const std::vector<double> oracle = eigen_angle_oracle(phi.matrix());
      REQUIRE(mags.size() == oracle.size());
      for (std::size_t i = 0; i < mags.size(); ++i)
        worst_angle = std::max(worst_angle, std::abs(mags[i] - oracle[i]));
    }
    CHECK(worst_residual < 1e-10);
    CHECK(worst_angle < 1e-9);
  }
}

TEST_CASE("canonical form is deterministic") {
  Rng rng(77);
  const Isometry phi(rng.special_orthogonal(4));
  const CanonicalForm a = canonical_form(phi);
  const CanonicalForm b = canonical_form(phi);
  CHECK((a.conjugator.matrix() - b.conjugator.matrix()).norm() == 0.0);
  for (std::size_t i = 0; i < a.angles.size(); ++i)
    CHECK(a.angles[i] == b.angles[i]);
}

TEST_CASE("geodesic construction") {
  const OrientedGeodesic g1 = geom::geodesic_from_frame(basis(0), basis(1));
  CHECK(geodesics_equal(g1, OrientedGeodesic::standard_circle(1, 3)));
  CHECK(std::abs(g1.isotropic()[0] - geom::Complex(1, 0)) < 1e-15);
  CHECK(std::abs(g1.isotropic()[1] - geom::Complex(0, 1)) < 1e-15);

  // Orientation flip is a different oriented circle.
  const OrientedGeodesic reversed = geom::geodesic_from_frame(basis(1), basis(0));
  CHECK(!geodesics_equal(g1, reversed));

  // Tilted frame: orthonormalization plus the isotropy invariant.
  Vec v = (basis(1) + basis(2)) / std::sqrt(2.0);
  const OrientedGeodesic tilted = geom::geodesic_from_frame(basis(0), v);
  const geom::CVec b = tilted.isotropic();
  const geom::Complex bb = b.transpose() * b;
  CHECK(std::abs(bb) < 1e-12);
  CHECK(std::abs(b.squaredNorm() - 2.0) < 1e-12);

  CHECK_THROWS_WITH(geom::geodesic_from_frame(basis(0), 2.0 * basis(0)),
                    doctest::Contains("degenerate frame"));
}

TEST_CASE("apply_isometry on standard circles") {
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);
  const OrientedGeodesic g2 = OrientedGeodesic::standard_circle(2, 3);

  // A diagonal lens rotation maps gamma_1 to itself.
  const Isometry diag =
      groups::standard_generator(groups::StandardGroupSpec(5, {1, 2}), 3);
  CHECK(geodesics_equal(apply_isometry(diag, g1), g1));

  // The coordinate swap z1 <-> z2 maps gamma_1 to gamma_2.
  Mat swap = Mat::Zero(4, 4);
  swap(0, 2) = swap(1, 3) = swap(2, 0) = swap(3, 1) = 1.0;
  CHECK(geodesics_equal(apply_isometry(Isometry(swap), g1), g2));

  // -Id preserves every oriented circle.
  const Isometry minus(-Mat::Identity(4, 4));
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const OrientedGeodesic gamma =
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
    CHECK(geodesics_equal(apply_isometry(minus, gamma), gamma));
  }
}

TEST_CASE("geodesics_equal is gauge invariant and orientation sensitive") {
  const OrientedGeodesic g1 = OrientedGeodesic::standard_circle(1, 3);
  const double alpha = 0.7;
  const Vec u2 = std::cos(alpha) * g1.u() + std::sin(alpha) * g1.v();
  const Vec v2 = -std::sin(alpha) * g1.u() + std::cos(alpha) * g1.v();
  CHECK(geodesics_equal(g1, geom::geodesic_from_frame(u2, v2)));
  CHECK(!geodesics_equal(g1, geom::geodesic_from_frame(g1.v(), g1.u())));
  CHECK(!geodesics_equal(g1, OrientedGeodesic::standard_circle(2, 3)));
}

TEST_CASE("push-forward is a group action preserving the isotropic invariants") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Isometry phi(rng.special_orthogonal(4));
    const Isometry psi(rng.special_orthogonal(4));
    const OrientedGeodesic gamma =
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));

    const OrientedGeodesic ab = apply_isometry(phi * psi, gamma);
    const OrientedGeodesic a_b = apply_isometry(phi, apply_isometry(psi, gamma));
    CHECK(geodesics_equal(ab, a_b));

    // Isotropic vector transforms complex-linearly: b -> phi b.
    const geom::CVec expected = phi.apply(gamma.isotropic());
    CHECK((apply_isometry(phi, gamma).isotropic() - expected).norm() < 1e-12);

    const geom::CVec b = ab.isotropic();
    const geom::Complex bb = b.transpose() * b;
    CHECK(std::abs(bb) < 1e-12);
    CHECK(std::abs(b.squaredNorm() - 2.0) < 1e-12);
  }
}

TEST_CASE("geodesic equality is an equivalence relation on a reframed sample") {
  Rng rng(321);
  std::vector<OrientedGeodesic> sample;
  for (int i = 0; i < 8; ++i) {
    const OrientedGeodesic g =
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
    sample.push_back(g);
    const double alpha = rng.uniform(0.0, 2.0 * kPi);
    sample.push_back(geom::geodesic_from_frame(
        std::cos(alpha) * g.u() + std::sin(alpha) * g.v(),
        -std::sin(alpha) * g.u() + std::cos(alpha) * g.v()));
  }
  for (const auto& a : sample) CHECK(geodesics_equal(a, a));
  for (const auto& a : sample)
    for (const auto& b : sample) {
      CHECK(geodesics_equal(a, b) == geodesics_equal(b, a));
      for (const auto& c : sample)
        if (geodesics_equal(a, b) && geodesics_equal(b, c))
          CHECK(geodesics_equal(a, c));
    }
}
