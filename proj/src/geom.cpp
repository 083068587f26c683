#include "geobeam/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace geobeam::geom {

namespace {

constexpr double kPi = std::numbers::pi;

// Wraps an angle to (-pi, pi].
double wrap_angle(double t) {
  t = std::remainder(t, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

}  // namespace

int complex_dim(int d) {
  if (d < 3 || d % 2 == 0)
    throw std::invalid_argument("sphere dimension must be odd and >= 3");
  return (d + 1) / 2;
}

Vec apply_complex_structure(const Vec& x) {
  const int m = static_cast<int>(x.size());
  if (m % 2 != 0) throw std::invalid_argument("ambient dimension must be even");
  Vec y(m);
  for (int i = 0; i < m; i += 2) {
    y[i] = -x[i + 1];
    y[i + 1] = x[i];
  }
  return y;
}

AmbientPoint::AmbientPoint(Vec coords) : x_(std::move(coords)) {
  complex_dim(static_cast<int>(x_.size()) - 1);
  if (std::abs(x_.norm() - 1.0) > kConstructTol)
    throw std::invalid_argument("ambient point is not on the unit sphere");
}

ComplexPoint::ComplexPoint(CVec coords) : z_(std::move(coords)) {
  if (std::abs(z_.norm() - 1.0) > kConstructTol)
    throw std::invalid_argument("complex point is not on the unit sphere");
}

CVec pack_complex(const Vec& x) {
  const int m = static_cast<int>(x.size());
  if (m % 2 != 0) throw std::invalid_argument("ambient dimension must be even");
  CVec z(m / 2);
  for (int i = 0; i < m / 2; ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
  return z;
}

Vec unpack_complex(const CVec& z) {
  Vec x(2 * z.size());
  for (int i = 0; i < z.size(); ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
  return x;
}

ComplexPoint complexify(const AmbientPoint& x) {
  return ComplexPoint(pack_complex(x.coords()));
}

AmbientPoint realify(const ComplexPoint& z) {
  return AmbientPoint(unpack_complex(z.coords()));
}

Isometry::Isometry(Mat q) : q_(std::move(q)) {
  if (q_.rows() != q_.cols() || q_.rows() < 4 || q_.rows() % 2 != 0)
    throw std::invalid_argument("not special orthogonal: bad dimensions");
  const int m = static_cast<int>(q_.rows());
  const double ortho = (q_.transpose() * q_ - Mat::Identity(m, m)).norm();
  if (ortho > kConstructTol)
    throw std::invalid_argument("not special orthogonal");
  if (std::abs(q_.determinant() - 1.0) > 1e-10)
    throw std::invalid_argument("not special orthogonal: determinant != 1");
}

Isometry Isometry::identity(int ambient_dim) {
  return Isometry(Mat::Identity(ambient_dim, ambient_dim));
}

Isometry Isometry::inverse() const { return Isometry(q_.transpose()); }

Isometry Isometry::operator*(const Isometry& rhs) const {
  return Isometry(q_ * rhs.q_);
}

CVec Isometry::apply(const CVec& z) const {
  const Vec re = q_ * z.real();
  const Vec im = q_ * z.imag();
  CVec out(z.size());
  for (int i = 0; i < z.size(); ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

AmbientPoint Isometry::apply(const AmbientPoint& x) const {
  Vec y = q_ * x.coords();
  return AmbientPoint(y / y.norm());
}

bool isometries_equal(const Isometry& a, const Isometry& b, double tol) {
  return (a.matrix() - b.matrix()).norm() <= tol;
}

namespace {

Vec plucker(const Vec& u, const Vec& v) {
  const int m = static_cast<int>(u.size());
  Vec p(m * (m - 1) / 2);
  int idx = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) p[idx++] = u[a] * v[b] - u[b] * v[a];
  return p;
}

}  // namespace

OrientedGeodesic::OrientedGeodesic(Vec u, Vec v)
    : u_(std::move(u)), v_(std::move(v)), bivector_(plucker(u_, v_)) {}

CVec OrientedGeodesic::isotropic() const {
  CVec b(u_.size());
  for (int i = 0; i < u_.size(); ++i) b[i] = Complex(u_[i], v_[i]);
  return b;
}

Vec OrientedGeodesic::point(double t) const {
  return u_ * std::cos(t) + v_ * std::sin(t);
}

OrientedGeodesic OrientedGeodesic::standard_circle(int j, int d) {
  const int n = complex_dim(d);
  if (j < 1 || j > n)
    throw std::invalid_argument("standard circle index out of range");
  Vec u = Vec::Zero(d + 1), v = Vec::Zero(d + 1);
  u[2 * (j - 1)] = 1.0;
  v[2 * (j - 1) + 1] = 1.0;
  return OrientedGeodesic(std::move(u), std::move(v));
}

OrientedGeodesic geodesic_from_frame(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw std::invalid_argument("frame size mismatch");
  complex_dim(static_cast<int>(u.size()) - 1);
  const double nu = u.norm();
  if (nu < 1e-10) throw std::invalid_argument("degenerate frame");
  Vec uu = u / nu;
  Vec w = v - (uu.dot(v)) * uu;
  const double nw = w.norm();
  // |u ^ v| = |u| |w|; reject nearly dependent input.
  if (nu * nw < 1e-10) throw std::invalid_argument("degenerate frame");
  return OrientedGeodesic(std::move(uu), w / nw);
}

OrientedGeodesic apply_isometry(const Isometry& phi,
                                const OrientedGeodesic& gamma) {
  return OrientedGeodesic(phi.apply(gamma.u()), phi.apply(gamma.v()));
}

bool geodesics_equal(const OrientedGeodesic& a, const OrientedGeodesic& b) {
  return geodesic_distance(a, b) <= kCompareTol;
}

double geodesic_distance(const OrientedGeodesic& a, const OrientedGeodesic& b) {
  return (a.bivector() - b.bivector()).norm();
}

Mat CanonicalForm::block_diagonal() const {
  const int n = static_cast<int>(angles.size());
  Mat d = Mat::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const double c = std::cos(angles[m]), s = std::sin(angles[m]);
    d(2 * m, 2 * m) = c;
    d(2 * m, 2 * m + 1) = -s;
    d(2 * m + 1, 2 * m) = s;
    d(2 * m + 1, 2 * m + 1) = c;
  }
  return d;
}

Mat CanonicalForm::reconstruct() const {
  const Mat& v = conjugator.matrix();
  return v.transpose() * block_diagonal() * v;
}

CanonicalForm canonical_form(const Isometry& phi) {
  const Mat& q = phi.matrix();
  const int m = static_cast<int>(q.rows());
  const int n = m / 2;

  Eigen::RealSchur<Mat> schur(q);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("Schur decomposition failed");
  const Mat& t = schur.matrixT();
  const Mat& qs = schur.matrixU();

  // Collect invariant 2-planes. A quasi-triangular orthogonal matrix is
  // block diagonal, so 2x2 blocks give rotation planes directly; real
  // eigenvalues (+-1) come in pairs and are grouped by sign.
  struct Block {
    Vec u, v;
    double theta;
    int index;
  };
  std::vector<Block> blocks;
  std::vector<int> plus_cols, minus_cols;
  int i = 0;
  while (i < m) {
    const bool two_by_two = (i + 1 < m) && std::abs(t(i + 1, i)) > 1e-12;
    if (two_by_two) {
      blocks.push_back({qs.col(i), qs.col(i + 1), 0.0, i});
      i += 2;
    } else {
      (t(i, i) > 0 ? plus_cols : minus_cols).push_back(i);
      i += 1;
    }
  }
  if (plus_cols.size() % 2 != 0 || minus_cols.size() % 2 != 0)
    throw std::runtime_error("canonical form: unpaired real eigenvalue");
  for (std::size_t a = 0; a + 1 < plus_cols.size(); a += 2)
    blocks.push_back(
        {qs.col(plus_cols[a]), qs.col(plus_cols[a + 1]), 0.0, plus_cols[a]});
  for (std::size_t a = 0; a + 1 < minus_cols.size(); a += 2)
    blocks.push_back(
        {qs.col(minus_cols[a]), qs.col(minus_cols[a + 1]), 0.0, minus_cols[a]});

  // Rotation angle of each plane, with the sign normalized to >= 0 by
  // flipping v where needed. Flips change det(V); balanced below.
  for (Block& blk : blocks) {
    double theta =
        wrap_angle(std::atan2(blk.v.dot(q * blk.u), blk.u.dot(q * blk.u)));
    if (theta < 0 && std::abs(theta + kPi) > 1e-14) {
      blk.v = -blk.v;
      theta = -theta;
    }
    blk.theta = theta;
  }

  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.index < b.index;
  });

  auto assemble = [&]() {
    Mat basis(m, m);
    for (int b = 0; b < n; ++b) {
      basis.col(2 * b) = blocks[b].u;
      basis.col(2 * b + 1) = blocks[b].v;
    }
    return basis;
  };

  Mat basis = assemble();
  if (basis.determinant() < 0) {
    // Flip one plane orientation. A theta in {0, pi} plane absorbs the flip
    // with no angle change; otherwise the smallest angle goes negative,
    // which keeps the list sorted.
    int free_flip = -1;
    for (int b = 0; b < n; ++b) {
      if (std::abs(blocks[b].theta) < 1e-12 ||
          std::abs(blocks[b].theta - kPi) < 1e-12) {
        free_flip = b;
        break;
      }
    }
    const int target = free_flip >= 0 ? free_flip : 0;
    blocks[target].v = -blocks[target].v;
    if (free_flip < 0) blocks[target].theta = -blocks[target].theta;
    basis = assemble();
  }

  CanonicalForm form{Isometry(basis.transpose()), {}};
  form.angles.reserve(n);
  for (const Block& blk : blocks) form.angles.push_back(blk.theta);

  if ((form.reconstruct() - q).norm() > kReconstructTol)
    throw std::runtime_error("canonical form reconstruction failed");
  return form;
}

}  // namespace geobeam::geom
