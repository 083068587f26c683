#include "geobeam/measures.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "geobeam/rng.hpp"

namespace geobeam::measures {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using harmonics::Complex;

int thread_count() {
  if (const char* env = std::getenv("GEOBEAM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return std::min(n, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

}  // namespace

GeodesicMeasure::GeodesicMeasure(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("measure needs at least one atom");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (a.weight <= 0.0) throw std::invalid_argument("weights must be positive");
    total += a.weight;
    bool merged = false;
    for (Atom& kept : atoms_)
      if (geodesics_equal(kept.geodesic, a.geodesic)) {
        kept.weight += a.weight;
        merged = true;
        break;
      }
    if (!merged) atoms_.push_back(a);
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("weights must sum to 1");
}

GeodesicMeasure GeodesicMeasure::delta(const geom::OrientedGeodesic& gamma) {
  return GeodesicMeasure({Atom{gamma, 1.0}});
}

GeodesicMeasure pushforward(const GeodesicMeasure& mu, const geom::Isometry& phi) {
  std::vector<GeodesicMeasure::Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms())
    atoms.push_back({apply_isometry(phi, a.geodesic), a.weight});
  return GeodesicMeasure(std::move(atoms));
}

GeodesicMeasure average_measure(const GeodesicMeasure& mu,
                                const groups::FiniteGroup& g) {
  std::vector<GeodesicMeasure::Atom> atoms;
  atoms.reserve(mu.size() * g.order());
  const double scale = 1.0 / g.order();
  for (const geom::Isometry& phi : g.elements())
    for (const auto& a : mu.atoms())
      atoms.push_back({apply_isometry(phi, a.geodesic), a.weight * scale});
  return GeodesicMeasure(std::move(atoms));
}

bool mutually_singular(const GeodesicMeasure& mu, const GeodesicMeasure& nu) {
  for (const auto& a : mu.atoms())
    for (const auto& b : nu.atoms())
      if (geodesics_equal(a.geodesic, b.geodesic)) return false;
  return true;
}

double husimi(const harmonics::HarmonicSum& psi,
              const geom::OrientedGeodesic& gamma) {
  const Complex overlap =
      harmonics::inner_product(psi, harmonics::beam(gamma, psi.degree()));
  return std::norm(overlap);
}

// ---------------------------------------------------------------------------
// Geodesic grid. Oriented great circles of S^3 are labeled by a pair of unit
// imaginary quaternions (alpha, beta): the circle through q0 with velocity
// q0 beta, where q0 rotates beta onto alpha. SO(4) = (SU(2) x SU(2))/{+-1}
// acts by independent rotations of alpha and beta, so the product of uniform
// sphere measures is the invariant measure on geodesic space.
// ---------------------------------------------------------------------------

namespace {

struct Frame4 {
  double u[4];
  double v[4];
};

// Frame of the circle labeled (a, b); both unit 3-vectors.
inline Frame4 frame_from_axes(double ax, double ay, double az, double bx,
                              double by, double bz) {
  // q = 1 - alpha beta = (1 + a.b, -(a x b)); |q|^2 = 2 (1 + a.b).
  const double t = ax * bx + ay * by + az * bz;
  double qw, qx, qy, qz;
  const double n2 = 2.0 * (1.0 + t);
  if (n2 > 1e-12) {
    const double inv = 1.0 / std::sqrt(n2);
    qw = (1.0 + t) * inv;
    qx = -(ay * bz - az * by) * inv;
    qy = -(az * bx - ax * bz) * inv;
    qz = -(ax * by - ay * bx) * inv;
  } else {
    // a = -b: rotate by pi about any axis orthogonal to b.
    double rx = 1.0, ry = 0.0, rz = 0.0;
    if (std::abs(bx) > std::abs(by) || std::abs(bx) > std::abs(bz)) {
      rx = 0.0;
      if (std::abs(by) <= std::abs(bz)) ry = 1.0; else rz = 1.0;
    }
    double cx = by * rz - bz * ry, cy = bz * rx - bx * rz, cz = bx * ry - by * rx;
    const double inv = 1.0 / std::sqrt(cx * cx + cy * cy + cz * cz);
    qw = 0.0;
    qx = cx * inv;
    qy = cy * inv;
    qz = cz * inv;
  }
  Frame4 f;
  f.u[0] = qw;
  f.u[1] = qx;
  f.u[2] = qy;
  f.u[3] = qz;
  f.v[0] = -qx * bx - qy * by - qz * bz;
  f.v[1] = qw * bx + qy * bz - qz * by;
  f.v[2] = qw * by - qx * bz + qz * bx;
  f.v[3] = qw * bz + qx * by - qy * bx;
  return f;
}

inline void plucker6(const Frame4& f, double* p) {
  p[0] = f.u[0] * f.v[1] - f.u[1] * f.v[0];
  p[1] = f.u[0] * f.v[2] - f.u[2] * f.v[0];
  p[2] = f.u[0] * f.v[3] - f.u[3] * f.v[0];
  p[3] = f.u[1] * f.v[2] - f.u[2] * f.v[1];
  p[4] = f.u[1] * f.v[3] - f.u[3] * f.v[1];
  p[5] = f.u[2] * f.v[3] - f.u[3] * f.v[2];
}

}  // namespace

GeodesicGrid::GeodesicGrid(int resolution) : resolution_(resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution too small");
}

double GeodesicGrid::node_weight() const {
  const double factor = 4.0 * kPi / factor_size();
  return factor * factor;
}

Eigen::Vector3d GeodesicGrid::factor_node(int i) const {
  const int band = i / resolution_;
  const int slot = i % resolution_;
  const double z = -1.0 + 2.0 * (band + 0.5) / resolution_;
  const double phi = 2.0 * kPi * (slot + 0.5) / resolution_;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

geom::OrientedGeodesic GeodesicGrid::geodesic(int ia, int ib) const {
  const Eigen::Vector3d a = factor_node(ia), b = factor_node(ib);
  const Frame4 f = frame_from_axes(a[0], a[1], a[2], b[0], b[1], b[2]);
  geom::Vec u(4), v(4);
  for (int i = 0; i < 4; ++i) {
    u[i] = f.u[i];
    v[i] = f.v[i];
  }
  return geom::geodesic_from_frame(u, v);
}

// ---------------------------------------------------------------------------
// Dictionary
// ---------------------------------------------------------------------------

Dictionary Dictionary::standard(std::uint64_t seed, int d) {
  if (d != 3)
    throw std::invalid_argument("the geodesic-space dictionary requires d = 3");
  Dictionary dict;
  static const char* kCoord[6] = {"p12", "p13", "p14", "p23", "p24", "p34"};
  for (const char* c : kCoord) dict.names_.emplace_back(c);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j)
      dict.names_.push_back(std::string(kCoord[i]) + "*" + kCoord[j]);

  Rng rng(derive_seed(seed, "dictionary-bumps"));
  for (int c = 0; c < 8; ++c) {
    const geom::OrientedGeodesic center =
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
    for (double s : {4.0, 16.0}) {
      dict.bump_centers_.push_back(center.bivector());
      dict.bump_scales_.push_back(s);
      dict.names_.push_back("bump" + std::to_string(c) +
                            "(s=" + std::to_string(static_cast<int>(s)) + ")");
    }
  }
  return dict;
}

void Dictionary::evaluate_all(const double* p, double* out) const {
  int idx = 0;
  for (int i = 0; i < 6; ++i) out[idx++] = p[i];
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) out[idx++] = p[i] * p[j];
  for (std::size_t b = 0; b < bump_centers_.size(); ++b) {
    const Vec6& c = bump_centers_[b];
    double dot = 0.0;
    for (int i = 0; i < 6; ++i) dot += p[i] * c[i];
    // both bivectors are unit: dist^2 = 2 - 2 dot
    out[idx++] = std::exp(-bump_scales_[b] * (2.0 - 2.0 * dot));
  }
}

double Dictionary::evaluate(std::size_t i, const geom::OrientedGeodesic& gamma) const {
  std::vector<double> buf(size());
  double p[6];
  for (int c = 0; c < 6; ++c) p[c] = gamma.bivector()[c];
  evaluate_all(p, buf.data());
  return buf.at(i);
}

// ---------------------------------------------------------------------------
// Grid scans. Work is split into rows (one per alpha node); each row is
// accumulated sequentially and rows are reduced in index order, so the total
// is bit-stable whatever the thread count.
// ---------------------------------------------------------------------------

namespace {

struct TermData {
  double br[4], bi[4];
  Complex coeff;
};

struct ScanResult {
  double z = 0.0;                  // sum w h
  std::vector<double> dict_sums;   // sum w f_i h
  std::vector<double> cell_sums;   // sum w h over nearest-center cells
};

ScanResult grid_scan(const harmonics::HarmonicSum& psi, const GeodesicGrid& grid,
                     const Dictionary* dict, const std::vector<Vec6>* centers) {
  if (psi.sphere_dim() != 3)
    throw std::invalid_argument("geodesic-space quadrature only for d=3");
  const int k = psi.degree();

  std::vector<TermData> terms;
  for (const harmonics::Beam& t : psi.terms()) {
    TermData td;
    for (int i = 0; i < 4; ++i) {
      td.br[i] = t.b[i].real();
      td.bi[i] = t.b[i].imag();
    }
    td.coeff = t.coeff;
    terms.push_back(td);
  }
  const bool single = terms.size() == 1;

  const int fsz = grid.factor_size();
  std::vector<double> nx(fsz), ny(fsz), nz(fsz);
  for (int i = 0; i < fsz; ++i) {
    const Eigen::Vector3d n = grid.factor_node(i);
    nx[i] = n[0];
    ny[i] = n[1];
    nz[i] = n[2];
  }

  const std::size_t nf = dict ? dict->size() : 0;
  const std::size_t nc = centers ? centers->size() : 0;
  std::vector<double> row_z(fsz, 0.0);
  std::vector<double> row_dict(fsz * nf, 0.0);
  std::vector<double> row_cell(fsz * nc, 0.0);

  std::atomic<int> next{0};
  auto worker = [&]() {
    std::vector<double> fbuf(nf);
    int ia;
    while ((ia = next.fetch_add(1)) < fsz) {
      const double ax = nx[ia], ay = ny[ia], az = nz[ia];
      double zsum = 0.0;
      double* dsum = nf ? &row_dict[ia * nf] : nullptr;
      double* csum = nc ? &row_cell[ia * nc] : nullptr;
      for (int ib = 0; ib < fsz; ++ib) {
        const Frame4 f = frame_from_axes(ax, ay, az, nx[ib], ny[ib], nz[ib]);
        double h;
        if (single) {
          const TermData& t = terms[0];
          double zr = 0.0, zi = 0.0;
          for (int i = 0; i < 4; ++i) {
            zr += t.br[i] * f.u[i] + t.bi[i] * f.v[i];
            zi += t.bi[i] * f.u[i] - t.br[i] * f.v[i];
          }
          h = std::norm(t.coeff) * std::pow(0.25 * (zr * zr + zi * zi), k);
        } else {
          Complex overlap = 0.0;
          for (const TermData& t : terms) {
            double zr = 0.0, zi = 0.0;
            for (int i = 0; i < 4; ++i) {
              zr += t.br[i] * f.u[i] + t.bi[i] * f.v[i];
              zi += t.bi[i] * f.u[i] - t.br[i] * f.v[i];
            }
            overlap += t.coeff *
                       harmonics::cpow_int(Complex(0.5 * zr, 0.5 * zi), k);
          }
          h = std::norm(overlap);
        }
        zsum += h;
        if (nf || nc) {
          double p[6];
          plucker6(f, p);
          if (nf) {
            dict->evaluate_all(p, fbuf.data());
            for (std::size_t j = 0; j < nf; ++j) dsum[j] += fbuf[j] * h;
          }
          if (nc) {
            int best = 0;
            double best_dot = -2.0;
            for (std::size_t j = 0; j < nc; ++j) {
              const Vec6& c = (*centers)[j];
              double dot = 0.0;
              for (int i = 0; i < 6; ++i) dot += p[i] * c[i];
              if (dot > best_dot) {
                best_dot = dot;
                best = static_cast<int>(j);
              }
            }
            csum[best] += h;
          }
        }
      }
      row_z[ia] = zsum;
    }
  };

  const int workers = std::min(thread_count(), fsz);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  ScanResult result;
  result.dict_sums.assign(nf, 0.0);
  result.cell_sums.assign(nc, 0.0);
  const double w = grid.node_weight();
  for (int ia = 0; ia < fsz; ++ia) {
    result.z += row_z[ia];
    for (std::size_t j = 0; j < nf; ++j)
      result.dict_sums[j] += row_dict[ia * nf + j];
    for (std::size_t j = 0; j < nc; ++j)
      result.cell_sums[j] += row_cell[ia * nc + j];
  }
  result.z *= w;
  for (double& s : result.dict_sums) s *= w;
  for (double& s : result.cell_sums) s *= w;
  return result;
}

}  // namespace

HusimiField HusimiField::build(const harmonics::HarmonicSum& psi,
                               const GeodesicGrid& grid) {
  const ScanResult scan = grid_scan(psi, grid, nullptr, nullptr);
  if (!(scan.z > 1e-300))
    throw std::invalid_argument("husimi normalization vanished");
  return HusimiField(psi, grid, scan.z);
}

double HusimiField::density(const geom::OrientedGeodesic& gamma) const {
  return husimi(psi_, gamma) / z_;
}

double pair_husimi(const HusimiField& field,
                   const std::function<double(const geom::OrientedGeodesic&)>& f) {
  const GeodesicGrid& grid = field.grid();
  const int fsz = grid.factor_size();
  const harmonics::HarmonicSum& psi = field.source();

  std::vector<double> row_sum(fsz, 0.0);
  std::atomic<int> next{0};
  auto worker = [&]() {
    int ia;
    while ((ia = next.fetch_add(1)) < fsz) {
      double total = 0.0;
      for (int ib = 0; ib < fsz; ++ib) {
        const geom::OrientedGeodesic gamma = grid.geodesic(ia, ib);
        total += f(gamma) * husimi(psi, gamma);
      }
      row_sum[ia] = total;
    }
  };
  const int workers = std::min(thread_count(), fsz);
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  double total = 0.0;
  for (int ia = 0; ia < fsz; ++ia) total += row_sum[ia];
  return total * grid.node_weight() / field.normalization();
}

std::vector<double> pairings(const HusimiField& field, const Dictionary& dict) {
  const ScanResult scan =
      grid_scan(field.source(), field.grid(), &dict, nullptr);
  std::vector<double> out = scan.dict_sums;
  for (double& v : out) v /= scan.z;
  return out;
}

std::vector<double> pairings(const GeodesicMeasure& mu, const Dictionary& dict) {
  std::vector<double> out(dict.size(), 0.0);
  std::vector<double> buf(dict.size());
  for (const auto& a : mu.atoms()) {
    double p[6];
    for (int c = 0; c < 6; ++c) p[c] = a.geodesic.bivector()[c];
    dict.evaluate_all(p, buf.data());
    for (std::size_t j = 0; j < dict.size(); ++j) out[j] += a.weight * buf[j];
  }
  return out;
}

namespace {

double max_abs_difference(const std::vector<double>& a,
                          const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

double weak_star_discrepancy(const HusimiField& a, const HusimiField& b,
                             const Dictionary& dict) {
  return max_abs_difference(pairings(a, dict), pairings(b, dict));
}

double weak_star_discrepancy(const HusimiField& a, const GeodesicMeasure& b,
                             const Dictionary& dict) {
  return max_abs_difference(pairings(a, dict), pairings(b, dict));
}

double weak_star_discrepancy(const GeodesicMeasure& a, const HusimiField& b,
                             const Dictionary& dict) {
  return max_abs_difference(pairings(a, dict), pairings(b, dict));
}

double weak_star_discrepancy(const GeodesicMeasure& a, const GeodesicMeasure& b,
                             const Dictionary& dict) {
  return max_abs_difference(pairings(a, dict), pairings(b, dict));
}

std::vector<double> husimi_masses(const HusimiField& field,
                                  const GeodesicMeasure& targets) {
  std::vector<Vec6> centers;
  centers.reserve(targets.size());
  for (const auto& a : targets.atoms()) centers.push_back(a.geodesic.bivector());
  const ScanResult scan =
      grid_scan(field.source(), field.grid(), nullptr, &centers);
  std::vector<double> out = scan.cell_sums;
  for (double& v : out) v /= scan.z;
  return out;
}

double position_pairing(const harmonics::HarmonicSum& psi,
                        const PositionObservable& f,
                        const harmonics::QuadratureRule& rule) {
  const int required = f.degree + 2 * psi.degree();
  if (rule.exactness() < required)
    throw std::invalid_argument(
        "quadrature exactness insufficient: the pairing needs degree " +
        std::to_string(required));
  if (rule.sphere_dim() != psi.sphere_dim())
    throw std::invalid_argument("rule dimension mismatch");
  return rule.integrate([&](const geom::Vec& x) {
    return f.fn(x) * std::norm(harmonics::evaluate_direction(psi, x));
  });
}

double line_integral(const geom::OrientedGeodesic& gamma,
                     const std::function<double(const geom::Vec&)>& f,
                     int nodes) {
  if (nodes < 1) throw std::invalid_argument("need at least one node");
  double total = 0.0;
  for (int m = 0; m < nodes; ++m)
    total += f(gamma.point(2.0 * kPi * m / nodes));
  return total / nodes;
}

harmonics::HarmonicSum realize_measure(const GeodesicMeasure& targets,
                                       const groups::FiniteGroup& g, int k) {
  harmonics::HarmonicSum result =
      harmonics::HarmonicSum::zero(k, targets.sphere_dim());
  int index = 0;
  for (const auto& atom : targets.atoms()) {
    const groups::FiniteGroup stab = groups::stabilizer(g, atom.geodesic);
    if (k % stab.order() != 0)
      throw std::invalid_argument(
          "atom " + std::to_string(index) + " is not realizable: degree " +
          std::to_string(k) + " is not a multiple of the stabilizer order " +
          std::to_string(stab.order()));
    const harmonics::HarmonicSum averaged =
        harmonics::coset_average(harmonics::beam(atom.geodesic, k), g, stab);
    if (averaged.is_zero())
      throw std::invalid_argument("degree incompatible with group");
    result = harmonics::add(
        result,
        harmonics::scale(harmonics::normalized(averaged), std::sqrt(atom.weight)));
    ++index;
  }
  if (result.is_zero())
    throw std::invalid_argument("degree incompatible with group");
  return harmonics::normalized(result);
}

double quotient_pairing(const harmonics::HarmonicSum& psi,
                        const PositionObservable& f,
                        const groups::FiniteGroup& g,
                        const harmonics::QuadratureRule& rule) {
  for (int i = 1; i < g.order(); ++i)
    if (!harmonics::sums_equal(compose_isometry(psi, g.element(i)), psi))
      throw std::invalid_argument(
          "harmonic sum is not invariant under group element " +
          std::to_string(i));

  // Spot-check invariance of f at seeded points.
  Rng rng(0x8f1d33a2c4ull);
  const int d = psi.sphere_dim();
  for (int s = 0; s < 100; ++s) {
    const geom::Vec x = rng.unit_vector(d + 1);
    const double base = f.fn(x);
    for (int i = 1; i < g.order(); ++i)
      if (std::abs(f.fn(g.element(i).apply(x)) - base) > 1e-9)
        throw std::invalid_argument(
            "observable is not invariant under group element " +
            std::to_string(i));
  }

  const double value = position_pairing(psi, f, rule);

  // Sheet consistency: the pairing re-evaluated on translated nodes must
  // agree for every deck transformation.
  for (int i = 1; i < g.order(); ++i) {
    const geom::Isometry& phi = g.element(i);
    double translated = 0.0;
    for (int node = 0; node < rule.size(); ++node) {
      const geom::Vec y = phi.apply(geom::Vec(rule.node(node)));
      translated += rule.weights()[node] * f.fn(y) *
                    std::norm(harmonics::evaluate_direction(psi, y));
    }
    if (std::abs(translated - value) > 1e-9)
      throw std::runtime_error("sheet consistency violated for group element " +
                               std::to_string(i));
  }
  return value;
}

GeodesicMeasure quotient_husimi_atoms(const GeodesicMeasure& mu,
                                      const groups::FiniteGroup& g) {
  std::vector<bool> assigned(mu.atoms().size(), false);
  std::vector<GeodesicMeasure::Atom> result;

  for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
    if (assigned[i]) continue;
    // Collect the G-orbit of this atom and absorb every atom lying on it.
    std::vector<geom::OrientedGeodesic> orbit;
    for (const geom::Isometry& phi : g.elements()) {
      geom::OrientedGeodesic image = apply_isometry(phi, mu.atoms()[i].geodesic);
      bool seen = false;
      for (const auto& o : orbit)
        if (geodesics_equal(o, image)) {
          seen = true;
          break;
        }
      if (!seen) orbit.push_back(std::move(image));
    }
    double weight = 0.0;
    for (std::size_t j = i; j < mu.atoms().size(); ++j) {
      if (assigned[j]) continue;
      for (const auto& o : orbit)
        if (geodesics_equal(o, mu.atoms()[j].geodesic)) {
          weight += mu.atoms()[j].weight;
          assigned[j] = true;
          break;
        }
    }
    // Deterministic representative: lexicographically smallest bivector.
    // Components can agree exactly along an orbit (a diagonal rotation fixes
    // p12 and p34), so the comparison carries a tolerance to keep the choice
    // independent of floating-point noise between routes.
    auto lex_less = [](const geom::Vec& a, const geom::Vec& b) {
      for (int c = 0; c < a.size(); ++c) {
        if (a[c] < b[c] - geom::kCompareTol) return true;
        if (a[c] > b[c] + geom::kCompareTol) return false;
      }
      return false;
    };
    const geom::OrientedGeodesic* rep = &orbit[0];
    for (const auto& o : orbit)
      if (lex_less(o.bivector(), rep->bivector())) rep = &o;
    result.push_back({*rep, weight});
  }
  return GeodesicMeasure(std::move(result));
}

}  // namespace geobeam::measures
