#include "geobeam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "geobeam/geom.hpp"
#include "geobeam/groups.hpp"
#include "geobeam/harmonics.hpp"
#include "geobeam/measures.hpp"
#include "geobeam/rng.hpp"

namespace geobeam::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

std::string l_string(const std::vector<int>& l) {
  std::string out;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(l[i]);
  }
  return out;
}

struct RowFactory {
  std::string experiment;
  int d;
  int p;
  std::string l;

  ReportRow make(int k, std::string observable, double value,
                 std::optional<double> reference = std::nullopt) const {
    ReportRow r;
    r.experiment = experiment;
    r.d = d;
    r.p = p;
    r.l = l;
    r.k = k;
    r.observable = sanitize(std::move(observable));
    r.value = value;
    r.reference = reference;
    return r;
  }
};

groups::StandardGroupSpec group_spec(const ExperimentConfig& config) {
  std::vector<int> l = config.l;
  if (l.empty()) l.assign((config.d + 1) / 2, 1);
  return groups::StandardGroupSpec(config.p, std::move(l));
}

geom::OrientedGeodesic resolve_geodesic(const GeodesicSpec& spec, int d,
                                        const RowFactory& rows, int index,
                                        std::vector<ReportRow>& out) {
  if (spec.standard)
    return geom::OrientedGeodesic::standard_circle(spec.index, d);
  geom::Vec u(d + 1), v(d + 1);
  for (int i = 0; i <= d; ++i) {
    u[i] = spec.frame_u[i];
    v[i] = spec.frame_v[i];
  }
  geom::OrientedGeodesic gamma = geom::geodesic_from_frame(u, v);
  const double adjustment = std::sqrt((u - gamma.u()).squaredNorm() +
                                      (v - gamma.v()).squaredNorm());
  if (adjustment > 1e-8)
    out.push_back(rows.make(
        0, "frame_adjusted[" + std::to_string(index) + "]", adjustment));
  return gamma;
}

double l2_distance(const harmonics::HarmonicSum& a,
                   const harmonics::HarmonicSum& b) {
  return harmonics::norm(harmonics::add(a, harmonics::scale(b, -1.0)));
}

// --------------------------------------------------------------------------

RunResult run_beam_converge(const ExperimentConfig& config) {
  const groups::StandardGroupSpec spec = group_spec(config);
  const groups::FiniteGroup group = groups::make_group(spec, config.d);
  RowFactory rows{to_string(config.kind), config.d, spec.p, l_string(spec.l)};
  RunResult result;
  result.rows.push_back(rows.make(0, "master_seed",
                                  static_cast<double>(config.master_seed)));
  result.rows.push_back(rows.make(
      0, "dictionary_seed", static_cast<double>(config.effective_dict_seed())));

  const geom::OrientedGeodesic gamma =
      resolve_geodesic(config.geodesics[0], config.d, rows, 0, result.rows);
  const measures::GeodesicMeasure target =
      measures::average_measure(measures::GeodesicMeasure::delta(gamma), group);
  const measures::Dictionary dict =
      measures::Dictionary::standard(config.effective_dict_seed(), config.d);
  const measures::GeodesicGrid grid(config.resolution);

  for (int k : config.degrees) {
    harmonics::HarmonicSum averaged =
        harmonics::group_average(harmonics::beam(gamma, k), group);
    if (averaged.is_zero()) {
      result.rows.push_back(rows.make(
          k, "error: degree incompatible with group (zero average)", 0.0));
      result.exit_code = 2;
      return result;
    }
    const measures::HusimiField field =
        measures::HusimiField::build(harmonics::normalized(averaged), grid);
    const double disc = measures::weak_star_discrepancy(field, target, dict);
    result.rows.push_back(rows.make(k, "weak_star_discrepancy", disc));
  }
  return result;
}

RunResult run_average(const ExperimentConfig& config) {
  const groups::StandardGroupSpec spec = group_spec(config);
  const groups::FiniteGroup group = groups::make_group(spec, config.d);
  RowFactory rows{to_string(config.kind), config.d, spec.p, l_string(spec.l)};
  RunResult result;
  result.rows.push_back(rows.make(0, "master_seed",
                                  static_cast<double>(config.master_seed)));

  const geom::OrientedGeodesic gamma =
      resolve_geodesic(config.geodesics[0], config.d, rows, 0, result.rows);
  const groups::FiniteGroup stab = groups::stabilizer(group, gamma);
  const double norm_limit =
      static_cast<double>(stab.order()) / static_cast<double>(group.order());

  for (int k : config.degrees) {
    const harmonics::HarmonicSum averaged =
        harmonics::group_average(harmonics::beam(gamma, k), group);
    const double norm_sq =
        averaged.is_zero()
            ? 0.0
            : harmonics::inner_product(averaged, averaged).real();
    result.rows.push_back(rows.make(k, "avg_norm_sq", norm_sq, norm_limit));

    double invariance = 0.0;
    for (int i = 1; i < group.order(); ++i)
      invariance =
          std::max(invariance,
                   l2_distance(compose_isometry(averaged, group.element(i)),
                               averaged));
    result.rows.push_back(rows.make(k, "invariance_residual", invariance, 0.0));

    if (k % stab.order() == 0 && !averaged.is_zero()) {
      const harmonics::HarmonicSum via_cosets = harmonics::coset_average(
          harmonics::beam(gamma, k), group, stab);
      result.rows.push_back(rows.make(k, "coset_vs_group",
                                      l2_distance(via_cosets, averaged), 0.0));
    }
  }
  return result;
}

RunResult run_realize(const ExperimentConfig& config) {
  const groups::StandardGroupSpec spec = group_spec(config);
  const groups::FiniteGroup group = groups::make_group(spec, config.d);
  RowFactory rows{to_string(config.kind), config.d, spec.p, l_string(spec.l)};
  RunResult result;
  result.rows.push_back(rows.make(0, "master_seed",
                                  static_cast<double>(config.master_seed)));

  std::vector<measures::GeodesicMeasure::Atom> atoms;
  for (std::size_t i = 0; i < config.geodesics.size(); ++i)
    atoms.push_back(
        {resolve_geodesic(config.geodesics[i], config.d, rows,
                          static_cast<int>(i), result.rows),
         config.weights[i]});
  const measures::GeodesicMeasure targets(std::move(atoms));
  const measures::GeodesicMeasure limit = measures::average_measure(targets, group);
  const measures::GeodesicGrid grid(config.resolution);

  for (int k : config.degrees) {
    harmonics::HarmonicSum psi = harmonics::HarmonicSum::zero(k, config.d);
    try {
      psi = measures::realize_measure(targets, group, k);
    } catch (const std::invalid_argument& e) {
      result.rows.push_back(rows.make(k, "error: " + std::string(e.what()), 0.0));
      result.exit_code = 2;
      return result;
    }
    const measures::HusimiField field = measures::HusimiField::build(psi, grid);
    const std::vector<double> masses = measures::husimi_masses(field, limit);
    for (int i = 0; i < limit.size(); ++i)
      result.rows.push_back(rows.make(k,
                                      "husimi_mass[" + std::to_string(i) + "]",
                                      masses[i], limit.atoms()[i].weight));
  }
  return result;
}

RunResult run_lens_spectrum(const ExperimentConfig& config) {
  const groups::StandardGroupSpec spec = group_spec(config);
  RowFactory rows{to_string(config.kind), config.d, spec.p, l_string(spec.l)};
  RunResult result;
  result.rows.push_back(rows.make(0, "master_seed",
                                  static_cast<double>(config.master_seed)));
  for (int k : config.degrees)
    result.rows.push_back(rows.make(
        k, "invariant_dim",
        static_cast<double>(groups::invariant_dimension(spec, config.d, k))));
  return result;
}

// --------------------------------------------------------------------------
// The verify battery: fast versions of the library invariants. Each check
// reports a residual and its threshold; the experiment passes when every
// residual is within threshold.
// --------------------------------------------------------------------------

RunResult run_verify(const ExperimentConfig& config) {
  RowFactory rows{to_string(config.kind), config.d, 1, "1-1"};
  RunResult result;
  result.rows.push_back(rows.make(0, "master_seed",
                                  static_cast<double>(config.master_seed)));
  result.rows.push_back(rows.make(
      0, "dictionary_seed", static_cast<double>(config.effective_dict_seed())));

  int failures = 0;
  auto check = [&](const std::string& name, double residual, double threshold) {
    result.rows.push_back(rows.make(0, name, residual, threshold));
    if (!(residual <= threshold)) ++failures;
  };

  Rng rng(derive_seed(config.master_seed, "verify"));

  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const geom::Isometry phi(rng.special_orthogonal(4));
      worst = std::max(worst,
                       (geom::canonical_form(phi).reconstruct() - phi.matrix())
                           .norm());
    }
    for (int i = 0; i < 20; ++i) {
      const geom::Isometry phi(rng.special_orthogonal(6));
      worst = std::max(worst,
                       (geom::canonical_form(phi).reconstruct() - phi.matrix())
                           .norm());
    }
    check("canonical_form_roundtrip", worst, 1e-10);
  }

  {
    double worst = 0.0;
    double invariant_worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const geom::Isometry phi(rng.special_orthogonal(4));
      const geom::Isometry psi(rng.special_orthogonal(4));
      const geom::OrientedGeodesic gamma =
          geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
      worst = std::max(
          worst, geodesic_distance(apply_isometry(phi * psi, gamma),
                                   apply_isometry(phi, apply_isometry(psi, gamma))));
      const geom::CVec b = apply_isometry(phi, gamma).isotropic();
      const geom::Complex bb = b.transpose() * b;
      invariant_worst = std::max(invariant_worst, std::abs(bb));
      invariant_worst =
          std::max(invariant_worst, std::abs(b.squaredNorm() - 2.0));
    }
    check("isometry_action_composition", worst, 1e-9);
    check("isotropic_invariants", invariant_worst, 1e-12);
  }

  {
    const groups::StandardGroupSpec spec(5, {1, 2});
    const geom::Isometry phi = groups::standard_generator(spec, 3);
    double worst = 0.0;
    for (int k = 1; k <= 24; ++k) {
      const harmonics::HarmonicSum psi =
          harmonics::beam(geom::OrientedGeodesic::standard_circle(1, 3), k);
      const harmonics::HarmonicSum composed = compose_isometry(psi, phi);
      const geom::Complex phase =
          std::exp(geom::Complex(0.0, 2.0 * kPi * k * spec.l[0] / spec.p));
      for (int s = 0; s < 100; ++s) {
        const geom::AmbientPoint x(rng.unit_vector(4));
        worst = std::max(worst, std::abs(harmonics::evaluate(composed, x) -
                                         phase * harmonics::evaluate(psi, x)));
      }
    }
    check("equivariance_phase", worst, 1e-10);
  }

  {
    const groups::FiniteGroup group =
        groups::make_group(groups::StandardGroupSpec(5, {1, 2}), 3);
    const geom::OrientedGeodesic gamma =
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
    const harmonics::HarmonicSum avg =
        harmonics::group_average(harmonics::beam(gamma, 20), group);
    check("averaging_idempotent",
          l2_distance(harmonics::group_average(avg, group), avg), 1e-12);
  }

  {
    double worst = 0.0;
    for (int k = 2; k <= 6; k += 2) {
      const geom::OrientedGeodesic g1 =
          geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
      const geom::OrientedGeodesic g2 =
          geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
      const harmonics::HarmonicSum psi = harmonics::add(
          harmonics::beam(g1, k), harmonics::scale(harmonics::beam(g2, k), 0.5));
      const harmonics::QuadratureRule rule = harmonics::quadrature_rule(3, 2 * k);
      const double analytic = harmonics::inner_product(psi, psi).real();
      const double quad =
          harmonics::inner_product_quadrature(psi, psi, rule).real();
      worst = std::max(worst, std::abs(analytic - quad));
    }
    check("parseval_quadrature", worst, 1e-9);
  }

  {
    const geom::Isometry phi(rng.special_orthogonal(4));
    const harmonics::HarmonicSum psi1 =
        harmonics::beam(geom::geodesic_from_frame(rng.unit_vector(4),
                                                  rng.unit_vector(4)),
                        12);
    const harmonics::HarmonicSum psi2 =
        harmonics::beam(geom::geodesic_from_frame(rng.unit_vector(4),
                                                  rng.unit_vector(4)),
                        12);
    const geom::Complex before = harmonics::inner_product(psi1, psi2);
    const geom::Complex after = harmonics::inner_product(
        compose_isometry(psi1, phi), compose_isometry(psi2, phi));
    check("composition_unitarity", std::abs(after - before), 1e-10);
  }

  {
    double worst = 0.0;
    for (double alpha : {0.3, 0.7, 1.2}) {
      geom::Vec u = geom::Vec::Zero(4), v = geom::Vec::Zero(4);
      u[0] = 1.0;
      v[1] = std::cos(alpha);
      v[2] = std::sin(alpha);
      const geom::OrientedGeodesic tilted = geom::geodesic_from_frame(u, v);
      for (int k = 1; k <= 8; ++k) {
        const double overlap = std::abs(harmonics::inner_product(
            harmonics::beam(geom::OrientedGeodesic::standard_circle(1, 3), k),
            harmonics::beam(tilted, k)));
        worst = std::max(
            worst, std::abs(overlap - std::pow(std::cos(alpha / 2), 2 * k)));
      }
    }
    check("cross_overlap_decay", worst, 1e-8);
  }

  {
    int counterexamples = 0;
    for (int p = 2; p <= 6; ++p) {
      const groups::FiniteGroup group =
          groups::make_group(groups::StandardGroupSpec(p, {1, p == 2 ? 1 : p - 1}), 3);
      for (int s = 0; s < 10; ++s) {
        const geom::OrientedGeodesic gamma =
            geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
        const measures::GeodesicMeasure mu = measures::GeodesicMeasure::delta(gamma);
        for (const geom::Isometry& e : group.elements()) {
          const measures::GeodesicMeasure pushed = measures::pushforward(mu, e);
          const bool equal =
              geodesics_equal(pushed.atoms()[0].geodesic, gamma);
          const bool singular = measures::mutually_singular(pushed, mu);
          if (equal == singular) ++counterexamples;
        }
      }
    }
    check("pushforward_dichotomy", counterexamples, 0.0);
  }

  {
    const measures::GeodesicGrid grid(24);
    const harmonics::HarmonicSum psi =
        harmonics::beam(geom::OrientedGeodesic::standard_circle(1, 3), 16);
    const measures::HusimiField field = measures::HusimiField::build(psi, grid);
    const double mass =
        measures::pair_husimi(field, [](const geom::OrientedGeodesic&) {
          return 1.0;
        });
    check("husimi_normalization", std::abs(mass - 1.0), 1e-6);
  }

  {
    const geom::Isometry phi(rng.special_orthogonal(4));
    const geom::OrientedGeodesic gamma =
        geom::geodesic_from_frame(rng.unit_vector(4), rng.unit_vector(4));
    const harmonics::HarmonicSum psi =
        harmonics::beam(geom::geodesic_from_frame(rng.unit_vector(4),
                                                  rng.unit_vector(4)),
                        16);
    const double lhs = measures::husimi(compose_isometry(psi, phi), gamma);
    const double rhs = measures::husimi(psi, apply_isometry(phi, gamma));
    check("husimi_covariance", std::abs(lhs - rhs), 1e-10);
  }

  {
    const int k = 16;
    const harmonics::HarmonicSum psi =
        harmonics::beam(geom::OrientedGeodesic::standard_circle(1, 3), k);
    const harmonics::QuadratureRule rule = harmonics::quadrature_rule(3, 2 * k + 2);
    const measures::PositionObservable x1sq{
        "x1^2", [](const geom::Vec& x) { return x[0] * x[0]; }, 2};
    const double value = measures::position_pairing(psi, x1sq, rule);
    const double expected = (k + 1.0) / (2.0 * (k + 2.0));
    check("position_density", std::abs(value - expected), 1e-10);
  }

  {
    std::vector<geom::AmbientPoint> samples;
    for (int s = 0; s < 20; ++s) samples.emplace_back(rng.unit_vector(4));
    double worst = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const harmonics::HarmonicSum psi =
          harmonics::beam(geom::OrientedGeodesic::standard_circle(1, 3), k);
      worst = std::max(worst, harmonics::eigen_residual(psi, samples));
    }
    check("eigen_residual", worst, 1e-5);
  }

  {
    double residual = 1e9;
    try {
      const groups::FiniteGroup pm =
          groups::make_group(groups::StandardGroupSpec(2, {1, 1}), 3);
      const harmonics::HarmonicSum psi =
          harmonics::beam(geom::OrientedGeodesic::standard_circle(1, 3), 8);
      const harmonics::QuadratureRule rule = harmonics::quadrature_rule(3, 18);
      const measures::PositionObservable f{
          "x1^2+x2^2",
          [](const geom::Vec& x) { return x[0] * x[0] + x[1] * x[1]; }, 2};
      const double down = measures::quotient_pairing(psi, f, pm, rule);
      const double up = measures::position_pairing(psi, f, rule);
      residual = std::abs(down - up);
    } catch (const std::exception&) {
      residual = 1e9;
    }
    check("quotient_sheets", residual, 1e-9);
  }

  {
    int not_cyclic = 0;
    for (int s = 0; s < 20; ++s) {
      const int p = 2 + (s % 5);
      const groups::StandardGroupSpec spec(p, {1, p == 2 ? 1 : p - 1});
      const geom::Isometry conj(rng.special_orthogonal(4));
      const groups::FiniteGroup group =
          groups::conjugate_group(groups::make_group(spec, 3), conj);
      const geom::OrientedGeodesic gamma = apply_isometry(
          conj.inverse(), geom::OrientedGeodesic::standard_circle(1, 3));
      const groups::FiniteGroup stab = groups::stabilizer(group, gamma);
      if (!groups::is_cyclic(stab)) ++not_cyclic;
    }
    check("stabilizer_cyclic", not_cyclic, 0.0);
  }

  result.rows.push_back(rows.make(0, "verify_pass", failures, 0.0));
  if (failures > 0) result.exit_code = 2;
  return result;
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  validate(config);
  switch (config.kind) {
    case ExperimentKind::BeamConverge: return run_beam_converge(config);
    case ExperimentKind::Average: return run_average(config);
    case ExperimentKind::Realize: return run_realize(config);
    case ExperimentKind::LensSpectrum: return run_lens_spectrum(config);
    case ExperimentKind::Verify: return run_verify(config);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace geobeam::cli
