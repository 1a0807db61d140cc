#include "lipfield/materials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lipfield/errors.hpp"

namespace lipfield {

namespace {

void check_damage_domain(double d) {
  if (!(d >= 0.0 && d <= 1.0)) {
    throw DomainError("damage outside [0, 1]: " + std::to_string(d));
  }
}

// Plastic work sy (p + k p^2 / 2) and its p-derivative sy (1 + k p).
double plastic_work(const MaterialModel& m, double p) { return m.sigma_y * (p + 0.5 * m.k * p * p); }
double hardening_stress(const MaterialModel& m, double p) { return m.sigma_y * (1.0 + m.k * p); }

}  // namespace

SofteningValue softening_h(const SofteningFunction& h, double d) {
  check_damage_domain(d);
  switch (h.kind) {
    case SofteningKind::H1:
      return {2.0 * d + 3.0 * d * d, 2.0 + 6.0 * d};
    case SofteningKind::H2: {
      if (!(h.lambda > 0.0 && h.lambda <= 0.5)) {
        throw DomainError("h2 requires 0 < lambda <= 1/2");
      }
      const double num = 2.0 * d - d * d;
      const double dnum = 2.0 - 2.0 * d;
      const double q = 1.0 - d + h.lambda * d * d;
      const double dq = -1.0 + 2.0 * h.lambda * d;
      return {num / (q * q), dnum / (q * q) - 2.0 * num * dq / (q * q * q)};
    }
    case SofteningKind::Quadratic:
      return {d * d, 2.0 * d};
  }
  throw InvalidArgument("unknown softening kind");
}

double softening_curvature(const SofteningFunction& h, double d) {
  check_damage_domain(d);
  switch (h.kind) {
    case SofteningKind::H1:
      return 6.0;
    case SofteningKind::H2: {
      const double num = 2.0 * d - d * d;
      const double dnum = 2.0 - 2.0 * d;
      const double q = 1.0 - d + h.lambda * d * d;
      const double dq = -1.0 + 2.0 * h.lambda * d;
      const double q2 = q * q;
      return -2.0 / q2 - 4.0 * dnum * dq / (q2 * q) - 4.0 * h.lambda * num / (q2 * q) +
             6.0 * num * dq * dq / (q2 * q2);
    }
    case SofteningKind::Quadratic:
      return 2.0;
  }
  throw InvalidArgument("unknown softening kind");
}

double lambda_from_toughness(double critical_energy, double length, double toughness) {
  if (!(critical_energy > 0.0 && length > 0.0 && toughness > 0.0)) {
    throw InvalidArgument("Yc, l and Gc must be positive");
  }
  const double lambda = 2.0 * critical_energy * length / toughness;
  // Relative slack so that e.g. 2*1*0.25/1 lands on the accepted boundary.
  if (lambda > 0.5 * (1.0 + 1e-12)) {
    throw InvalidArgument("lambda = 2 Yc l / Gc = " + std::to_string(lambda) +
                          " exceeds 1/2; h2 is not convex");
  }
  return std::min(lambda, 0.5);
}

MaterialModel MaterialModel::softening_elasticity(double E, double Yc, SofteningFunction h) {
  MaterialModel m;
  m.kind = ModelKind::SofteningElasticity;
  m.E = E;
  m.Yc = Yc;
  m.sigma_y = 0.0;
  m.k = 0.0;
  m.softening = h;
  m.validate();
  return m;
}

MaterialModel MaterialModel::softening_elasto_hardening_plasticity(double E, double sigma_y,
                                                                   double k, double Yc,
                                                                   SofteningFunction h) {
  MaterialModel m;
  m.kind = ModelKind::SofteningElastoHardeningPlasticity;
  m.E = E;
  m.Yc = Yc;
  m.sigma_y = sigma_y;
  m.k = k;
  m.softening = h;
  m.validate();
  return m;
}

MaterialModel MaterialModel::softening_plasticity(double E, double sigma_y, double k) {
  MaterialModel m;
  m.kind = ModelKind::SofteningPlasticity;
  m.E = E;
  m.Yc = 0.0;
  m.sigma_y = sigma_y;
  m.k = k;
  m.softening = SofteningFunction::quadratic();
  m.validate();
  return m;
}

void MaterialModel::validate() const {
  if (!(E > 0.0)) throw InvalidArgument("E must be positive");
  if (kind != ModelKind::SofteningPlasticity) {
    if (!(Yc > 0.0)) throw InvalidArgument("Yc must be positive");
    if (softening.kind == SofteningKind::Quadratic) {
      throw InvalidArgument("elastic damage requires h1 or h2");
    }
    if (softening.kind == SofteningKind::H2 && !(softening.lambda > 0.0 && softening.lambda <= 0.5)) {
      throw InvalidArgument("h2 requires 0 < lambda <= 1/2");
    }
  } else if (softening.kind != SofteningKind::Quadratic) {
    throw InvalidArgument("softening plasticity uses g(d) = d^2 only");
  }
  if (has_plasticity()) {
    if (!(sigma_y > 0.0)) throw InvalidArgument("sigma_y must be positive");
    if (!(k >= 0.0)) throw InvalidArgument("k must be non-negative");
  }
}

double MaterialModel::stress_scale() const noexcept {
  return has_plasticity() ? sigma_y : std::sqrt(2.0 * E * Yc);
}

double potential_density(const MaterialModel& m, const PointState& s) {
  const double d = s.damage;
  const double g = (1.0 - d) * (1.0 - d);
  switch (m.kind) {
    case ModelKind::SofteningElasticity:
      return g * 0.5 * m.E * s.strain * s.strain + m.Yc * softening_h(m.softening, d).value;
    case ModelKind::SofteningElastoHardeningPlasticity: {
      const double ee = s.strain - s.plastic_strain;
      return g * (0.5 * m.E * ee * ee + plastic_work(m, s.cumulative_plastic)) +
             m.Yc * softening_h(m.softening, d).value;
    }
    case ModelKind::SofteningPlasticity: {
      check_damage_domain(d);
      const double ee = s.strain - s.plastic_strain;
      return 0.5 * m.E * ee * ee + g * plastic_work(m, s.cumulative_plastic) + m.sigma_y * d * d;
    }
  }
  throw InvalidArgument("unknown model kind");
}

Duals duals(const MaterialModel& m, const PointState& s) {
  const double d = s.damage;
  const double g = (1.0 - d) * (1.0 - d);
  switch (m.kind) {
    case ModelKind::SofteningElasticity: {
      const double eps = s.strain;
      return {g * m.E * eps,
              -(1.0 - d) * m.E * eps * eps + m.Yc * softening_h(m.softening, d).slope,
              std::nullopt};
    }
    case ModelKind::SofteningElastoHardeningPlasticity: {
      const double ee = s.strain - s.plastic_strain;
      const double p = s.cumulative_plastic;
      return {g * m.E * ee,
              -(1.0 - d) * m.E * ee * ee - 2.0 * (1.0 - d) * plastic_work(m, p) +
                  m.Yc * softening_h(m.softening, d).slope,
              g * hardening_stress(m, p)};
    }
    case ModelKind::SofteningPlasticity: {
      check_damage_domain(d);
      const double ee = s.strain - s.plastic_strain;
      const double p = s.cumulative_plastic;
      return {m.E * ee, -2.0 * (1.0 - d) * plastic_work(m, p) + 2.0 * m.sigma_y * d,
              g * hardening_stress(m, p)};
    }
  }
  throw InvalidArgument("unknown model kind");
}

double damage_curvature(const MaterialModel& m, const PointState& s) {
  const double d = s.damage;
  switch (m.kind) {
    case ModelKind::SofteningElasticity:
      return m.E * s.strain * s.strain + m.Yc * softening_curvature(m.softening, d);
    case ModelKind::SofteningElastoHardeningPlasticity: {
      const double ee = s.strain - s.plastic_strain;
      return m.E * ee * ee + 2.0 * plastic_work(m, s.cumulative_plastic) +
             m.Yc * softening_curvature(m.softening, d);
    }
    case ModelKind::SofteningPlasticity:
      check_damage_domain(d);
      return 2.0 * plastic_work(m, s.cumulative_plastic) + 2.0 * m.sigma_y;
  }
  throw InvalidArgument("unknown model kind");
}

ReturnMapResult return_map(const MaterialModel& m, double strain, double plastic_strain_n,
                           double cumulative_plastic_n, double damage) {
  const double g = (1.0 - damage) * (1.0 - damage);
  switch (m.kind) {
    case ModelKind::SofteningElasticity:
      return {plastic_strain_n, cumulative_plastic_n, g * m.E * strain, g * m.E, false};

    case ModelKind::SofteningElastoHardeningPlasticity: {
      // Effective (undamaged) quantities: the flow is independent of d and the
      // damaged stress is g times the effective one.
      const double eff_trial = m.E * (strain - plastic_strain_n);
      const double trial = g * eff_trial;
      const double crit = std::abs(trial) - g * hardening_stress(m, cumulative_plastic_n);
      if (crit <= 0.0) {
        return {plastic_strain_n, cumulative_plastic_n, trial, g * m.E, false};
      }
      const double p = (std::abs(eff_trial) - m.sigma_y + m.E * cumulative_plastic_n) /
                       (m.E + m.sigma_y * m.k);
      const double sign = trial > 0.0 ? 1.0 : -1.0;
      const double eps_p = plastic_strain_n + (p - cumulative_plastic_n) * sign;
      return {eps_p, p, g * m.E * (strain - eps_p),
              m.E * m.sigma_y * m.k * g / (m.E + m.sigma_y * m.k), true};
    }

    case ModelKind::SofteningPlasticity: {
      const double trial = m.E * (strain - plastic_strain_n);
      const double crit = std::abs(trial) - m.sigma_y * g * (1.0 + m.k * cumulative_plastic_n);
      if (crit <= 0.0) {
        return {plastic_strain_n, cumulative_plastic_n, trial, m.E, false};
      }
      const double soft = m.sigma_y * m.k * g;
      const double p = (std::abs(trial) - m.sigma_y * g + m.E * cumulative_plastic_n) / (m.E + soft);
      const double sign = trial > 0.0 ? 1.0 : -1.0;
      const double eps_p = plastic_strain_n + (p - cumulative_plastic_n) * sign;
      return {eps_p, p, m.E * (strain - eps_p), m.E * soft / (m.E + soft), true};
    }
  }
  throw InvalidArgument("unknown model kind");
}

double plastic_kkt_violation(const MaterialModel& m, const PointState& s, const PointState& sn,
                             double tol) {
  if (!m.has_plasticity()) return 0.0;
  const Duals q = duals(m, s);
  const double R = *q.yield_stress;
  const double stress_unit = m.stress_scale();
  const double strain_unit = stress_unit / m.E;
  const double dep = s.plastic_strain - sn.plastic_strain;
  const double gap = s.cumulative_plastic - sn.cumulative_plastic - std::abs(dep);

  // lambda_p = R >= 0 always, so the constraint is active: gap = 0.
  double v = std::abs(gap) / strain_unit;
  v = std::max(v, std::max(0.0, -R) / stress_unit);
  if (std::abs(dep) > tol) {
    const double sign = dep > 0.0 ? 1.0 : -1.0;
    v = std::max(v, std::abs(q.stress - R * sign) / stress_unit);
  } else {
    v = std::max(v, std::max(0.0, std::abs(q.stress) - R) / stress_unit);
  }
  return v;
}

double local_kkt_residual(const MaterialModel& m, const PointState& s, double d_n) {
  const double mu = duals(m, s).damage_driving;
  const double d = s.damage;
  const double projected = std::clamp(d - mu / m.energy_scale(), std::min(d_n, kDamageMax), kDamageMax);
  double v = std::abs(d - projected);
  v = std::max(v, d_n - d);
  return std::max(v, d - 1.0);
}

KktReport kkt_check(const MaterialModel& m, const PointState& s, const PointState& sn, double tol) {
  KktReport r;
  const Duals q = duals(m, s);
  const double mu = q.damage_driving;
  const double lo = std::min(sn.damage, kDamageMax);
  const double d = s.damage;

  if (d - lo <= tol) r.lambda_lower = std::max(mu, 0.0);
  if (kDamageMax - d <= tol) r.lambda_upper = std::max(-mu, 0.0);

  double v = local_kkt_residual(m, s, sn.damage);

  if (m.has_plasticity()) {
    r.lambda_plastic = *q.yield_stress;
    v = std::max(v, plastic_kkt_violation(m, s, sn, tol));
  }
  r.max_violation = v;
  return r;
}

}  // namespace lipfield
