#include "castfv/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "castfv/error.hpp"

namespace castfv {

double ConductivityTable::operator()(double temperature) const {
  if (T.empty()) throw ConfigError("empty conductivity table");
  if (temperature <= T.front()) return k.front();
  if (temperature >= T.back()) return k.back();
  auto it = std::upper_bound(T.begin(), T.end(), temperature);
  std::size_t i = static_cast<std::size_t>(it - T.begin());
  double w = (temperature - T[i - 1]) / (T[i] - T[i - 1]);
  return (1.0 - w) * k[i - 1] + w * k[i];
}

void MaterialModel::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(rho, "density");
  positive(mu, "viscosity");
  positive(cp, "specific heat");
  positive(latent, "latent heat");
  positive(T_eps, "smear width");
  positive(dendrite_spacing, "dendrite spacing");
  positive(D_s, "solute diffusivity");
  if (!(k_p > 0.0 && k_p < 1.0)) throw ConfigError("partition coefficient must lie in (0, 1)");
  if (!(T_liq < T_f)) throw ConfigError("liquidus must lie below the freezing temperature");
  if (!(T_sol + T_eps < T_liq)) throw ConfigError("solidus + smear width must lie below the liquidus");
  if (k.T.empty() || k.T.size() != k.k.size()) throw ConfigError("conductivity table is malformed");
  for (std::size_t i = 1; i < k.T.size(); ++i)
    if (!(k.T[i] > k.T[i - 1])) throw ConfigError("conductivity table temperatures must increase");
  for (double v : k.k) positive(v, "conductivity");
}

namespace {

SolidFraction scheil(double T, const MaterialModel& m) {
  const double e = 1.0 / (m.k_p - 1.0);
  const double ratio = (T - m.T_f) / (m.T_liq - m.T_f);
  const double p = std::pow(ratio, e);
  return {1.0 - p, -e * p / ratio / (m.T_liq - m.T_f)};
}

}  // namespace

SolidFraction solid_fraction(double T, const MaterialModel& m) {
  if (T >= m.T_liq) return {0.0, 0.0};
  const double lo = m.T_sol - m.T_eps, hi = m.T_sol + m.T_eps;
  if (T < lo) return {1.0, 0.0};
  if (T <= hi) {
    const double f_hat = scheil(hi, m).fs;
    const double slope = (1.0 - f_hat) / (2.0 * m.T_eps);
    return {f_hat - (T - hi) * slope, -slope};
  }
  return scheil(T, m);
}

double solid_fraction_temperature(double fs, const MaterialModel& m) {
  fs = std::clamp(fs, 0.0, 1.0);
  const double hi = m.T_sol + m.T_eps;
  const double f_hat = scheil(hi, m).fs;
  if (fs >= f_hat) {
    const double slope = (1.0 - f_hat) / (2.0 * m.T_eps);
    return hi - (fs - f_hat) / slope;
  }
  return m.T_f + std::pow(1.0 - fs, m.k_p - 1.0) * (m.T_liq - m.T_f);
}

double permeability(double fs, double dendrite_spacing) {
  if (fs <= 0.0) return std::numeric_limits<double>::infinity();
  if (fs >= 1.0) return 0.0;
  const double l = 1.0 - fs;
  return dendrite_spacing * dendrite_spacing * l * l * l / (180.0 * fs * fs);
}

double drag_cap(double rho, double dt) { return 1e12 * rho / dt; }

double darcy_drag(double fs, const MaterialModel& mat, double dt) {
  if (fs <= 0.0) return 0.0;
  const double cap = drag_cap(mat.rho, dt);
  if (fs >= 1.0) return cap;
  return std::min(mat.mu / permeability(fs, mat.dendrite_spacing), cap);
}

}  // namespace castfv
