#include "castfv/microstructure.hpp"

#include <algorithm>
#include <cmath>

#include "castfv/error.hpp"

namespace castfv {

void MicroParams::validate() const {
  if (!(A_lambda > 0.0)) throw ConfigError("A_lambda must be positive");
  if (!(B_lambda < 0.0)) throw ConfigError("B_lambda must be negative");
  if (!(r0 > 0.0)) throw ConfigError("initial grain radius must be positive");
  if (!(k_p > 0.0 && k_p < 1.0)) throw ConfigError("partition coefficient must lie in (0, 1)");
  if (!(D_s > 0.0)) throw ConfigError("solute diffusivity must be positive");
}

double sdas(double cooling_rate, const MicroParams& p) {
  if (!(cooling_rate > 0.0)) throw NumericalError("sdas: cooling rate must be positive");
  return p.A_lambda * std::pow(cooling_rate, p.B_lambda);
}

double yield_strength(double sdas_um, const MicroParams& p) {
  if (!(sdas_um > 0.0)) throw NumericalError("yield_strength: SDAS must be positive");
  return p.A_sigma / std::sqrt(sdas_um) + p.B_sigma;
}

GrowthParameter growth_parameter(double fs, double k_p, double C0) {
  GrowthParameter g;
  if (fs >= 1.0) {
    g.S = 2.0 * k_p / (k_p - 1.0);
  } else {
    const double Cl = C0 * std::pow(1.0 - std::max(fs, 0.0), k_p - 1.0);
    const double Cs = k_p * Cl;
    g.S = 2.0 * (Cs - C0) / (Cs - Cl);
  }
  const double disc = g.S * g.S / (4.0 * M_PI) - g.S;
  g.valid = g.S < 0.0 && disc >= 0.0;
  if (g.valid) g.lambda_s = -g.S / (2.0 * std::sqrt(M_PI)) + std::sqrt(disc);
  return g;
}

namespace {

double rk4_step(double r, double t, double h, const std::function<double(double)>& lambda_s, double D_s) {
  auto rate = [&](double tt, double rr) {
    const double l = lambda_s(tt);
    return l * l * D_s / (2.0 * rr);
  };
  const double k1 = rate(t, r);
  const double k2 = rate(t + 0.5 * h, r + 0.5 * h * k1);
  const double k3 = rate(t + 0.5 * h, r + 0.5 * h * k2);
  const double k4 = rate(t + h, r + h * k3);
  return r + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// RK4 over [ta, tb] in at least `steps` equal spans, each subdivided so that one
// substep grows r by at most kMaxGrowth relative.
constexpr double kMaxGrowth = 0.02;

double rk4_span(double r, double ta, double tb, int steps, const std::function<double(double)>& lambda_s,
                double D_s) {
  const double span = (tb - ta) / steps;
  for (int k = 0; k < steps; ++k) {
    const double end = (k + 1 == steps) ? tb : ta + (k + 1) * span;
    double t = ta + k * span;
    while (t < end) {
      const double l = lambda_s(t);
      const double rate = l * l * D_s / (2.0 * r);
      double h = end - t;
      if (rate > 0.0) h = std::min(h, kMaxGrowth * r / rate);
      if (end - (t + h) < 1e-12 * span) h = end - t;
      r = rk4_step(r, t, h, lambda_s, D_s);
      t += h;
    }
  }
  return r;
}

}  // namespace

double integrate_grain_radius(double r0, double duration, const std::function<double(double)>& lambda_s,
                              double D_s, int steps) {
  if (steps < 1) throw NumericalError("integrate_grain_radius: need at least one step");
  if (duration <= 0.0) return r0;
  return rk4_span(r0, 0.0, duration, steps, lambda_s, D_s);
}

void GrainTracker::advance(double t0, double t1, double fs0, double fs1, const MicroParams& p) {
  if (finished_ || t1 <= t0) return;
  if (!started_) {
    if (!(fs1 > 0.0)) return;
    started_ = true;
  }
  // Restrict to the part of the step with 0 < f_s < 1.
  double ta = t0, tb = t1;
  if (fs0 <= 0.0 && fs1 > fs0) ta = t0 + (0.0 - fs0) / (fs1 - fs0) * (t1 - t0);
  if (fs1 >= 1.0) {
    finished_ = true;
    if (fs0 < 1.0) tb = t0 + (1.0 - fs0) / (fs1 - fs0) * (t1 - t0);
    else return;
  }
  if (tb <= ta) return;

  auto fs_at = [&](double t) { return fs0 + (fs1 - fs0) * (t - t0) / (t1 - t0); };
  auto lambda_at = [&](double t) {
    GrowthParameter g = growth_parameter(std::clamp(fs_at(t), 0.0, 1.0), p.k_p, p.C0);
    if (g.valid) {
      lambda_last_ = g.lambda_s;
      ever_valid_ = true;
      return g.lambda_s;
    }
    flagged_ = true;
    return lambda_last_;
  };
  const int sub = std::abs(fs1 - fs0) > 0.1 ? 10 : 1;
  r_ = rk4_span(r_, ta, tb, sub, lambda_at, p.D_s);
}

double grain_growth(const std::vector<double>& times, const std::vector<double>& fs, const MicroParams& p) {
  if (times.size() != fs.size()) throw NumericalError("grain_growth: history lengths differ");
  GrainTracker g(p.r0);
  for (std::size_t i = 1; i < times.size(); ++i) g.advance(times[i - 1], times[i], fs[i - 1], fs[i], p);
  if (g.flagged() && !g.ever_valid()) return kNoValue;
  return g.radius();
}

void CoolingTracker::start(double t, double T, double T_liq, double T_sol) {
  if (T <= T_liq) t_start_ = t;
  if (T <= T_sol) t_end_ = t;
}

void CoolingTracker::record(double t0, double t1, double T0, double T1, double T_liq, double T_sol) {
  auto crossing = [&](double level) {
    if (T0 == T1) return t1;
    return t0 + (T0 - level) / (T0 - T1) * (t1 - t0);
  };
  if (std::isnan(t_start_) && T1 <= T_liq) t_start_ = T0 > T_liq ? crossing(T_liq) : t0;
  if (std::isnan(t_end_) && T1 <= T_sol) t_end_ = T0 > T_sol ? crossing(T_sol) : t0;
}

double cooling_rate(const CoolingTracker& tracker, double T_liq, double T_sol) {
  const double dt = tracker.t_end() - tracker.t_start();
  if (!(dt > 0.0)) return kNoValue;
  return (T_liq - T_sol) / dt;
}

std::vector<double> cooling_rate_field(const std::vector<CoolingTracker>& trackers, double T_liq, double T_sol) {
  std::vector<double> out(trackers.size());
  for (std::size_t c = 0; c < trackers.size(); ++c) out[c] = cooling_rate(trackers[c], T_liq, T_sol);
  return out;
}

MicrostructureFields microstructure_fields(const std::vector<CoolingTracker>& cooling,
                                           const std::vector<GrainTracker>& grains, double T_liq, double T_sol,
                                           const MicroParams& p) {
  MicrostructureFields m;
  m.cooling_rate = cooling_rate_field(cooling, T_liq, T_sol);
  const std::size_t n = cooling.size();
  m.sdas.assign(n, kNoValue);
  m.yield.assign(n, kNoValue);
  m.grain_size.assign(n, kNoValue);
  for (std::size_t c = 0; c < n; ++c) {
    if (std::isfinite(m.cooling_rate[c])) {
      m.sdas[c] = sdas(m.cooling_rate[c], p);
      m.yield[c] = yield_strength(m.sdas[c], p);
    }
    if (c < grains.size() && grains[c].finished()) m.grain_size[c] = grains[c].radius() * 1e6;
  }
  return m;
}

double finite_max(const std::vector<double>& v) {
  double out = kNoValue;
  for (double x : v)
    if (std::isfinite(x) && !(x <= out)) out = x;
  return out;
}

double finite_min(const std::vector<double>& v) {
  double out = kNoValue;
  for (double x : v)
    if (std::isfinite(x) && !(x >= out)) out = x;
  return out;
}

}  // namespace castfv
