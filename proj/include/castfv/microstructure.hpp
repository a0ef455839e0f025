#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace castfv {

struct MicroParams {
  double A_lambda = 39.4;
  double B_lambda = -0.317;
  double A_sigma = 59.0;   // MPa um^0.5
  double B_sigma = 120.3;  // MPa
  double r0 = 1.0e-6;      // m
  double k_p = 0.13;
  double C0 = 10.0;
  double D_s = 1.0e-9;     // m^2/s

  void validate() const;
};

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

/// Secondary dendrite arm spacing in um for a cooling rate in K/s.
double sdas(double cooling_rate, const MicroParams& p = {});

/// 0.2% yield strength in MPa for an SDAS in um.
double yield_strength(double sdas_um, const MicroParams& p = {});

struct GrowthParameter {
  double S = 0.0;
  double lambda_s = 0.0;
  bool valid = false;  // S < 0
};

GrowthParameter growth_parameter(double fs, double k_p, double C0);

/// RK4 integration of dr/dt = lambda_s(t)^2 D_s / (2 r) over [0, duration].
/// `steps` is a minimum; steps are split further to cap the relative growth per substep.
double integrate_grain_radius(double r0, double duration, const std::function<double(double)>& lambda_s,
                              double D_s, int steps);

/// Per-cell grain growth driven by a solid-fraction history. Growth starts
/// when f_s first exceeds 0 and stops at f_s = 1. Where S >= 0 the last
/// valid lambda_s is held (zero before the first valid one) and the cell is
/// flagged.
class GrainTracker {
 public:
  explicit GrainTracker(double r0 = 1.0e-6) : r_(r0) {}

  void advance(double t0, double t1, double fs0, double fs1, const MicroParams& p);

  double radius() const { return r_; }
  bool started() const { return started_; }
  bool finished() const { return finished_; }
  bool flagged() const { return flagged_; }
  bool ever_valid() const { return ever_valid_; }

 private:
  double r_;
  double lambda_last_ = 0.0;
  bool started_ = false;
  bool finished_ = false;
  bool flagged_ = false;
  bool ever_valid_ = false;
};

/// Grain radius (m) from a sampled f_s history, or kNoValue when no valid
/// growth parameter was ever reached.
double grain_growth(const std::vector<double>& times, const std::vector<double>& fs, const MicroParams& p);

/// Liquidus/solidus crossing times from a temperature trace.
class CoolingTracker {
 public:
  void start(double t, double T, double T_liq, double T_sol);
  void record(double t0, double t1, double T0, double T1, double T_liq, double T_sol);

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }

 private:
  double t_start_ = kNoValue;
  double t_end_ = kNoValue;
};

/// (T_liq - T_sol) / (t_end - t_start); kNoValue when the cell never
/// solidified or the interval is empty.
double cooling_rate(const CoolingTracker& tracker, double T_liq, double T_sol);
std::vector<double> cooling_rate_field(const std::vector<CoolingTracker>& trackers, double T_liq, double T_sol);

struct MicrostructureFields {
  std::vector<double> cooling_rate;  // K/s
  std::vector<double> sdas;          // um
  std::vector<double> yield;         // MPa
  std::vector<double> grain_size;    // um (grain radius)
};

MicrostructureFields microstructure_fields(const std::vector<CoolingTracker>& cooling,
                                           const std::vector<GrainTracker>& grains, double T_liq, double T_sol,
                                           const MicroParams& p);

/// max / min over finite entries, kNoValue if there are none.
double finite_max(const std::vector<double>& v);
double finite_min(const std::vector<double>& v);

}  // namespace castfv
