#pragma once

#include <numbers>
#include <span>

#include "nndpd/signal.hpp"

namespace nndpd {

/// Memoryless Rapp-style PA. Amplitude curve:
///   f_rho(u) = G*u / (1 + |G*u / v_sat|^(2p))^(1/(2p))
/// Phase curve, in degrees:
///   f_phi(u) = A*u^q / (1 + (u/B)^q)
struct RappParams {
  double g = 16.0;
  double p = 1.1;
  double v_sat = 1.9;
  double a = -345.0;
  double b = 0.17;
  double q = 4.0;

  void validate() const;

  /// Input amplitude at which the linear gain alone would reach v_sat.
  double knee_amplitude() const noexcept { return v_sat / g; }

  friend bool operator==(const RappParams&, const RappParams&) = default;
};

double rapp_am_am(double u, const RappParams& params);

/// Phase shift in degrees.
double rapp_am_pm(double u, const RappParams& params);

ComplexSignal apply_pa(std::span<const Complex> signal, const RappParams& params);

/// Reference amplifier: magnitude min(G|x|, v_sat), phase untouched.
ComplexSignal apply_ideal_limiter(std::span<const Complex> signal, const RappParams& params);

/// Input power (W) at the 1 dB gain-compression point, found by bisection on
/// f_rho(u) / (G*u) = 10^(-1/20) over the default bracket
/// [1e-9 * v_sat/G, 10 * v_sat/G].
double p1db_input(const RappParams& params);

/// Same, with an explicit amplitude bracket [lo, hi] in volts.
double p1db_input(const RappParams& params, double lo, double hi);

/// Closed form (v_sat/G) * (10^(p/10) - 1)^(1/(2p)) of the 1 dB amplitude.
double p1db_amplitude_closed_form(const RappParams& params);

/// f_rho(u) / (G*u) - 10^(-1/20); zero at the 1 dB compression amplitude.
double compression_residual(double u, const RappParams& params);

inline double degrees_to_radians(double deg) noexcept { return deg * (std::numbers::pi / 180.0); }
inline double radians_to_degrees(double rad) noexcept { return rad * (180.0 / std::numbers::pi); }

}  // namespace nndpd
