#include "nndpd/pa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nndpd/errors.hpp"

namespace nndpd {
namespace {

void check_amplitude(double u, const char* fn) {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw DomainError(std::string(fn) + ": amplitude must be finite and >= 0, got " +
                      std::to_string(u));
  }
}

// f_rho(u) / (G*u), well defined at u = 0.
double gain_ratio(double u, const RappParams& params) {
  const double x = params.g * u / params.v_sat;
  return std::pow(1.0 + std::pow(x, 2.0 * params.p), -1.0 / (2.0 * params.p));
}

const double kOneDbRatio = std::pow(10.0, -1.0 / 20.0);

}  // namespace

void RappParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("PA parameter '") + name + "' must be positive and finite");
    }
  };
  positive(g, "g");
  positive(p, "p");
  positive(v_sat, "v_sat");
  positive(b, "b");
  positive(q, "q");
  if (!std::isfinite(a)) throw ConfigError("PA parameter 'a' must be finite");
}

double rapp_am_am(double u, const RappParams& params) {
  check_amplitude(u, "rapp_am_am");
  return params.g * u * gain_ratio(u, params);
}

double rapp_am_pm(double u, const RappParams& params) {
  check_amplitude(u, "rapp_am_pm");
  const double uq = std::pow(u, params.q);
  return params.a * uq / (1.0 + std::pow(u / params.b, params.q));
}

ComplexSignal apply_pa(std::span<const Complex> signal, const RappParams& params) {
  ComplexSignal out(signal.size());
  for (std::size_t k = 0; k < signal.size(); ++k) {
    const double r = std::abs(signal[k]);
    if (r == 0.0) continue;
    const double phase = std::arg(signal[k]) + degrees_to_radians(rapp_am_pm(r, params));
    out[k] = std::polar(rapp_am_am(r, params), phase);
  }
  return out;
}

ComplexSignal apply_ideal_limiter(std::span<const Complex> signal, const RappParams& params) {
  ComplexSignal out(signal.size());
  for (std::size_t k = 0; k < signal.size(); ++k) {
    const double r = std::abs(signal[k]);
    const double linear = params.g * r;
    out[k] = linear <= params.v_sat ? params.g * signal[k] : signal[k] * (params.v_sat / r);
  }
  return out;
}

double compression_residual(double u, const RappParams& params) {
  return rapp_am_am(u, params) / (params.g * u) - kOneDbRatio;
}

double p1db_input(const RappParams& params) {
  const double knee = params.knee_amplitude();
  return p1db_input(params, 1e-9 * knee, 10.0 * knee);
}

double p1db_input(const RappParams& params, double lo, double hi) {
  params.validate();
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("p1db bracket must satisfy 0 < lo < hi");
  auto f = [&](double u) { return gain_ratio(u, params) - kOneDbRatio; };
  if (!(f(lo) > 0.0) || !(f(hi) < 0.0)) {
    throw NumericalError("1 dB compression point is not bracketed by [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * hi) {
      const double u = 0.5 * (lo + hi);
      return u * u;
    }
  }
  throw NumericalError("bisection for the 1 dB compression point did not converge");
}

double p1db_amplitude_closed_form(const RappParams& params) {
  return params.knee_amplitude() *
         std::pow(std::pow(10.0, params.p / 10.0) - 1.0, 1.0 / (2.0 * params.p));
}

}  // namespace nndpd
