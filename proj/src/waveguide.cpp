#include <cmath>
#include <complex>
#include <numbers>

#include "yieldopt/errors.hpp"
#include "yieldopt/qoi.hpp"

namespace yieldopt {

namespace {

using Complex = std::complex<double>;

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kVacuumPermeability = 4e-7 * std::numbers::pi;

struct Abcd {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Abcd operator*(const Abcd& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

// Lossless line section of electrical length theta and wave impedance z.
Abcd line_section(double theta, double z) {
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  return {Complex(cs), Complex(0.0, z * sn), Complex(0.0, sn / z), Complex(cs)};
}

}  // namespace

WaveguideModel::WaveguideModel(WaveguideConfig config) : config_(config) {
  if (!(config_.width_mm > 0.0)) {
    throw ConfigurationError("waveguide width must be positive");
  }
}

bool WaveguideModel::admissible(const VectorRef& p_lower, const VectorRef&, const VectorRef& d,
                                const RangeGrid& grid) const {
  if (p_lower.size() != 2 || d.size() != 2 || p_lower[0] < 0.0 || p_lower[1] < 0.0) {
    return false;
  }
  const double eps_r = 1.0 + d[0] * config_.chi_e;
  const double mu_r = 1.0 + d[1] * config_.chi_m;
  const double kc = std::numbers::pi / (config_.width_mm * 1e-3);
  // Propagation is hardest at the lowest frequency.
  const double k0 = grid.points().front() / kSpeedOfLight;
  return mu_r > 0.0 && k0 * k0 > kc * kc && eps_r * mu_r * k0 * k0 > kc * kc;
}

double WaveguideModel::do_evaluate(const VectorRef& p, const VectorRef& d, double omega) const {
  if (p.size() != 2 || d.size() != 2) {
    throw ConfigurationError("waveguide model expects p = (inlay, offset) and d = (d1, d2)");
  }
  if (p[0] < 0.0 || p[1] < 0.0) {
    throw DomainError("waveguide section lengths must be nonnegative");
  }
  const double eps_r = 1.0 + d[0] * config_.chi_e;
  const double mu_r = 1.0 + d[1] * config_.chi_m;
  const double kc = std::numbers::pi / (config_.width_mm * 1e-3);
  const double k0 = omega / kSpeedOfLight;

  const double beta_sq_vacuum = k0 * k0 - kc * kc;
  const double beta_sq_inlay = eps_r * mu_r * k0 * k0 - kc * kc;
  if (!(beta_sq_vacuum > 0.0) || !(beta_sq_inlay > 0.0) || !(mu_r > 0.0)) {
    throw DomainError("TE10 mode is evanescent at this frequency");
  }
  const double beta_vacuum = std::sqrt(beta_sq_vacuum);
  const double beta_inlay = std::sqrt(beta_sq_inlay);
  const double z_vacuum = omega * kVacuumPermeability / beta_vacuum;
  const double z_inlay = omega * kVacuumPermeability * mu_r / beta_inlay;

  const Abcd offset = line_section(beta_vacuum * p[1] * 1e-3, z_vacuum);
  const Abcd inlay = line_section(beta_inlay * p[0] * 1e-3, z_inlay);
  const Abcd total = offset * inlay * offset;

  const Complex num = total.a + total.b / z_vacuum - total.c * z_vacuum - total.d;
  const Complex den = total.a + total.b / z_vacuum + total.c * z_vacuum + total.d;
  const double magnitude = std::abs(num / den);
  if (magnitude == 0.0) {
    return config_.db_floor;
  }
  return std::max(20.0 * std::log10(magnitude), config_.db_floor);
}

}  // namespace yieldopt
