#include "dce/params.hpp"

#include <cmath>
#include <sstream>

#include "dce/csv.hpp"
#include "dce/errors.hpp"

namespace dce {

double CavityParams::boundary_potential() const {
  if (circuit) return circuit->v0 * std::cos(circuit->f0);
  return b0;
}

double CavityParams::drive_strength(double k1) const {
  if (circuit)
    return 2.0 * circuit->v0 * std::sin(circuit->f0) * circuit->epsilon /
           (k1 * k1);
  return alpha;
}

void CavityParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!std::isfinite(chi0) || chi0 < 0.0) fail("chi0 must be >= 0");
  if (!std::isfinite(boundary_potential())) fail("b0 must be finite");
  if (n_modes < 1) fail("n_modes must be >= 1");
  if (!(t_final > 0.0)) fail("t_F must be > 0");
  if (!(t_max >= t_final)) fail("t_max must be >= t_F");
  if (!std::isfinite(omega_drive) || omega_drive < 0.0)
    fail("drive frequency must be >= 0");
  if (circuit) {
    if (!std::isfinite(circuit->v0) || !std::isfinite(circuit->f0) ||
        !std::isfinite(circuit->epsilon))
      fail("circuit parameters must be finite");
  } else if (!std::isfinite(alpha) || alpha < 0.0) {
    fail("alpha must be >= 0");
  }
}

std::string CavityParams::describe() const {
  const auto f = format_number;
  std::ostringstream os;
  os << "chi0=" << f(chi0) << " b0=" << f(boundary_potential());
  if (circuit)
    os << " v0=" << f(circuit->v0) << " f0=" << f(circuit->f0)
       << " epsilon=" << f(circuit->epsilon);
  else
    os << " alpha=" << f(alpha);
  os << " omega=" << f(omega_drive) << " tf=" << f(t_final) << " tmax=" << f(t_max)
     << " modes=" << n_modes;
  return os.str();
}

}  // namespace dce
