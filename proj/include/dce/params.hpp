#pragma once

#include <optional>
#include <string>

namespace dce {

/// Circuit-level description of the drive: V0, the static flux phase f0 and
/// the modulation depth epsilon. When present it fixes both b0 and alpha.
struct CircuitDrive {
  double v0 = 0.0;
  double f0 = 0.0;
  double epsilon = 0.0;
};

/// Dimensionless cavity and drive configuration (units d = v = 1).
///
/// `b0` and `alpha` are the directly specified values. When `circuit` is set
/// they are ignored and every consumer goes through boundary_potential() and
/// drive_strength(), which derive them from the circuit triple.
struct CavityParams {
  double chi0 = 0.05;
  double b0 = 1.0;
  double alpha = 0.0;
  double omega_drive = 0.0;
  double t_final = 100.0;  // end of the drive window t_F
  double t_max = 200.0;
  int n_modes = 10;
  std::optional<CircuitDrive> circuit;

  double boundary_potential() const;

  /// alpha = 2 v0 sin(f0) epsilon / k1^2 when a circuit is given.
  double drive_strength(double k1) const;

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  std::string describe() const;
};

}  // namespace dce
