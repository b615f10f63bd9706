#pragma once

// Internal unit system: hbar = 1, energies in eV, lengths in nm.
// The time unit is hbar/eV (~0.658 fs); rates carry eV as 1/time.
// Dipole moments enter the public API in Debye and are stored in e*nm.

namespace mqed::units {

// hbar*c in eV*nm (CODATA 2018)
inline constexpr double kHbarC = 197.3269804;

// e^2/(4 pi eps0) = alpha * hbar*c in eV*nm
inline constexpr double kCoulomb = 197.3269804 / 137.035999084;

// hbar in eV*s; one internal time unit equals this many seconds
inline constexpr double kHbarEvS = 6.582119569e-16;

// one internal time unit in femtoseconds
inline constexpr double kTimeUnitFs = kHbarEvS * 1e15;

// 1 Debye in e*nm: (1e-21/c [C*m]) / e, expressed in nm
inline constexpr double kDebye = 0.020819433270935595;

inline constexpr double kPi = 3.14159265358979323846;

inline double debye_to_enm(double d) { return d * kDebye; }
inline double enm_to_debye(double q) { return q / kDebye; }
inline double time_to_fs(double t) { return t * kTimeUnitFs; }
inline double fs_to_time(double fs) { return fs / kTimeUnitFs; }

}  // namespace mqed::units
