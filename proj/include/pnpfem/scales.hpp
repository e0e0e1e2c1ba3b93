#pragma once

#include <vector>

namespace pnpfem {

/// Time-scaling regime selecting the non-dimensional coefficient structure.
///
/// Bulk uses the diffusive time scale L²/D of the channel; Membrane uses the
/// double-layer charging time L·λ/D, appropriate when the Debye layer is the
/// dynamically active region. The solver core never branches on the mode —
/// it only sees the resulting EquationCoefficients.
enum class ScalingMode { Bulk, Membrane };

/// Dimensional characteristic quantities of the electrokinetic system.
///
/// The physical constants F and R are caller-supplied fields rather than
/// hard-coded so desk tests can use round numbers.
struct DimensionalScales {
  double L;        ///< channel length scale (m)
  double D;        ///< species diffusivity (m²/s)
  double epsilon;  ///< solvent permittivity (F/m)
  double eta;      ///< dynamic viscosity (Pa·s)
  double rho;      ///< mass density (kg/m³)
  double T;        ///< temperature (K)
  double I_b;      ///< bulk ionic strength (mol/m³)
  double F;        ///< Faraday constant (C/mol)
  double R;        ///< gas constant (J/(mol·K))
};

/// Non-dimensional parameter set: everything the assembled equations need.
struct NondimParams {
  double lambda = 0.0;  ///< Λ, dimensionless Debye length
  double sc = 1.0;      ///< Schmidt number η/(ρD)
  double kappa = 0.0;   ///< electrohydrodynamic coupling constant ε(RT/F)²/(ηD)
  std::vector<int> valences;  ///< signed valence z_i per species
  ScalingMode mode = ScalingMode::Bulk;

  int species_count() const { return static_cast<int>(valences.size()); }
  bool operator==(const NondimParams&) const = default;
};

/// Coefficients multiplying each term of the governing equations.
///
/// Bulk mode:      NP factors 1,   ns_time = ns_convection = 1/Sc.
/// Membrane mode:  NP factors Λ,   ns_time = 1/(Sc·Λ), ns_convection = 1/Sc.
/// poisson_factor = 2Λ² and body_force_factor = κ/(2Λ²) in both modes.
struct EquationCoefficients {
  double np_advection_factor;
  double np_diffusion_factor;
  double ns_time_factor;
  double ns_convection_factor;
  double poisson_factor;
  double body_force_factor;
};

/// Debye screening length λ = sqrt(0.5·ε·R·T / (F²·I_b)) in meters.
/// Throws std::invalid_argument on non-positive inputs.
double debye_length(const DimensionalScales& scales);

/// Convert dimensional scales to the non-dimensional parameter set.
///
/// Λ = λ/L in Bulk mode; Λ = λ/sqrt(L·λ) in Membrane mode (the harmonic-mean
/// length of channel and Debye scales). Throws std::invalid_argument when the
/// valence list is empty or any scale is non-positive.
NondimParams nondimensionalize(const DimensionalScales& scales,
                               std::vector<int> valences, ScalingMode mode);

/// Expand NondimParams into the per-term equation coefficients.
EquationCoefficients equation_coefficients(const NondimParams& params);

}  // namespace pnpfem
