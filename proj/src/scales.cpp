#include "pnpfem/scales.hpp"

#include <cmath>
#include <stdexcept>

namespace pnpfem {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string("DimensionalScales.") + name +
                                " must be strictly positive");
  }
}

void validate(const DimensionalScales& s) {
  require_positive(s.L, "L");
  require_positive(s.D, "D");
  require_positive(s.epsilon, "epsilon");
  require_positive(s.eta, "eta");
  require_positive(s.rho, "rho");
  require_positive(s.T, "T");
  require_positive(s.I_b, "I_b");
  require_positive(s.F, "F");
  require_positive(s.R, "R");
}

}  // namespace

double debye_length(const DimensionalScales& scales) {
  validate(scales);
  return std::sqrt(0.5 * scales.epsilon * scales.R * scales.T /
                   (scales.F * scales.F * scales.I_b));
}

NondimParams nondimensionalize(const DimensionalScales& scales,
                               std::vector<int> valences, ScalingMode mode) {
  if (valences.empty()) {
    throw std::invalid_argument("nondimensionalize: valence list must be non-empty");
  }
  const double lambda = debye_length(scales);

  NondimParams p;
  p.lambda = (mode == ScalingMode::Bulk)
                 ? lambda / scales.L
                 : lambda / std::sqrt(scales.L * lambda);
  p.sc = scales.eta / (scales.rho * scales.D);
  const double thermal_voltage = scales.R * scales.T / scales.F;
  p.kappa = scales.epsilon * thermal_voltage * thermal_voltage /
            (scales.eta * scales.D);
  p.valences = std::move(valences);
  p.mode = mode;
  return p;
}

EquationCoefficients equation_coefficients(const NondimParams& params) {
  if (!(params.lambda > 0.0)) {
    throw std::invalid_argument("equation_coefficients: lambda must be positive");
  }
  if (!(params.sc > 0.0)) {
    throw std::invalid_argument("equation_coefficients: sc must be positive");
  }
  if (params.kappa < 0.0) {
    throw std::invalid_argument("equation_coefficients: kappa must be non-negative");
  }
  if (params.valences.empty()) {
    throw std::invalid_argument("equation_coefficients: at least one species required");
  }

  EquationCoefficients c{};
  c.poisson_factor = 2.0 * params.lambda * params.lambda;
  c.body_force_factor = params.kappa / c.poisson_factor;
  c.ns_convection_factor = 1.0 / params.sc;
  if (params.mode == ScalingMode::Bulk) {
    c.np_advection_factor = 1.0;
    c.np_diffusion_factor = 1.0;
    c.ns_time_factor = 1.0 / params.sc;
  } else {
    c.np_advection_factor = params.lambda;
    c.np_diffusion_factor = params.lambda;
    c.ns_time_factor = 1.0 / (params.sc * params.lambda);
  }
  return c;
}

}  // namespace pnpfem
