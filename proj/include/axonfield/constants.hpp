// Copyright 2026 The Axonfield Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AXONFIELD_CONSTANTS_HPP
#define AXONFIELD_CONSTANTS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace axonfield {

/// Thrown when a configuration key is missing, malformed, or violates an
/// invariant. The message names the offending key and the rule.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a numerical computation produces non-finite or physically
/// inadmissible state (ODE blow-up, negative concentration, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Fundamental constants, CODATA 2018 exact values where defined.
/// F and R_gas are stored redundantly and must stay consistent with
/// e*N_A and k_b*N_A respectively.
struct PhysicalConstants {
  double e = 1.602176634e-19;        // elementary charge, C
  double k_b = 1.380649e-23;         // Boltzmann constant, J/K
  double N_A = 6.02214076e23;        // Avogadro constant, 1/mol
  double F = 96485.33212331001;      // Faraday constant, C/mol
  double R_gas = 8.31446261815324;   // gas constant, J/(mol K)
  double mu0 = 1.25663706212e-6;     // vacuum permeability, V s/(A m)
  double eps0 = 8.8541878128e-12;    // vacuum permittivity, C/(V m)

  void validate() const {
    auto positive = [](double v, const char* key) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("constants.") + key +
                          ": must be strictly positive and finite");
    };
    positive(e, "e");
    positive(k_b, "k_b");
    positive(N_A, "N_A");
    positive(F, "F");
    positive(R_gas, "R_gas");
    positive(mu0, "mu0");
    positive(eps0, "eps0");
    if (std::abs(F - e * N_A) > 1e-6 * F)
      throw ConfigError("constants.F: must equal e*N_A to relative 1e-6");
    if (std::abs(R_gas - k_b * N_A) > 1e-6 * R_gas)
      throw ConfigError("constants.R_gas: must equal k_b*N_A to relative 1e-6");
  }
};

}  // namespace axonfield

#endif  // AXONFIELD_CONSTANTS_HPP
