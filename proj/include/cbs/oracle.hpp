#pragma once

#include <string>

namespace cbs::oracle {

// Exact on-resonance double-scattering results for the h||h channel.
// Everything is expressed in units of the common prefactor 2|g~|^2/15.

struct SaturationPolynomials {
  double r1 = 0.0;
  double r2 = 0.0;
  double p = 0.0;
};

SaturationPolynomials saturation_polynomials(double s);

/// alpha(s) = 1 + R1 / ((4 + s) R2); alpha(0) = 2.
double enhancement_factor(double s);

struct TermPair {
  double crossed = 0.0;
  double ladder = 0.0;
};

/// Averaged totals at theta = 0: C = R1/((4+s)P), L = R2/P.
TermPair total_terms(double s);
/// Elastic parts, both s/(1+s)^4.
TermPair elastic_terms(double s);
/// Inelastic parts as closed rational functions (not by subtraction).
TermPair inelastic_terms(double s);

struct OracleTerms {
  double ladder_total = 0.0;
  double crossed_total = 0.0;
  double ladder_el = 0.0;
  double crossed_el = 0.0;
  double ladder_inel = 0.0;
  double crossed_inel = 0.0;
  double alpha = 0.0;
};

OracleTerms oracle_terms(double s);

/// (1/pi) x1 / (x1^2 + x2^2): Lorentzian in x2 of half-width x1, or
/// dispersive in x1 at fixed x2.
double lineshape(double x1, double x2);

struct Densities {
  double ladder = 0.0;
  double crossed = 0.0;
};

/// Leading (Omega/gamma)^4 inelastic spectra at weak driving.
Densities weak_field_spectra(double nu, double omega, double gamma = 1.0);
/// Leading (gamma/Omega)^2 spectra at strong driving, with the
/// (gamma/Omega)^3 dispersive terms of the crossed channel.
Densities strong_field_spectra(double nu, double omega, double gamma = 1.0);

inline constexpr double kAlphaInfinity = 23.0 / 21.0;
inline constexpr double kOrientationAverage = 2.0 / 15.0;

}  // namespace cbs::oracle
