#include "cbs/oracle.hpp"

#include <cmath>
#include <numbers>

#include "cbs/errors.hpp"

namespace cbs::oracle {

namespace {

void require_saturation(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("saturation parameter must be finite and non-negative");
}

}  // namespace

SaturationPolynomials saturation_polynomials(double s) {
  require_saturation(s);
  SaturationPolynomials out;
  out.r1 = 2.0 / 9.0 * s * (6912.0 + s * (3168.0 + s * (264.0 + s * (20.0 + s))));
  out.r2 = 1.0 / 3.0 * s * (1152.0 + s * (528.0 + s * (132.0 + s * 7.0)));
  out.p = (1.0 + s) * (1.0 + s) * (12.0 + s) * (32.0 + 20.0 * s + s * s);
  return out;
}

double enhancement_factor(double s) {
  require_saturation(s);
  if (s == 0.0) return 2.0;
  // R1/((4+s) R2) with the common factor s cancelled, so tiny s stays exact.
  const double n1 = 2.0 / 9.0 * (6912.0 + s * (3168.0 + s * (264.0 + s * (20.0 + s))));
  const double n2 = 1.0 / 3.0 * (1152.0 + s * (528.0 + s * (132.0 + s * 7.0)));
  return 1.0 + n1 / ((4.0 + s) * n2);
}

TermPair total_terms(double s) {
  const auto poly = saturation_polynomials(s);
  return {poly.r1 / ((4.0 + s) * poly.p), poly.r2 / poly.p};
}

TermPair elastic_terms(double s) {
  require_saturation(s);
  const double v = s / std::pow(1.0 + s, 4);
  return {v, v};
}

TermPair inelastic_terms(double s) {
  const auto poly = saturation_polynomials(s);
  const double s2 = s * s;
  const double c_num = s2 * (20736.0 + s * (23424.0 + s * (7108.0 + s * (601.0 + s * (44.0 + s * 2.0)))));
  const double l_num = s2 * (2016.0 + s * (2244.0 + s * (796.0 + s * (146.0 + s * 7.0))));
  const double q = (1.0 + s) * (1.0 + s);
  return {c_num / (9.0 * q * (4.0 + s) * poly.p), l_num / (3.0 * q * poly.p)};
}

OracleTerms oracle_terms(double s) {
  const TermPair tot = total_terms(s);
  const TermPair el = elastic_terms(s);
  const TermPair inel = inelastic_terms(s);
  return {tot.ladder, tot.crossed, el.ladder, el.crossed, inel.ladder, inel.crossed, enhancement_factor(s)};
}

double lineshape(double x1, double x2) {
  if (x1 == 0.0 && x2 == 0.0) throw DomainError("lineshape: singular at (0, 0)");
  return x1 / (std::numbers::pi * (x1 * x1 + x2 * x2));
}

Densities weak_field_spectra(double nu, double omega, double gamma) {
  const double r4 = std::pow(omega / gamma, 4);
  const double d = gamma * gamma + nu * nu;
  const double d3 = d * d * d;
  const double g3 = gamma * gamma * gamma;
  return {r4 * g3 * (2.0 * gamma * gamma + nu * nu) / (2.0 * d3) / std::numbers::pi,
          r4 * g3 * gamma * gamma / d3 / std::numbers::pi};
}

Densities strong_field_spectra(double nu, double omega, double gamma) {
  const double g = gamma;
  const double w = omega;
  auto pair = [&](double width, double shift) { return lineshape(width, nu - shift) + lineshape(width, nu + shift); };
  const double ladder = 0.5 * lineshape(g, nu) + 0.25 * lineshape(3.0 * g, nu) + pair(3.0 * g, 2.0 * w) / 72.0 +
                        pair(1.5 * g, w) / 9.0 + 5.0 / 18.0 * pair(2.5 * g, w) + 14.0 / 9.0 * pair(1.5 * g, 0.5 * w);
  const double crossed = 0.5 * lineshape(2.0 * g, nu) + 0.25 * lineshape(3.0 * g, nu) - pair(2.5 * g, w) / 6.0 +
                         pair(3.0 * g, 2.0 * w) / 72.0;
  // frequency in the first slot: dispersive resonances at +-Omega/2
  const double dispersive = lineshape(nu + 0.5 * w, 1.5 * g) - lineshape(nu - 0.5 * w, 1.5 * g);
  const double r = g / w;
  return {r * r * ladder, r * r * crossed + r * r * r * 208.0 / 45.0 * dispersive};
}

}  // namespace cbs::oracle
