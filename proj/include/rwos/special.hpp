#pragma once

namespace rwos {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

double erfc(double x);
double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);

/// Owen's T function, classical definition
/// (1/2pi) int_0^a exp(-h^2 (1+x^2)/2) / (1+x^2) dx.
double owen_t(double h, double a);
/// The same integral with exponent +h^2 (1+x^2)/2, by quadrature.
double owen_t_positive_exponent(double h, double a);

/// Hurwitz zeta sum_{k>=0} (k+q)^{-s}, s > 1, q > 0.
double hurwitz_zeta(double s, double q);
/// zeta(s) for real s != 1 from the alternating series with Cohen-Villegas-Zagier acceleration.
double zeta_alternating(double s, int terms = 30);

}  // namespace rwos
