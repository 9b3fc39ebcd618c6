#pragma once

namespace oamsim::specfun {

// Gamma function for real x. Throws DomainError at 0, -1, -2, ...
double gamma_real(double x);

// log|Gamma(x)| for x > 0
double log_gamma(double x);

// Rising factorial (a)_k = a (a+1) ... (a+k-1)
double pochhammer(double a, int k);

// Generalised Laguerre polynomial L_k^a(x), three-term recurrence
double assoc_laguerre(int k, double a, double x);

}  // namespace oamsim::specfun
