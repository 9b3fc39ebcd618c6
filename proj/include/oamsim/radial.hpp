#pragma once

#include <vector>

namespace oamsim::radial {

// u_k(x) = sqrt(k!/(k+a)!) L_k^a(x) x^(a/2) exp(-x/2), k = 0..K-1, written to out.
// With x = 2r^2/w^2, LG_{k,m} = sqrt(2/pi)/w * u_k^{|m|}(x) * phases.
void lg_profiles(int K, int a, double x, double* out);

// Q[k_out][k_in] = integral_0^inf u_{k_out}^{a_out}(x) u_{k_in}^{a_in}(x) dx, K x K row-major.
// Cached; safe to call from several threads.
const std::vector<double>& overlap_matrix(int a_in, int a_out, int K);

}  // namespace oamsim::radial
