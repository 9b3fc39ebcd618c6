#pragma once

#include <complex>
#include <vector>

namespace oamsim {

// In-place unnormalised 2-D DFT of an n x n row-major array (FFTW, plans cached per size).
void fft2d(std::vector<std::complex<double>>& a, int n, bool forward);

}  // namespace oamsim
