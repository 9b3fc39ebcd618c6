#pragma once

#include "oamsim/field.hpp"

#include <array>

namespace oamsim {

struct QPlateConfig {
    double q = 0.5;
    double delta = 3.14159265358979323846;  // retardation
    double alpha0 = 0.0;
    double z = 0.0;  // device plane
};

struct WaveplateConfig {
    double retardance = 3.14159265358979323846 / 2;  // pi/2 QWP, pi HWP
    double angle = 0.0;                              // fast axis from H
};

using Jones = std::array<std::array<cplx, 2>, 2>;  // acts on (L, R)

Jones waveplate_jones(const WaveplateConfig& wp);
Jones operator*(const Jones& a, const Jones& b);

// Largest |dz| the transfer-function propagator accepts on this grid.
double max_fresnel_distance(const Grid& g, double wavelength);

// Paraxial Fresnel propagation by convolution (transfer function on a 2x zero-padded grid).
Field fresnel_fft(const Field& f, double dz);

// Brute-force quadrature of the Fresnel integral (separable kernel), n <= 256.
Field fresnel_direct(const Field& f, double dz);

Field qplate_transform(const Field& f, const QPlateConfig& qp);
Field waveplate_transform(const Field& f, const WaveplateConfig& wp);
Field jones_transform(const Field& f, const Jones& j);

// Fraction of power on each azimuthal harmonic m in [-mmax, mmax] (both components),
// from an angular Fourier transform on rings.
std::vector<double> azimuthal_spectrum(const Field& f, int mmax);

}  // namespace oamsim
