#pragma once

#include "oamsim/field.hpp"

#include <complex>
#include <vector>

namespace oamsim {

struct LGIndex {
    int p = 0;
    int m = 0;
};

struct HyGGIndex {
    double p = 0.0;
    int m = 0;
};

// Gaussian beam parameters. Waist plane at z = 0.
struct BeamParams {
    double w0 = 0.22e-3;
    double wavelength = 808e-9;
    double z = 0.0;

    double k() const;
    double rayleigh() const;
    double width(double zz) const;
    double gouy(double zz) const;  // arctan(z / z_R)
    // 1/R(z), zero at the waist
    double inv_curvature(double zz) const;
    BeamParams at(double zz) const { return {w0, wavelength, zz}; }
};

enum class ModeFamily { LG, HyGG };

// One weighted term. For HyGG terms `origin` is the plane where the mode has its
// flat radial profile r^(p+|m|) exp(-r^2/w^2) (w, R of the global beam at that plane);
// origin = 0 is the plain HyGG of the series expansion.
struct ModeTerm {
    cplx coeff{0.0, 0.0};
    ModeFamily family = ModeFamily::LG;
    double p = 0.0;
    int m = 0;
    double origin = 0.0;
};

struct PolarizedSuperposition {
    std::vector<ModeTerm> L;
    std::vector<ModeTerm> R;
    bool normalized = false;
};

// sum |coeff|^2 across both lists (the bookkeeping norm; HyGG terms of one m are not orthogonal)
double coeff_power(const PolarizedSuperposition& s);
// throws DomainError if an index repeats within a list or the normalized flag is violated
void validate(const PolarizedSuperposition& s);

cplx lg_amplitude(const LGIndex& idx, const BeamParams& params, double r, double phi);

// A_{p,k}, k = 0..K. Gamma(k-p/2)/Gamma(-p/2) is taken as the Pochhammer product (-p/2)_k,
// which is the continuous limit at the poles p = 0, 2, 4, ...
std::vector<cplx> hygg_coefficients(double p, int m, int K);
// 1 - sum_{k<=K} |A_{p,k}|^2
double hygg_tail_mass(double p, int m, int K);

// Truncated series sum_{k<=K} A_{p,k} LG_{k,m}. Warns through diag when the tail exceeds 1e-3.
cplx hygg_amplitude(const HyGGIndex& idx, const BeamParams& params, double r, double phi, int K = 40,
                    double* tail = nullptr);

// LG_{k,m} coefficients (global beam frame, k = 0..K) of one term, HyGG via the series.
std::vector<cplx> lg_series(const ModeTerm& t, const BeamParams& beam, int K);

struct RenderOptions {
    int hygg_order = 300;  // LG orders used for HyGG terms
    int radial_samples = 8192;
};

// Render a superposition on a grid at plane beam.z (no exp(-ikz) carrier).
Field render(const PolarizedSuperposition& s, const BeamParams& beam, const Grid& g,
             const RenderOptions& opt = {});

// Render a scalar LG coefficient vector (one m) into a single polarization component
Field render_lg_series(const std::vector<cplx>& coeffs, int m, bool left, const BeamParams& beam,
                       const Grid& g, int radial_samples = 8192);

}  // namespace oamsim
