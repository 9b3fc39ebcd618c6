#pragma once

#include <complex>
#include <string>
#include <vector>

namespace oamsim {

using cplx = std::complex<double>;

struct Grid {
    int n = 512;
    double extent = 0.0;  // physical side length [m]

    double dx() const { return extent / n; }
    // sample coordinate along one axis, origin at index n/2
    double coord(int i) const { return (i - n / 2) * dx(); }
};

// Sampled transverse field, left/right circular components, row-major (row = y).
struct Field {
    int n = 0;
    double extent = 0.0;
    double z = 0.0;
    double wavelength = 0.0;
    std::vector<cplx> L;
    std::vector<cplx> R;

    Field() = default;
    Field(const Grid& g, double z_, double wavelength_);

    Grid grid() const { return {n, extent}; }
    double dx() const { return extent / n; }
    double cell_area() const { return dx() * dx(); }
    size_t size() const { return static_cast<size_t>(n) * n; }
};

void require_same_grid(const Field& a, const Field& b, const char* what);

double power(const Field& f);
// <a|b> = sum over both components of conj(a) b dA
cplx overlap(const Field& a, const Field& b);
// |<a|b>| / sqrt(<a|a><b|b>)
double normalized_overlap(const Field& a, const Field& b);

Field scaled(const Field& f, cplx s);
Field normalized(const Field& f);
// a + s b
Field axpy(const Field& a, cplx s, const Field& b);

// Project onto a polarizer with Jones vector (jl, jr) in the circular basis.
// The result keeps both components (the transmitted light is in that state).
Field analyzer(const Field& f, cplx jl, cplx jr);
Field analyzer_h(const Field& f);
// scalar amplitude along H: (L + R)/sqrt(2)
std::vector<cplx> h_component(const Field& f);

// Centre crop / zero-pad embedding (same pitch)
Field resample_centre(const Field& f, int n_new);

// Binary snapshot: 64-byte header then complex64 L plane, complex64 R plane.
void write_snapshot(const Field& f, const std::string& path);
Field read_snapshot(const std::string& path);

}  // namespace oamsim
