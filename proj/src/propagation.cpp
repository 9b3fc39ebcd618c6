#include "oamsim/propagation.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/fft.hpp"


#include <cmath>
#include <numbers>
#include <sstream>

namespace oamsim {

using std::numbers::pi;

Jones operator*(const Jones& a, const Jones& b) {
    Jones c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Jones waveplate_jones(const WaveplateConfig& wp) {
    // linear basis: J = Rot(-t) diag(1, e^{i G}) Rot(t); circular basis via L = (H + iV)/sqrt2, R = (H - iV)/sqrt2
    const double c = std::cos(wp.angle), s = std::sin(wp.angle);
    const cplx e = std::polar(1.0, wp.retardance);
    const cplx jhh = c * c + e * s * s;
    const cplx jhv = c * s * (1.0 - e);
    const cplx jvv = s * s + e * c * c;
    // U columns are L, R in (H, V); result = U^H J U
    const cplx I(0.0, 1.0);
    const cplx U[2][2] = {{1.0, 1.0}, {I, -I}};
    const cplx J[2][2] = {{jhh, jhv}, {jhv, jvv}};
    Jones out{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cplx sum = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) sum += std::conj(U[i][a]) * J[i][j] * U[j][b];
            out[a][b] = 0.5 * sum;
        }
    return out;
}

double max_fresnel_distance(const Grid& g, double wavelength) {
    const double dx = g.dx();
    return 2.0 * g.n * dx * dx / wavelength;
}

namespace {

void propagate_plane(const std::vector<cplx>& in, std::vector<cplx>& out, int n, double dx, double wavelength,
                     double dz) {
    const int N = 2 * n;
    std::vector<cplx> b(size_t(N) * N, 0.0);
    const int off = n / 2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b[size_t(i + off) * N + j + off] = in[size_t(i) * n + j];
    fft2d(b, N, true);
    const double k = 2.0 * pi / wavelength;
    const double df = 1.0 / (N * dx);
    const cplx carrier = std::polar(1.0 / (double(N) * N), -k * dz);
    for (int i = 0; i < N; ++i) {
        const double fy = (i < N / 2 ? i : i - N) * df;
        for (int j = 0; j < N; ++j) {
            const double fx = (j < N / 2 ? j : j - N) * df;
            b[size_t(i) * N + j] *= carrier * std::polar(1.0, pi * wavelength * dz * (fx * fx + fy * fy));
        }
    }
    fft2d(b, N, false);
    out.assign(size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[size_t(i) * n + j] = b[size_t(i + off) * N + j + off];
}

}  // namespace

Field fresnel_fft(const Field& f, double dz) {
    if (dz == 0.0) throw DomainError("fresnel_fft: dz must be non-zero");
    const double lim = max_fresnel_distance(f.grid(), f.wavelength);
    if (std::abs(dz) > lim) {
        const int nmin = static_cast<int>(std::ceil(f.wavelength * std::abs(dz) / (2.0 * f.dx() * f.dx())));
        std::ostringstream os;
        os << "fresnel_fft: |dz| = " << std::abs(dz) << " m exceeds the sampling limit " << lim
           << " m for n = " << f.n << "; need n >= " << nmin + (nmin % 2) << " at the same pitch";
        throw SamplingError(os.str());
    }
    Field o = f;
    o.z = f.z + dz;
    propagate_plane(f.L, o.L, f.n, f.dx(), f.wavelength, dz);
    propagate_plane(f.R, o.R, f.n, f.dx(), f.wavelength, dz);
    return o;
}

Field fresnel_direct(const Field& f, double dz) {
    if (f.n > 256) throw DomainError("fresnel_direct: n > 256 is too expensive");
    if (dz == 0.0) throw DomainError("fresnel_direct: dz must be non-zero");
    const int n = f.n;
    const double dx = f.dx();
    const double k = 2.0 * pi / f.wavelength;
    // kernel -e^{-ik dz}/(i lambda dz) exp(-ik d^2 / 2dz) factorises into x and y parts
    std::vector<cplx> Kx(size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double d = (a - b) * dx;
            Kx[size_t(a) * n + b] = std::polar(1.0, -k * d * d / (2.0 * dz));
        }
    const cplx pre = -std::polar(1.0, -k * dz) / (cplx(0.0, 1.0) * f.wavelength * dz) * (dx * dx);
    Field o = f;
    o.z = f.z + dz;
    std::vector<cplx> tmp(size_t(n) * n);
    for (int c = 0; c < 2; ++c) {
        const auto& in = c == 0 ? f.L : f.R;
        auto& out = c == 0 ? o.L : o.R;
        // tmp[i][b] = sum_j in[i][j] Kx[b][j]   (x direction)
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < n; ++b) {
                cplx s = 0.0;
                for (int j = 0; j < n; ++j) s += in[size_t(i) * n + j] * Kx[size_t(b) * n + j];
                tmp[size_t(i) * n + b] = s;
            }
        // out[a][b] = sum_i Kx[a][i] tmp[i][b]   (y direction)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                cplx s = 0.0;
                for (int i = 0; i < n; ++i) s += Kx[size_t(a) * n + i] * tmp[size_t(i) * n + b];
                out[size_t(a) * n + b] = pre * s;
            }
    }
    return o;
}

Field qplate_transform(const Field& f, const QPlateConfig& qp) {
    if (std::abs(f.z - qp.z) > 1e-9 * std::max(1.0, std::abs(qp.z)))
        throw DomainError("qplate_transform: field plane does not match the q-plate plane");
    Field o = f;
    const double c = std::cos(0.5 * qp.delta), s = std::sin(0.5 * qp.delta);
    const cplx I(0.0, 1.0);
    const Grid g = f.grid();
    for (int iy = 0; iy < f.n; ++iy) {
        const double y = g.coord(iy);
        for (int ix = 0; ix < f.n; ++ix) {
            const double phi = std::atan2(y, g.coord(ix));
            const size_t id = size_t(iy) * f.n + ix;
            const cplx eL = I * s * std::polar(1.0, -2.0 * (qp.q * phi + qp.alpha0));
            const cplx eR = I * s * std::polar(1.0, 2.0 * (qp.q * phi + qp.alpha0));
            o.L[id] = c * f.L[id] + eL * f.R[id];
            o.R[id] = c * f.R[id] + eR * f.L[id];
        }
    }
    return o;
}

Field jones_transform(const Field& f, const Jones& j) {
    Field o = f;
    for (size_t i = 0; i < f.size(); ++i) {
        o.L[i] = j[0][0] * f.L[i] + j[0][1] * f.R[i];
        o.R[i] = j[1][0] * f.L[i] + j[1][1] * f.R[i];
    }
    return o;
}

Field waveplate_transform(const Field& f, const WaveplateConfig& wp) {
    return jones_transform(f, waveplate_jones(wp));
}

std::vector<double> azimuthal_spectrum(const Field& f, int mmax) {
    // bilinear samples on rings of radius r_j = j dx, angular DFT, weight by r dr
    const int nphi = 256;
    const Grid g = f.grid();
    const int nring = f.n / 2 - 2;
    std::vector<double> spec(2 * mmax + 1, 0.0);
    double total = 0.0;
    std::vector<cplx> ring(nphi);
    auto sample = [&](const std::vector<cplx>& a, double x, double y) {
        const double fx = x / g.dx() + f.n / 2, fy = y / g.dx() + f.n / 2;
        const int i0 = static_cast<int>(std::floor(fy)), j0 = static_cast<int>(std::floor(fx));
        const double ty = fy - i0, tx = fx - j0;
        auto at = [&](int i, int j) { return a[size_t(i) * f.n + j]; };
        return (1 - ty) * ((1 - tx) * at(i0, j0) + tx * at(i0, j0 + 1)) +
               ty * ((1 - tx) * at(i0 + 1, j0) + tx * at(i0 + 1, j0 + 1));
    };
    for (int jr = 1; jr < nring; ++jr) {
        const double r = jr * g.dx();
        for (const auto* comp : {&f.L, &f.R}) {
            for (int t = 0; t < nphi; ++t) {
                const double phi = 2.0 * pi * t / nphi;
                ring[t] = sample(*comp, r * std::cos(phi), r * std::sin(phi));
            }
            double ringpow = 0.0;
            for (auto& v : ring) ringpow += std::norm(v);
            ringpow /= nphi;
            total += ringpow * r;
            for (int m = -mmax; m <= mmax; ++m) {
                cplx c = 0.0;
                for (int t = 0; t < nphi; ++t) c += ring[t] * std::polar(1.0, -m * 2.0 * pi * t / nphi);
                c /= double(nphi);
                spec[m + mmax] += std::norm(c) * r;
            }
        }
    }
    if (total > 0)
        for (auto& v : spec) v /= total;
    return spec;
}

}  // namespace oamsim
