#include "oamsim/modes.hpp"
#include "oamsim/diag.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/radial.hpp"
#include "oamsim/specfun.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace oamsim {

using std::numbers::pi;

double BeamParams::k() const { return 2.0 * pi / wavelength; }
double BeamParams::rayleigh() const { return pi * w0 * w0 / wavelength; }
double BeamParams::width(double zz) const {
    const double u = zz / rayleigh();
    return w0 * std::sqrt(1.0 + u * u);
}
double BeamParams::gouy(double zz) const { return std::atan(zz / rayleigh()); }
double BeamParams::inv_curvature(double zz) const {
    const double zr = rayleigh();
    return zz / (zz * zz + zr * zr);
}

double coeff_power(const PolarizedSuperposition& s) {
    double p = 0.0;
    for (const auto& t : s.L) p += std::norm(t.coeff);
    for (const auto& t : s.R) p += std::norm(t.coeff);
    return p;
}

void validate(const PolarizedSuperposition& s) {
    for (const auto* list : {&s.L, &s.R}) {
        std::set<std::tuple<int, double, int, double>> seen;
        for (const auto& t : *list) {
            if (t.family == ModeFamily::LG && (t.p < 0 || t.p != std::floor(t.p)))
                throw DomainError("LG term with non-integer or negative p");
            if (t.family == ModeFamily::HyGG && t.p < -std::abs(t.m))
                throw DomainError("HyGG term with p < -|m|");
            if (!seen.emplace(int(t.family), t.p, t.m, t.origin).second)
                throw DomainError("repeated mode index in superposition");
        }
    }
    if (s.normalized && std::abs(coeff_power(s) - 1.0) > 1e-9)
        throw DomainError("superposition flagged normalized but sum |c|^2 != 1");
}

cplx lg_amplitude(const LGIndex& idx, const BeamParams& b, double r, double phi) {
    if (idx.p < 0) throw DomainError("lg_amplitude: p must be >= 0");
    const int a = std::abs(idx.m);
    const double w = b.width(b.z);
    const double x = 2.0 * r * r / (w * w);
    const double norm = std::sqrt(2.0 * std::exp(specfun::log_gamma(idx.p + 1.0) - specfun::log_gamma(idx.p + a + 1.0)) / pi) / w;
    const double radial = norm * std::pow(std::sqrt(x), a) * specfun::assoc_laguerre(idx.p, a, x) * std::exp(-0.5 * x);
    const double phase = -0.5 * b.k() * r * r * b.inv_curvature(b.z) + (2 * idx.p + a + 1) * b.gouy(b.z) + idx.m * phi;
    return std::polar(radial, phase);
}

std::vector<cplx> hygg_coefficients(double p, int m, int K) {
    const int a = std::abs(m);
    if (p < -a) throw DomainError("hygg_coefficients: p < -|m|");
    if (K < 0) throw DomainError("hygg_coefficients: K < 0");
    std::vector<cplx> A(K + 1);
    // k-independent part: Gamma(p/2+|m|+1) / sqrt(Gamma(p+|m|+1))
    const double base = specfun::log_gamma(0.5 * p + a + 1.0) - 0.5 * specfun::log_gamma(p + a + 1.0);
    // (-p/2)_k in log form; exactly zero past k = p/2 for even p >= 0
    double log_poch = 0.0;
    int sign = 1;
    bool zero = false;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) {
            const double f = (k - 1) - 0.5 * p;
            if (f == 0.0) zero = true;
            else {
                log_poch += std::log(std::abs(f));
                if (f < 0) sign = -sign;
            }
        }
        if (zero) {
            A[k] = 0.0;
            continue;
        }
        const double lg = base + 0.5 * (specfun::log_gamma(k + a + 1.0) - specfun::log_gamma(k + 1.0)) -
                          specfun::log_gamma(k + a + 1.0) + log_poch;
        A[k] = sign * std::exp(lg);
    }
    return A;
}

double hygg_tail_mass(double p, int m, int K) {
    double s = 0.0;
    for (const auto& a : hygg_coefficients(p, m, K)) s += std::norm(a);
    return 1.0 - s;
}

cplx hygg_amplitude(const HyGGIndex& idx, const BeamParams& b, double r, double phi, int K, double* tail) {
    const auto A = hygg_coefficients(idx.p, idx.m, K);
    const double t = hygg_tail_mass(idx.p, idx.m, K);
    if (tail) *tail = t;
    if (t > 1e-3) {
        std::ostringstream os;
        os << "HyGG(" << idx.p << "," << idx.m << ") truncated at K=" << K << ", tail mass " << t;
        diag::warn(os.str());
    }
    cplx s = 0.0;
    for (int k = 0; k <= K; ++k)
        if (A[k] != 0.0) s += A[k] * lg_amplitude({k, idx.m}, b, r, phi);
    return s;
}

std::vector<cplx> lg_series(const ModeTerm& t, const BeamParams& beam, int K) {
    std::vector<cplx> c(K + 1, 0.0);
    if (t.family == ModeFamily::LG) {
        const int p = static_cast<int>(t.p);
        if (p <= K) c[p] = t.coeff;
        return c;
    }
    const auto A = hygg_coefficients(t.p, t.m, K);
    const double psi = beam.gouy(t.origin);
    for (int k = 0; k <= K; ++k) c[k] = t.coeff * A[k] * std::polar(1.0, -2.0 * k * psi);
    return c;
}

Field render_lg_series(const std::vector<cplx>& coeffs, int m, bool left, const BeamParams& beam, const Grid& g,
                       int radial_samples) {
    Field f(g, beam.z, beam.wavelength);
    const int K = static_cast<int>(coeffs.size());
    const int a = std::abs(m);
    const double w = beam.width(beam.z);
    const double psi = beam.gouy(beam.z);
    const double rmax = 0.5 * g.extent * std::sqrt(2.0) * 1.001 + g.dx();
    const int nr = radial_samples;
    const double dr = rmax / (nr - 1);
    // radial profile without the curvature factor (smooth), linear interpolation
    std::vector<cplx> ph(K);
    for (int k = 0; k < K; ++k) ph[k] = coeffs[k] * std::polar(1.0, (2.0 * k + a + 1.0) * psi);
    std::vector<cplx> prof(nr);
    std::vector<double> u(K);
    const double pre = std::sqrt(2.0 / pi) / w;
    for (int i = 0; i < nr; ++i) {
        const double r = i * dr;
        radial::lg_profiles(K, a, 2.0 * r * r / (w * w), u.data());
        cplx s = 0.0;
        for (int k = 0; k < K; ++k) s += ph[k] * u[k];
        prof[i] = pre * s;
    }
    const double kc = -0.5 * beam.k() * beam.inv_curvature(beam.z);
    auto& out = left ? f.L : f.R;
    for (int iy = 0; iy < g.n; ++iy) {
        const double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = g.coord(ix);
            const double r = std::hypot(x, y);
            const double t = r / dr;
            const int i0 = std::min(static_cast<int>(t), nr - 2);
            const double fr = t - i0;
            const cplx v = (1.0 - fr) * prof[i0] + fr * prof[i0 + 1];
            out[size_t(iy) * g.n + ix] = v * std::polar(1.0, kc * r * r + m * std::atan2(y, x));
        }
    }
    return f;
}

Field render(const PolarizedSuperposition& s, const BeamParams& beam, const Grid& g, const RenderOptions& opt) {
    // gather LG coefficients per (polarization, m)
    std::map<std::pair<int, int>, std::vector<cplx>> acc;
    const int K = opt.hygg_order;
    for (int pol = 0; pol < 2; ++pol) {
        for (const auto& t : (pol == 0 ? s.L : s.R)) {
            int kk = K;
            if (t.family == ModeFamily::LG) kk = std::max(K, static_cast<int>(t.p));
            auto c = lg_series(t, beam, kk);
            auto& v = acc[{pol, t.m}];
            if (v.size() < c.size()) v.resize(c.size(), 0.0);
            for (size_t k = 0; k < c.size(); ++k) v[k] += c[k];
        }
    }
    Field f(g, beam.z, beam.wavelength);
    for (const auto& [key, c] : acc) {
        // drop trailing zeros (pure LG terms)
        size_t len = c.size();
        while (len > 1 && c[len - 1] == 0.0) --len;
        std::vector<cplx> cc(c.begin(), c.begin() + len);
        Field part = render_lg_series(cc, key.second, key.first == 0, beam, g, opt.radial_samples);
        for (size_t i = 0; i < f.size(); ++i) {
            f.L[i] += part.L[i];
            f.R[i] += part.R[i];
        }
    }
    return f;
}

}  // namespace oamsim
