#include "doctest.h"

#include "oamsim/diag.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/modes.hpp"
#include "oamsim/propagation.hpp"

#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <string>
#include <vector>

using namespace oamsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// evaluate a point function on a grid into the L component
template <class F>
Field sample(const Grid& g, const BeamParams& b, F fn) {
    Field f(g, b.z, b.wavelength);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = g.coord(ix), y = g.coord(iy);
            f.L[size_t(iy) * g.n + ix] = fn(std::hypot(x, y), std::atan2(y, x));
        }
    return f;
}

Field lg_field(int p, int m, const BeamParams& b, const Grid& g) {
    return sample(g, b, [&](double r, double phi) { return lg_amplitude({p, m}, b, r, phi); });
}

// direct substitution of the coefficient formula with GSL gammas (p not an even integer >= 0)
double coefficient_oracle(double p, int m, int k) {
    const int a = std::abs(m);
    return std::sqrt(gsl_sf_gamma(k + a + 1) / (gsl_sf_gamma(k + 1) * gsl_sf_gamma(p + a + 1))) *
           gsl_sf_gamma(0.5 * p + a + 1) / gsl_sf_gamma(k + a + 1) * gsl_sf_gamma(k - 0.5 * p) /
           gsl_sf_gamma(-0.5 * p);
}

struct WarningCapture {
    std::vector<std::string> msgs;
    diag::WarningHandler prev;
    WarningCapture() {
        prev = diag::set_warning_handler([this](const std::string& s) { msgs.push_back(s); });
    }
    ~WarningCapture() { diag::set_warning_handler(prev); }
};

}  // namespace

TEST_CASE("lg_amplitude on axis and phase law") {
    BeamParams b;
    CHECK(std::abs(lg_amplitude({0, 0}, b, 0.0, 0.0) - std::sqrt(2.0 / kPi) / b.w0) < 1e-9 / b.w0);
    CHECK(std::arg(lg_amplitude({0, 0}, b, 0.0, 0.0)) == doctest::Approx(0.0));
    for (double z : {0.0, 0.05, 0.3}) CHECK(std::abs(lg_amplitude({0, 3}, b.at(z), 0.0, 1.0)) == 0.0);
    for (int m : {-4, -1, 1, 3, 5}) {
        const cplx a0 = lg_amplitude({1, m}, b.at(0.07), 0.8 * b.w0, 0.0);
        const cplx a1 = lg_amplitude({1, m}, b.at(0.07), 0.8 * b.w0, kPi / 2);
        const double d = std::remainder(std::arg(a1) - std::arg(a0) - m * kPi / 2, 2 * kPi);
        CHECK(std::abs(d) < 1e-12);
    }
}

TEST_CASE("lg_amplitude unit power by quadrature") {
    BeamParams b;
    const Grid g{256, 12 * b.w0};
    for (auto [p, m] : {std::pair{0, 0}, {2, 1}, {1, -4}}) {
        CHECK(power(lg_field(p, m, b, g)) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(power(lg_field(p, m, b.at(0.2), Grid{256, 24 * b.w0})) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("LG orthonormality on 512 grid") {
    BeamParams b;
    const Grid g{512, 12 * b.w0};
    std::vector<Field> modes;
    std::vector<std::pair<int, int>> idx;
    for (int p = 0; p <= 4; ++p)
        for (int m = -5; m <= 5; ++m) {
            modes.push_back(lg_field(p, m, b, g));
            idx.push_back({p, m});
        }
    double worst = 0.0;
    for (size_t i = 0; i < modes.size(); ++i)
        for (size_t j = i; j < modes.size(); ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(overlap(modes[i], modes[j]) - expect));
        }
    CHECK(worst <= 1e-4);
}

TEST_CASE("overlap examples") {
    BeamParams b;
    const Grid g{256, 12 * b.w0};
    const Field a = lg_field(0, 1, b, g), c = lg_field(0, 2, b, g);
    CHECK(std::abs(overlap(a, a) - 1.0) <= 1e-6);
    CHECK(std::abs(overlap(a, c)) <= 1e-6);
    CHECK_THROWS_AS(overlap(a, lg_field(0, 1, b, Grid{128, 12 * b.w0})), GridMismatch);
}

TEST_CASE("hygg_coefficients examples") {
    const auto e0 = hygg_coefficients(0.0, 1, 3);
    REQUIRE(e0.size() == 4);
    CHECK(std::abs(e0[0] - 1.0) < 1e-14);
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(e0[k]) == 0.0);
    CHECK(hygg_coefficients(-1.0, 1, 0)[0].real() == doctest::Approx(gsl_sf_gamma(1.5)).epsilon(1e-13));
    CHECK_THROWS_AS(hygg_coefficients(-2.5, 2, 4), DomainError);
    CHECK_THROWS_AS(hygg_coefficients(-1.0, 0, 4), DomainError);
}

TEST_CASE("hygg_coefficients match direct gamma substitution") {
    for (double p : {-5.0, -3.0, -1.0, 0.7, 2.5, 5.0})
        for (int m : {1, -3, 5}) {
            if (p < -std::abs(m)) continue;
            const auto A = hygg_coefficients(p, m, 30);
            for (int k = 0; k <= 30; ++k) {
                const double ref = coefficient_oracle(p, m, k);
                CHECK(std::abs(A[k].real() - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
                CHECK(A[k].imag() == 0.0);
            }
        }
}

TEST_CASE("hygg partial sums converge monotonically to 1") {
    // slow 1/(4k^2) decay for p = -|m|: K = 40 leaves about 6e-3
    double prev = 0.0;
    const auto A = hygg_coefficients(-1.0, 1, 4000);
    double s = 0.0;
    for (size_t k = 0; k < A.size(); ++k) {
        s += std::norm(A[k]);
        CHECK(s >= prev);
        CHECK(s <= 1.0 + 1e-12);
        prev = s;
        if (k == 40) CHECK(s == doctest::Approx(0.99392).epsilon(1e-4));
    }
    CHECK(1.0 - s < 1e-4);
    CHECK(hygg_tail_mass(-1.0, 1, 40) == doctest::Approx(1.0 - 0.99392).epsilon(2e-2));
    CHECK(hygg_tail_mass(-5.0, 5, 40) < hygg_tail_mass(-5.0, 5, 20));
}

TEST_CASE("hygg pole limits are continuous in p") {
    for (int j = 0; j <= 3; ++j)
        for (int m : {0, 2, -3}) {
            const auto c = hygg_coefficients(2.0 * j, m, 12);
            for (double eps : {1e-6, -1e-6}) {
                if (2.0 * j + eps < -std::abs(m)) continue;
                const auto n = hygg_coefficients(2.0 * j + eps, m, 12);
                for (int k = 0; k <= 12; ++k) CHECK(std::abs(c[k] - n[k]) < 1e-5);
            }
            for (int k = j + 1; k <= 12; ++k) CHECK(c[k] == 0.0);
        }
}

TEST_CASE("hygg_amplitude p=0 reduces to LG and winds m times") {
    BeamParams b = BeamParams{}.at(0.04);
    for (double r : {0.0, 0.3e-3, 0.9e-3})
        for (double phi : {0.0, 1.0, -2.5}) {
            const cplx h = hygg_amplitude({0.0, 2}, b, r, phi);
            CHECK(std::abs(h - lg_amplitude({0, 2}, b, r, phi)) < 1e-12 / b.w0);
        }
    WarningCapture wc;
    double winding = 0.0;
    const int N = 720;
    cplx prev = hygg_amplitude({-5.0, 5}, b, b.w0, 0.0);
    for (int i = 1; i <= N; ++i) {
        const cplx cur = hygg_amplitude({-5.0, 5}, b, b.w0, 2 * kPi * i / N);
        winding += std::arg(cur / prev);
        prev = cur;
    }
    CHECK(winding / (2 * kPi) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("hygg_amplitude truncation warning") {
    WarningCapture wc;
    double tail = -1.0;
    hygg_amplitude({-1.0, 1}, BeamParams{}, 1e-4, 0.0, 40, &tail);
    CHECK(tail > 1e-3);
    CHECK(wc.msgs.size() == 1);
    hygg_amplitude({3.0, 1}, BeamParams{}, 1e-4, 0.0, 40, &tail);
    CHECK(tail < 1e-3);
    CHECK(wc.msgs.size() == 1);
}

TEST_CASE("series-built HyGG projects back onto its coefficients") {
    WarningCapture wc;
    BeamParams b;
    const Grid g{256, 24 * b.w0};
    for (double p : {-1.0, -3.0, -5.0}) {
        const int m = static_cast<int>(-p);
        const Field h = sample(g, b, [&](double r, double phi) { return hygg_amplitude({p, m}, b, r, phi); });
        const auto A = hygg_coefficients(p, m, 5);
        for (int k = 0; k <= 5; ++k) CHECK(std::abs(overlap(lg_field(k, m, b, g), h) - A[k]) <= 1e-3);
    }
}

TEST_CASE("overlap of LG_{0,5} with HyGG_{-5,5}") {
    BeamParams b;
    const Grid g{512, 24 * b.w0};
    PolarizedSuperposition s;
    s.L.push_back({1.0, ModeFamily::HyGG, -5.0, 5, 0.0});
    const Field h = render(s, b, g);
    const double A0 = std::norm(hygg_coefficients(-5.0, 5, 0)[0]);
    CHECK(std::norm(overlap(lg_field(0, 5, b, g), h)) == doctest::Approx(A0).epsilon(1e-4));
}

TEST_CASE("HyGG_{-1,1} is a Fresnel-propagated spiral-phase Gaussian") {
    WarningCapture wc;
    BeamParams b;
    const Grid g{256, 24 * b.w0};
    const Field spiral = sample(g, b, [&](double r, double phi) {
        return std::polar(std::exp(-r * r / (b.w0 * b.w0)), phi);
    });
    for (double z : {0.05, 0.15}) {
        const Field prop = fresnel_fft(spiral, z);
        const Field h = sample(g, b.at(z), [&](double r, double phi) { return hygg_amplitude({-1.0, 1}, b.at(z), r, phi); });
        CHECK(normalized_overlap(prop, h) >= 0.99);
    }
}

TEST_CASE("superposition validation") {
    PolarizedSuperposition s;
    s.L.push_back({std::sqrt(0.5), ModeFamily::LG, 0, 1, 0});
    s.R.push_back({std::sqrt(0.5), ModeFamily::LG, 0, 1, 0});
    s.normalized = true;
    CHECK_NOTHROW(validate(s));
    CHECK(coeff_power(s) == doctest::Approx(1.0).epsilon(1e-12));
    s.L.push_back({0.0, ModeFamily::LG, 0, 1, 0});
    CHECK_THROWS_AS(validate(s), DomainError);
    s.L.pop_back();
    s.L[0].coeff = 0.9;
    CHECK_THROWS_AS(validate(s), DomainError);
}
