#include "doctest.h"

#include "oamsim/diag.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/fft.hpp"
#include "oamsim/holography.hpp"
#include "oamsim/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace oamsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field scalar_lg(const std::vector<std::pair<cplx, LGIndex>>& terms, const BeamParams& b, const Grid& g) {
    PolarizedSuperposition s;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (const auto& [c, idx] : terms) {
        s.L.push_back({r2 * c, ModeFamily::LG, double(idx.p), idx.m, 0.0});
        s.R.push_back({r2 * c, ModeFamily::LG, double(idx.p), idx.m, 0.0});
    }
    return normalized(render(s, b, g));
}

// independent readout: FFT of the illuminated hologram, keep the +1 order, shift it to DC, back.
std::vector<cplx> first_order(const Hologram& h, const std::vector<cplx>& illum) {
    const int n = h.n;
    std::vector<cplx> u(illum.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = illum[i] * std::polar(1.0, h.phase[i]);
    fft2d(u, n, true);
    const double dx = h.extent / n;
    const int shift = static_cast<int>(std::lround(n * dx / h.grating_period));
    std::vector<cplx> v(u.size(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int fi = i < n / 2 ? i : i - n, fj = (j < n / 2 ? j : j - n) - shift;
            if (fi * fi + fj * fj >= shift * shift / 4) continue;
            v[size_t((fi + n) % n) * n + (fj + n) % n] = u[size_t(i) * n + j];
        }
    fft2d(v, n, false);
    return v;
}

double scalar_overlap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0.0;
    double na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    return std::abs(s) / std::sqrt(na * nb);
}

struct Quiet {
    diag::WarningHandler prev = diag::set_warning_handler([](const std::string&) {});
    ~Quiet() { diag::set_warning_handler(prev); }
};

WalkSpec walk256(double w0 = 0.21e-3) {
    WalkSpec w = default_walk();
    w.grid.n = 256;
    w.beam.w0 = w0;
    return w;
}

}  // namespace

TEST_CASE("sinc amplitude map") {
    CHECK(hologram_modulation(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hologram_modulation(0.0) == doctest::Approx(0.0).epsilon(1e-9));
    for (double A = 0.05; A < 1.0; A += 0.05) {
        const double M = hologram_modulation(A);
        const double y = kPi * (M - 1.0);
        CHECK(std::sin(y) / y == doctest::Approx(A).epsilon(1e-9));
    }
}

TEST_CASE("plane-wave target gives a pure blazed grating") {
    BeamParams b;
    const Grid g{128, 12 * b.w0};
    Field flat(g, 0.0, b.wavelength);
    std::fill(flat.L.begin(), flat.L.end(), cplx(1.0));
    std::fill(flat.R.begin(), flat.R.end(), cplx(1.0));
    const double period = 8 * g.dx();
    const Hologram h = generate_hologram(flat, period);
    for (size_t i = 0; i < h.phase.size(); ++i) {
        CHECK(h.phase[i] >= 0.0);
        CHECK(h.phase[i] < 2 * kPi);
    }
    // phase - 2 pi x / period is one constant modulo 2 pi
    const cplx ref = std::polar(1.0, h.phase[0] - 2 * kPi * g.coord(0) / period);
    double worst = 0.0;
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const cplx p = std::polar(1.0, h.phase[size_t(iy) * g.n + ix] - 2 * kPi * g.coord(ix) / period);
            worst = std::max(worst, std::abs(p - ref));
        }
    CHECK(worst < 1e-9);
    CHECK_THROWS_AS(generate_hologram(flat, 3 * g.dx()), SamplingError);
}

TEST_CASE("LG_{0,1} target gives a single fork") {
    BeamParams b;
    const Grid g{512, 12 * b.w0};
    const double period = 8 * g.dx();
    const Hologram h = generate_hologram(scalar_lg({{1.0, {0, 1}}}, b, g), period);
    // wind around the ring of peak amplitude, where M = 1
    const double r = b.w0 / std::sqrt(2.0);
    double wind = 0.0;
    cplx prev;
    const int N = 360;
    for (int t = 0; t <= N; ++t) {
        const double phi = 2 * kPi * t / N;
        const double x = r * std::cos(phi), y = r * std::sin(phi);
        const int ix = static_cast<int>(std::lround(x / g.dx())) + g.n / 2;
        const int iy = static_cast<int>(std::lround(y / g.dx())) + g.n / 2;
        const cplx p = std::polar(1.0, h.phase[size_t(iy) * g.n + ix] - 2 * kPi * g.coord(ix) / period);
        if (t > 0) wind += std::arg(p / prev);
        prev = p;
    }
    CHECK(std::abs(wind) / (2 * kPi) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("first order reconstructs the conjugate target") {
    BeamParams b;
    const Grid g{1024, 24 * b.w0};
    const Field t = scalar_lg({{0.8, {1, 3}}, {cplx(0, 0.6), {0, -1}}}, b, g);
    const Hologram h = generate_hologram(t, 8 * g.dx());
    const std::vector<cplx> flat(t.size(), 1.0);
    const auto rec = first_order(h, flat);
    std::vector<cplx> conj_t(t.size());
    const auto tt = h_component(t);
    for (size_t i = 0; i < t.size(); ++i) conj_t[i] = std::conj(tt[i]);
    CHECK(scalar_overlap(rec, conj_t) >= 0.95);
}

TEST_CASE("measure_ideal trivial cases") {
    BeamParams b;
    const Grid g{128, 12 * b.w0};
    const Field a = scalar_lg({{1.0, {0, 3}}}, b, g), c = scalar_lg({{1.0, {0, -3}}}, b, g);
    const auto r = measure_ideal(a, a);
    CHECK(r.eta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.method == Method::Ideal);
    CHECK(r.eta == doctest::Approx(std::norm(r.overlap)));
    CHECK(measure_ideal(a, c).eta <= 1e-6);
    CHECK(measure_ideal(scaled(a, cplx(0, 3.0)), a).eta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(measure_ideal(a, scalar_lg({{1.0, {0, 3}}}, b, Grid{64, 12 * b.w0})), GridMismatch);
}

TEST_CASE("cascade |5> couples better to its HyGG model than to LG_{0,5}") {
    Quiet q;
    const WalkSpec w = walk256();
    const auto sol = solve_coins(oam_target({{5, 1.0}}), w);
    const Field ex = experimental_field(sol.spec, 0.062e-3);
    const double eh = measure_ideal(ex, hygg_model_field(sol.spec, HyggSource::Numeric)).eta;
    const double el = measure_ideal(ex, lg_model_field({{5, 1.0}}, w)).eta;
    CHECK(eh / el > 1.0);
    CHECK(efficiency_ratio(ex, hygg_model_field(sol.spec, HyggSource::Numeric), lg_model_field({{5, 1.0}}, w)) ==
          doctest::Approx(eh / el));
}

TEST_CASE("efficiency_ratio of identical models is one") {
    BeamParams b;
    const Grid g{128, 12 * b.w0};
    const Field a = scalar_lg({{1.0, {1, 1}}, {0.4, {0, 1}}}, b, g);
    const Field m = scalar_lg({{1.0, {0, 1}}}, b, g);
    CHECK(efficiency_ratio(a, m, m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(efficiency_ratio(a, m, scalar_lg({{1.0, {0, -3}}}, b, g)), DomainError);
}

TEST_CASE("holographic readout tracks the ideal projection") {
    Quiet q;
    WalkSpec w = default_walk();
    w.beam.w0 = 0.21e-3;
    const auto targets = benchmark_targets();
    for (const char* label : {"|5>", "|-1>", "QFT_1"}) {
        const auto it = std::find_if(targets.begin(), targets.end(), [&](const TargetState& t) { return t.label == label; });
        REQUIRE(it != targets.end());
        const auto sol = solve_coins(oam_target(it->amp), w);
        const Field ex = resample_centre(experimental_field(sol.spec, 0.062e-3), 1024);
        const Field model = resample_centre(hygg_model_field(sol.spec, HyggSource::Numeric), 1024);
        const Hologram h = generate_hologram(model, 8 * ex.dx());
        const double ideal = measure_ideal(ex, model).eta;
        const auto holo = measure_holographic(ex, h, 2.5e-6);
        CHECK(holo.method == Method::Holographic);
        CHECK(std::abs(holo.eta / ideal - 1.0) <= 0.03);
        // self-reference is exact
        CHECK(measure_holographic(model, h, 2.5e-6).eta == doctest::Approx(1.0).epsilon(1e-9));
        // bit-identical on repeat
        CHECK(measure_holographic(ex, h, 2.5e-6).eta == holo.eta);
    }
}

TEST_CASE("m-mismatched hologram couples nothing") {
    Quiet q;
    WalkSpec w = default_walk();
    w.beam.w0 = 0.21e-3;
    const auto plus = solve_coins(oam_target({{5, 1.0}}), w);
    const auto minus = solve_coins(oam_target({{-5, 1.0}}), w);
    const Field in = resample_centre(experimental_field(plus.spec, 0.062e-3), 1024);
    const Field other = resample_centre(hygg_model_field(minus.spec, HyggSource::Numeric), 1024);
    const Hologram h = generate_hologram(other, 8 * in.dx());
    CHECK(measure_holographic(in, h, 2.5e-6).eta <= 1e-3);
}

TEST_CASE("order overlap is rejected") {
    BeamParams b;
    const Grid g{256, 12 * b.w0};
    // fine radial structure: wide spectrum
    const Field t = scalar_lg({{1.0, {6, 5}}}, b, g);
    const Hologram coarse = generate_hologram(t, 64 * g.dx());
    CHECK_THROWS_AS(measure_holographic(t, coarse, 2.5e-6), SamplingError);
    const Hologram fine = generate_hologram(t, 4 * g.dx());
    CHECK_NOTHROW(measure_holographic(t, fine, 2.5e-6));
}

TEST_CASE("basis completion and fidelity estimator") {
    BeamParams b;
    const Grid g{128, 12 * b.w0};
    std::vector<Field> cands;
    for (int m : walker_ms()) cands.push_back(scalar_lg({{1.0, {0, m}}, {0.3, {1, m}}}, b, g));
    const Field target = scalar_lg({{1.0, {0, 3}}, {0.5, {0, -1}}}, b, g);
    const BasisSet basis = complete_basis(target, cands);
    CHECK(basis.elements.size() == 6);
    CHECK(gram_deviation(basis) <= 1e-6);
    CHECK(normalized_overlap(basis.elements[basis.target_index], target) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(fidelity_on_basis(target, basis) == doctest::Approx(1.0).epsilon(1e-4));

    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    Field in = target;
    for (size_t i = 0; i < in.size(); ++i) {
        in.L[i] += 500.0 * cplx(N(rng), N(rng));
        in.R[i] += 500.0 * cplx(N(rng), N(rng));
    }
    in = normalized(in);
    const double F = fidelity_on_basis(in, basis);
    CHECK(F >= 0.0);
    CHECK(F <= 1.0);
    CHECK(fidelity_on_basis(scaled(in, std::polar(1.0, 2.2)), basis) == doctest::Approx(F).epsilon(1e-12));
    BasisSet perm = basis;
    std::reverse(perm.elements.begin() + 1, perm.elements.end());
    CHECK(fidelity_on_basis(in, perm) == doctest::Approx(F).epsilon(1e-12));
}

TEST_CASE("benchmark targets") {
    const auto t = benchmark_targets();
    REQUIRE(t.size() == 14);
    for (const auto& s : t) {
        double p = 0.0;
        for (const auto& [m, a] : s.amp) p += std::norm(a);
        CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    }
    // QFT_k = 6^{-1/2} sum_{j=1..6} e^{i pi j k / 3} |j>, |j> over -5..5
    const auto& q2 = t[11];
    CHECK(q2.label == "QFT_2");
    int j = 1;
    for (int m : {-5, -3, -1, 1, 3, 5}) {
        CHECK(std::abs(q2.amp.at(m) - std::polar(1.0 / std::sqrt(6.0), kPi * j * 2 / 3.0)) < 1e-14);
        ++j;
    }
    CHECK(std::abs(t[7].amp.at(5) - cplx(0, 1.0 / std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("D exceeds one and grows with |m|") {
    Quiet q;
    const WalkSpec w = walk256();
    const double d1 = basis_state_D(1, w, 0.062e-3), d3 = basis_state_D(3, w, 0.062e-3), d5 = basis_state_D(5, w, 0.062e-3);
    CHECK(d1 > 1.0);
    CHECK(d3 >= d1);
    CHECK(d5 >= d3);
}

TEST_CASE("table formatting") {
    std::vector<TableRow> rows;
    for (const auto& t : benchmark_targets()) rows.push_back({t.label, 0.9, 0.95, 0.1, 0.2, 2.0, 2.1});
    const std::string s = format_table(rows, {{"|1>", 1.096}});
    std::istringstream is(s);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    REQUIRE(lines.size() == 16);
    CHECK(lines[0] == "state,F_LG,F_HyGG,eta_LG,eta_HyGG,ratio,D,D_table");
    CHECK(lines.back().rfind("average,0.9000,0.9500,", 0) == 0);
    CHECK(lines[2] == "|1>,0.9000,0.9500,0.1000,0.2000,2.0000,2.1000,1.0960");
}

TEST_CASE("hologram image export") {
    BeamParams b;
    const Grid g{64, 12 * b.w0};
    const Hologram h = generate_hologram(scalar_lg({{1.0, {0, 2}}}, b, g), 8 * g.dx());
    const auto path = std::filesystem::temp_directory_path() / "oamsim_holo_test.png";
    write_hologram_png(h, path.string());
    const Image8 img = read_png(path.string());
    CHECK(img.width == 64);
    CHECK(img.channels == 1);
    for (size_t i = 0; i < h.phase.size(); ++i)
        CHECK(std::abs(img.data[i] - h.phase[i] / (2 * kPi) * 255.0) <= 0.5 + 1e-9);
    std::filesystem::remove(path);
}
