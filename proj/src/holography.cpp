#include "oamsim/holography.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/fft.hpp"
#include "oamsim/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

namespace oamsim {

using std::numbers::pi;

// ---------------------------------------------------------------- encoding

double hologram_modulation(double A) {
    A = std::clamp(A, 0.0, 1.0);
    // sin(y)/y = A for y = pi (1 - M) in [0, pi]; monotone, bisection
    double lo = 0.0, hi = pi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = mid == 0.0 ? 1.0 : std::sin(mid) / mid;
        if (s > A) lo = mid;
        else hi = mid;
    }
    return 1.0 - 0.5 * (lo + hi) / pi;
}

namespace {

// tabulated M(A), linear interpolation
double modulation_fast(double A) {
    static const std::vector<double> tab = [] {
        std::vector<double> t(4097);
        for (size_t i = 0; i < t.size(); ++i) t[i] = hologram_modulation(double(i) / 4096.0);
        return t;
    }();
    const double x = std::clamp(A, 0.0, 1.0) * 4096.0;
    const int i = std::min(static_cast<int>(x), 4095);
    const double f = x - i;
    return (1.0 - f) * tab[i] + f * tab[i + 1];
}

std::vector<cplx> normalised_scalar(const Field& f) {
    auto h = h_component(f);
    double p = 0.0;
    for (auto& v : h) p += std::norm(v);
    p *= f.cell_area();
    if (p <= 0.0) throw DomainError("zero-power field");
    const double s = 1.0 / std::sqrt(p);
    for (auto& v : h) v *= s;
    return h;
}

}  // namespace

Hologram generate_hologram(const Field& target, double grating_period, TargetModel tag,
                           const PolarizedSuperposition& desc) {
    if (grating_period < 4.0 * target.dx() * (1.0 - 1e-12))
        throw SamplingError("generate_hologram: grating period must span at least 4 grid cells");
    Hologram h;
    h.n = target.n;
    h.extent = target.extent;
    h.wavelength = target.wavelength;
    h.grating_period = grating_period;
    h.model_tag = tag;
    h.target = desc;
    h.target_scalar = normalised_scalar(target);
    double amax = 0.0;
    for (const auto& v : h.target_scalar) amax = std::max(amax, std::abs(v));
    h.phase.resize(target.size());
    const Grid g = target.grid();
    for (int iy = 0; iy < h.n; ++iy)
        for (int ix = 0; ix < h.n; ++ix) {
            const size_t id = size_t(iy) * h.n + ix;
            const cplx t = h.target_scalar[id];
            const double M = modulation_fast(std::abs(t) / amax);
            double theta = -std::arg(t) - pi * M + 2.0 * pi * g.coord(ix) / grating_period;
            theta = std::fmod(theta, 2.0 * pi);
            if (theta < 0) theta += 2.0 * pi;
            double ph = M * theta;
            if (ph >= 2.0 * pi) ph -= 2.0 * pi;
            h.phase[id] = ph;
        }
    return h;
}

void write_hologram_png(const Hologram& h, const std::string& path) {
    Image8 img{h.n, h.n, 1, std::vector<uint8_t>(h.phase.size())};
    for (size_t i = 0; i < h.phase.size(); ++i)
        img.data[i] = static_cast<uint8_t>(std::min(255L, std::lround(h.phase[i] / (2.0 * pi) * 255.0)));
    write_png(img, path);
}

// ---------------------------------------------------------------- measurement

MeasurementResult measure_ideal(const Field& input, const Field& target_model) {
    require_same_grid(input, target_model, "measure_ideal");
    const double pi_ = power(input), pt = power(target_model);
    if (pi_ <= 0 || pt <= 0) throw DomainError("measure_ideal: zero-power field");
    MeasurementResult r;
    r.overlap = overlap(target_model, input) / std::sqrt(pi_ * pt);
    r.eta = std::norm(r.overlap);
    r.method = Method::Ideal;
    return r;
}

namespace {

// radius (cycles/m) containing 99% of the spectral power of a centred array
double spectral_radius99(std::vector<cplx> a, int n, double dx) {
    fft2d(a, n, true);
    const double df = 1.0 / (n * dx);
    std::vector<std::pair<double, double>> rp;
    rp.reserve(a.size());
    double tot = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fy = (i < n / 2 ? i : i - n) * df;
        for (int j = 0; j < n; ++j) {
            const double fx = (j < n / 2 ? j : j - n) * df;
            const double p = std::norm(a[size_t(i) * n + j]);
            rp.emplace_back(std::hypot(fx, fy), p);
            tot += p;
        }
    }
    std::sort(rp.begin(), rp.end());
    double acc = 0.0;
    for (const auto& [r, p] : rp) {
        acc += p;
        if (acc >= 0.99 * tot) return r;
    }
    return rp.back().first;
}

// fiber coupling amplitude of scalar field s behind hologram h (unnormalised)
cplx fiber_amplitude(const std::vector<cplx>& s, const Hologram& h, double fiber_waist, double* gnorm) {
    const int n = h.n;
    const double dx = h.extent / n;
    std::vector<cplx> u(s.size());
    // shift the origin to index 0 so spectral phases refer to the grid centre
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const size_t src = size_t(iy) * n + ix;
            const size_t dst = size_t((iy + n / 2) % n) * n + (ix + n / 2) % n;
            u[dst] = s[src] * std::polar(1.0, h.phase[src]);
        }
    fft2d(u, n, true);
    const double df = 1.0 / (n * dx);
    const double f0 = 1.0 / h.grating_period;
    const double win = 0.5 * f0;
    const double scale = h.wavelength * h.focal_length;  // focal-plane metres per cycle/m
    cplx c = 0.0;
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fy = (i < n / 2 ? i : i - n) * df;
        for (int j = 0; j < n; ++j) {
            const double fx = (j < n / 2 ? j : j - n) * df;
            if (std::hypot(fx - f0, fy) >= win) continue;
            const double du = scale * std::hypot(fx - f0, fy);
            const double g = std::exp(-du * du / (fiber_waist * fiber_waist));
            c += g * u[size_t(i) * n + j];
            g2 += g * g;
        }
    }
    if (gnorm) *gnorm = g2;
    return c;
}

}  // namespace

MeasurementResult measure_holographic(const Field& input, const Hologram& h, double fiber_waist) {
    if (input.n != h.n || std::abs(input.extent - h.extent) > 1e-12 * h.extent)
        throw GridMismatch("measure_holographic: input and hologram grids differ");
    if (!(fiber_waist > 0)) throw DomainError("measure_holographic: fiber waist must be positive");
    const double dx = h.extent / h.n;
    if (h.grating_period < 4.0 * dx * (1.0 - 1e-12)) throw SamplingError("grating period below 4 cells");
    const auto s = h_component(input);
    double ps = 0.0;
    for (const auto& v : s) ps += std::norm(v);
    if (ps <= 0.0) throw DomainError("measure_holographic: input has no H component");
    // first-order content ~ s conj(t); it must fit between neighbouring orders
    std::vector<cplx> prod(s.size());
    for (size_t i = 0; i < s.size(); ++i) prod[i] = s[i] * std::conj(h.target_scalar[i]);
    const double rho = spectral_radius99(prod, h.n, dx);
    if (1.0 / h.grating_period < 2.0 * rho) {
        std::ostringstream os;
        os << "measure_holographic: diffraction orders overlap (order spacing " << 1.0 / h.grating_period
           << " cycles/m < 2 x 99% spectral radius " << rho << "); use a finer grating";
        throw SamplingError(os.str());
    }
    double g2 = 0.0;
    const cplx cs = fiber_amplitude(s, h, fiber_waist, &g2);
    double pt = 0.0;
    for (const auto& v : h.target_scalar) pt += std::norm(v);
    const cplx ct = fiber_amplitude(h.target_scalar, h, fiber_waist, nullptr);
    MeasurementResult r;
    r.method = Method::Holographic;
    if (std::abs(ct) == 0.0) throw DomainError("measure_holographic: hologram does not couple its own target");
    r.overlap = (cs / std::sqrt(ps)) / (ct / std::sqrt(pt));
    r.eta = std::norm(r.overlap);
    return r;
}

// ---------------------------------------------------------------- basis / fidelity

BasisSet complete_basis(const Field& target, const std::vector<Field>& candidates, int dim) {
    BasisSet b;
    b.elements.push_back(normalized(target));
    std::vector<std::pair<double, const Field*>> order;
    for (const auto& c : candidates) order.emplace_back(normalized_overlap(target, c), &c);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& c) { return a.first < c.first; });
    for (const auto& [ov, fp] : order) {
        if (int(b.elements.size()) >= dim) break;
        Field v = normalized(*fp);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& e : b.elements) v = axpy(v, -overlap(e, v), e);
        const double p = power(v);
        if (p < 1e-12) continue;
        b.elements.push_back(scaled(v, 1.0 / std::sqrt(p)));
    }
    b.target_index = 0;
    if (gram_deviation(b) > 1e-6) throw DomainError("complete_basis: Gram matrix not identity");
    return b;
}

double gram_deviation(const BasisSet& b) {
    double d = 0.0;
    for (size_t i = 0; i < b.elements.size(); ++i)
        for (size_t j = 0; j < b.elements.size(); ++j) {
            const cplx g = overlap(b.elements[i], b.elements[j]);
            d = std::max(d, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    return d;
}

std::vector<double> basis_etas(const Field& input, const BasisSet& basis, const MeasureSpec& ms) {
    std::vector<double> eta;
    for (const auto& e : basis.elements) {
        if (ms.method == Method::Ideal) {
            eta.push_back(measure_ideal(input, e).eta);
        } else {
            Hologram h = generate_hologram(e, ms.grating_period);
            h.focal_length = ms.focal_length;
            eta.push_back(measure_holographic(input, h, ms.fiber_waist).eta);
        }
    }
    return eta;
}

double fidelity_on_basis(const Field& input, const BasisSet& basis, const MeasureSpec& ms) {
    const auto eta = basis_etas(input, basis, ms);
    const double tot = std::accumulate(eta.begin(), eta.end(), 0.0);
    if (!(tot > 0.0)) throw DomainError("fidelity_on_basis: degenerate projection set");
    return eta[basis.target_index] / tot;
}

double efficiency_ratio(const Field& input, const Field& hygg_model, const Field& lg_model) {
    const double num = measure_ideal(input, hygg_model).eta;
    const double den = measure_ideal(input, lg_model).eta;
    // below round-off the LG model is orthogonal to the input and D is meaningless
    if (den < 1e-14) throw DomainError("efficiency_ratio: LG overlap underflow");
    return num / den;
}

// ---------------------------------------------------------------- tables

std::vector<TargetState> benchmark_targets() {
    std::vector<TargetState> t;
    for (int m : {-1, 1, 3, -3, -5, 5}) t.push_back({"|" + std::to_string(m) + ">", {{m, 1.0}}});
    const double r2 = 1.0 / std::sqrt(2.0);
    const char* bl[] = {"(|-5>+|5>)/sqrt2", "(|-5>+i|5>)/sqrt2", "(|-5>-|5>)/sqrt2", "(|-5>-i|5>)/sqrt2"};
    for (int b = 0; b < 4; ++b) t.push_back({bl[b], {{-5, r2}, {5, std::polar(r2, b * pi / 2)}}});
    const auto& ms = walker_ms();
    for (int k : {1, 2, 3, 6}) {
        TargetState q{"QFT_" + std::to_string(k), {}};
        for (int j = 0; j < 6; ++j) q.amp[ms[j]] = std::polar(1.0 / std::sqrt(6.0), pi * (j + 1) * k / 3.0);
        t.push_back(q);
    }
    return t;
}

Field experimental_field(const WalkSpec& solved, double delta) {
    WalkSpec s = solved;
    const double w = s.beam.w0;
    s.beam.w0 = w + delta;
    s.grid.extent_w0 = solved.grid.extent_w0 * w / (w + delta);  // same physical grid
    return normalized(analyzer_h(simulate_numeric(s)));
}

Field hygg_model_field(const WalkSpec& solved, HyggSource src) {
    if (src == HyggSource::Numeric) return normalized(analyzer_h(simulate_numeric(solved)));
    const auto semi = simulate_semianalytic(solved);
    return normalized(analyzer_h(render(semi.state, solved.beam.at(solved.output_plane()), solved.make_grid())));
}

Field lg_model_field(const std::map<int, cplx>& amp, const WalkSpec& walk) {
    PolarizedSuperposition s;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (const auto& [m, a] : amp) {
        s.L.push_back({r2 * a, ModeFamily::LG, 0.0, m, 0.0});
        s.R.push_back({r2 * a, ModeFamily::LG, 0.0, m, 0.0});
    }
    return normalized(render(s, walk.beam.at(walk.output_plane()), walk.make_grid()));
}

double basis_state_D(int m, const WalkSpec& walk, double delta, HyggSource src) {
    const auto sol = solve_coins(oam_target({{m, 1.0}}), walk);
    const Field e = experimental_field(sol.spec, delta);
    return efficiency_ratio(e, hygg_model_field(sol.spec, src), lg_model_field({{m, 1.0}}, walk));
}

WaistFit fit_waist(const WalkSpec& walk, double delta, const std::vector<double>& targets, double lo, double hi,
                   int iters, HyggSource src) {
    const int ms[3] = {1, 3, 5};
    auto eval = [&](double w, std::vector<double>* D) {
        WalkSpec s = walk;
        s.beam.w0 = w;
        double c = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double d = basis_state_D(ms[i], s, delta, src);
            if (D) D->push_back(d);
            const double l = std::log(d / targets[i]);
            c += l * l;
        }
        return c;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(x1, nullptr), f2 = eval(x2, nullptr);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = eval(x1, nullptr);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = eval(x2, nullptr);
        }
    }
    WaistFit fit;
    fit.w0 = f1 < f2 ? x1 : x2;
    fit.cost = eval(fit.w0, &fit.D);
    return fit;
}

std::vector<TableRow> measure_table(const TableConfig& cfg, const std::vector<TargetState>& targets) {
    const WalkSpec& walk = cfg.walk;
    const auto& ms = walker_ms();
    // model basis fields |m>
    std::vector<Field> lg_basis, hy_basis;
    for (int m : ms) {
        lg_basis.push_back(lg_model_field({{m, 1.0}}, walk));
        hy_basis.push_back(hygg_model_field(solve_coins(oam_target({{m, 1.0}}), walk).spec, cfg.hygg_source));
    }
    const bool holo = cfg.method == Method::Holographic;
    auto embed = [&](const Field& f) { return holo ? resample_centre(f, cfg.holo_n) : f; };
    if (holo) {
        for (auto& f : lg_basis) f = embed(f);
        for (auto& f : hy_basis) f = embed(f);
    }
    MeasureSpec mspec;
    mspec.method = cfg.method;
    mspec.fiber_waist = cfg.fiber_waist;
    mspec.focal_length = cfg.focal_length;
    mspec.grating_period = cfg.grating_period_px * walk.make_grid().dx();

    std::vector<TableRow> rows;
    for (const auto& t : targets) {
        const auto sol = solve_coins(oam_target(t.amp), walk);
        const Field ex = experimental_field(sol.spec, cfg.delta);
        const Field hy = hygg_model_field(sol.spec, cfg.hygg_source);
        const Field lg = lg_model_field(t.amp, walk);
        TableRow r;
        r.label = t.label;
        r.D = efficiency_ratio(ex, hy, lg);
        const Field exE = embed(ex);
        const BasisSet bl = complete_basis(embed(lg), lg_basis);
        const BasisSet bh = complete_basis(embed(hy), hy_basis);
        const auto el = basis_etas(exE, bl, mspec);
        const auto eh = basis_etas(exE, bh, mspec);
        r.eta_LG = el[0];
        r.eta_HyGG = eh[0];
        r.F_LG = el[0] / std::accumulate(el.begin(), el.end(), 0.0);
        r.F_HyGG = eh[0] / std::accumulate(eh.begin(), eh.end(), 0.0);
        r.ratio = r.eta_HyGG / r.eta_LG;
        rows.push_back(r);
    }
    return rows;
}

std::string format_table(const std::vector<TableRow>& rows, const std::map<std::string, double>& reference_D) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "state,F_LG,F_HyGG,eta_LG,eta_HyGG,ratio,D";
    if (!reference_D.empty()) os << ",D_table";
    os << "\n";
    TableRow avg;
    for (const auto& r : rows) {
        os << r.label << "," << r.F_LG << "," << r.F_HyGG << "," << r.eta_LG << "," << r.eta_HyGG << "," << r.ratio
           << "," << r.D;
        if (!reference_D.empty()) {
            auto it = reference_D.find(r.label);
            os << ",";
            if (it != reference_D.end()) os << it->second;
        }
        os << "\n";
        avg.F_LG += r.F_LG / rows.size();
        avg.F_HyGG += r.F_HyGG / rows.size();
        avg.eta_LG += r.eta_LG / rows.size();
        avg.eta_HyGG += r.eta_HyGG / rows.size();
        avg.ratio += r.ratio / rows.size();
        avg.D += r.D / rows.size();
    }
    os << "average," << avg.F_LG << "," << avg.F_HyGG << "," << avg.eta_LG << "," << avg.eta_HyGG << "," << avg.ratio
       << "," << avg.D;
    if (!reference_D.empty()) os << ",";
    os << "\n";
    return os.str();
}

}  // namespace oamsim
