#include "oamsim/cascade.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/radial.hpp"
#include "oamsim/specfun.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace oamsim {

using std::numbers::pi;
namespace {
const cplx I(0.0, 1.0);

int shift_of(const QPlateConfig& qp) {
    const double s = 2.0 * qp.q;
    if (std::abs(s - std::round(s)) > 1e-12) throw DomainError("q-plate charge must be a half-integer");
    return static_cast<int>(std::lround(s));
}
}  // namespace

const std::vector<int>& walker_ms() {
    static const std::vector<int> ms{-5, -3, -1, 1, 3, 5};
    return ms;
}

std::vector<double> WalkSpec::plate_positions() const {
    std::vector<double> z;
    double acc = 0.0;
    for (const auto& st : steps) {
        z.push_back(acc);
        acc += st.gap;
    }
    return z;
}

double WalkSpec::output_plane() const {
    double acc = 0.0;
    for (const auto& st : steps) acc += st.gap;
    return acc;
}

WalkSpec default_walk(int nsteps) {
    WalkSpec s;
    s.steps.resize(nsteps);
    const auto z = s.plate_positions();
    for (int i = 0; i < nsteps; ++i) s.steps[i].qplate.z = z[i];
    return s;
}

void check_walk(const WalkSpec& s) {
    if (s.steps.empty()) throw ConfigError("walk has no steps");
    const double n2 = std::norm(s.input_polarization[0]) + std::norm(s.input_polarization[1]);
    if (std::abs(n2 - 1.0) > 1e-9) throw ConfigError("input_polarization must have unit norm");
    if (!(s.beam.w0 > 0) || !(s.beam.wavelength > 0)) throw ConfigError("beam w0 and wavelength must be positive");
    if (s.grid.n < 64 || s.grid.n % 2) throw ConfigError("grid n must be even and >= 64");
    if (!(s.grid.extent_w0 > 0)) throw ConfigError("grid extent must be positive");
    for (const auto& st : s.steps) {
        if (st.gap < 0) throw ConfigError("gap must be >= 0");
        if (st.qplate.delta < 0 || st.qplate.delta > pi + 1e-12) throw ConfigError("q-plate delta outside [0, pi]");
        shift_of(st.qplate);
    }
}

Jones coin_jones(const StepConfig& st) {
    return waveplate_jones(st.qwp2) * (waveplate_jones(st.hwp) * waveplate_jones(st.qwp1));
}

void set_angles(WalkSpec& s, const std::vector<double>& a) {
    if (a.size() != 3 * s.steps.size()) throw DomainError("set_angles: need 3 angles per step");
    for (size_t i = 0; i < s.steps.size(); ++i) {
        s.steps[i].qwp1.angle = a[3 * i];
        s.steps[i].hwp.angle = a[3 * i + 1];
        s.steps[i].qwp2.angle = a[3 * i + 2];
    }
}

std::vector<double> get_angles(const WalkSpec& s) {
    std::vector<double> a;
    for (const auto& st : s.steps) {
        a.push_back(st.qwp1.angle);
        a.push_back(st.hwp.angle);
        a.push_back(st.qwp2.angle);
    }
    return a;
}

// ---------------------------------------------------------------- thin-plate walk

WalkerState ideal_walk(const WalkSpec& s) {
    int mmax = 0;
    for (const auto& st : s.steps) mmax += std::abs(shift_of(st.qplate));
    WalkerState w{mmax, std::vector<std::array<cplx, 2>>(2 * mmax + 1, {cplx(0), cplx(0)})};
    w.at(0) = s.input_polarization;
    for (const auto& st : s.steps) {
        const Jones c = coin_jones(st);
        for (auto& a : w.amp) a = {c[0][0] * a[0] + c[0][1] * a[1], c[1][0] * a[0] + c[1][1] * a[1]};
        const int d = shift_of(st.qplate);
        const double cs = std::cos(0.5 * st.qplate.delta), sn = std::sin(0.5 * st.qplate.delta);
        const cplx toR = I * sn * std::polar(1.0, 2.0 * st.qplate.alpha0);
        const cplx toL = I * sn * std::polar(1.0, -2.0 * st.qplate.alpha0);
        WalkerState o{mmax, std::vector<std::array<cplx, 2>>(2 * mmax + 1, {cplx(0), cplx(0)})};
        for (int m = -mmax; m <= mmax; ++m) {
            const auto& a = w.at(m);
            o.at(m)[0] += cs * a[0];
            o.at(m)[1] += cs * a[1];
            if (std::abs(m + d) <= mmax) o.at(m + d)[1] += toR * a[0];
            if (std::abs(m - d) <= mmax) o.at(m - d)[0] += toL * a[1];
        }
        w = std::move(o);
    }
    return w;
}

WalkerTarget walker_target(const PolarizedSuperposition& s) {
    WalkerTarget t;
    for (const auto& term : s.L) t.amp[term.m][0] += term.coeff;
    for (const auto& term : s.R) t.amp[term.m][1] += term.coeff;
    return t;
}

WalkerTarget oam_target(const std::map<int, cplx>& a) {
    WalkerTarget t;
    const double s = 1.0 / std::sqrt(2.0);
    for (const auto& [m, v] : a) t.amp[m] = {s * v, s * v};
    return t;
}

namespace {

bool is_h_polarized(const WalkerTarget& t) {
    for (const auto& [m, v] : t.amp)
        if (std::abs(v[0] - v[1]) > 1e-12 * std::max(1.0, std::abs(v[0]))) return false;
    return true;
}

}  // namespace

double walk_fidelity(const WalkSpec& s, const WalkerTarget& t, Objective obj, double* prob) {
    const WalkerState w = ideal_walk(s);
    if (obj == Objective::Auto) obj = is_h_polarized(t) ? Objective::AnalyzerH : Objective::Full;
    const double r2 = 1.0 / std::sqrt(2.0);
    if (obj == Objective::AnalyzerH) {
        cplx ov = 0.0;
        double hh = 0.0, tt = 0.0;
        for (int m = -w.mmax; m <= w.mmax; ++m) {
            const cplx h = r2 * (w.at(m)[0] + w.at(m)[1]);
            hh += std::norm(h);
            auto it = t.amp.find(m);
            if (it != t.amp.end()) ov += std::conj(r2 * (it->second[0] + it->second[1])) * h;
        }
        for (const auto& [m, v] : t.amp) tt += 0.5 * std::norm(v[0] + v[1]);
        if (prob) *prob = hh;
        if (hh < 1e-300 || tt <= 0) return 0.0;
        return std::norm(ov) / (hh * tt);
    }
    cplx ov = 0.0;
    double tt = 0.0, ww = 0.0;
    for (const auto& [m, v] : t.amp) {
        tt += std::norm(v[0]) + std::norm(v[1]);
        if (std::abs(m) <= w.mmax) ov += std::conj(v[0]) * w.at(m)[0] + std::conj(v[1]) * w.at(m)[1];
    }
    for (const auto& a : w.amp) ww += std::norm(a[0]) + std::norm(a[1]);
    if (prob) *prob = 1.0;
    if (tt <= 0) return 0.0;
    return std::norm(ov) / (tt * ww);
}

namespace {

struct OptCtx {
    WalkSpec spec;
    const WalkerTarget* target;
    Objective obj;
};

double neg_fid(const gsl_vector* x, void* p) {
    auto* c = static_cast<OptCtx*>(p);
    std::vector<double> a(x->size);
    for (size_t i = 0; i < x->size; ++i) a[i] = gsl_vector_get(x, i);
    set_angles(c->spec, a);
    return -walk_fidelity(c->spec, *c->target, c->obj);
}

void neg_fid_grad(const gsl_vector* x, void* p, gsl_vector* g) {
    const double h = 1e-6;
    gsl_vector* y = gsl_vector_alloc(x->size);
    gsl_vector_memcpy(y, x);
    for (size_t i = 0; i < x->size; ++i) {
        const double x0 = gsl_vector_get(x, i);
        gsl_vector_set(y, i, x0 + h);
        const double fp = neg_fid(y, p);
        gsl_vector_set(y, i, x0 - h);
        const double fm = neg_fid(y, p);
        gsl_vector_set(y, i, x0);
        gsl_vector_set(g, i, (fp - fm) / (2 * h));
    }
    gsl_vector_free(y);
}

void neg_fid_fdf(const gsl_vector* x, void* p, double* f, gsl_vector* g) {
    *f = neg_fid(x, p);
    neg_fid_grad(x, p, g);
}

std::vector<double> local_opt(OptCtx& ctx, const std::vector<double>& x0, double& fbest) {
    const size_t n = x0.size();
    gsl_multimin_function_fdf fn{&neg_fid, &neg_fid_grad, &neg_fid_fdf, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    for (size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);
    gsl_multimin_fdfminimizer* m = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(m, &fn, x, 0.05, 0.1);
    for (int it = 0; it < 400; ++it) {
        if (gsl_multimin_fdfminimizer_iterate(m) != GSL_SUCCESS) break;
        if (gsl_multimin_test_gradient(m->gradient, 1e-9) == GSL_SUCCESS) break;
    }
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = gsl_vector_get(m->x, i);
    fbest = -m->f;
    gsl_multimin_fdfminimizer_free(m);
    gsl_vector_free(x);
    return out;
}

}  // namespace

SolveResult solve_coins(const WalkerTarget& target, const WalkSpec& templ, const SolveOptions& opt) {
    check_walk(templ);
    if (target.amp.empty()) throw DomainError("solve_coins: empty target");
    OptCtx ctx{templ, &target, opt.objective};
    if (ctx.obj == Objective::Auto) ctx.obj = is_h_polarized(target) ? Objective::AnalyzerH : Objective::Full;
    const size_t n = 3 * templ.steps.size();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, pi);
    std::vector<double> best;
    double fbest = -1.0, pbest = 0.0;
    for (int s = 0; s < std::max(1, opt.starts); ++s) {
        std::vector<double> x0(n, 0.0);
        if (s == 0 && opt.warm_start) x0 = *opt.warm_start;
        else if (s > 0 || opt.warm_start)
            for (auto& v : x0) v = U(rng);
        double f;
        auto x = local_opt(ctx, x0, f);
        WalkSpec tmp = templ;
        set_angles(tmp, x);
        double p = 0.0;
        f = walk_fidelity(tmp, target, ctx.obj, &p);
        // tie-break near-equal fidelities on analyzer transmission
        if (f > fbest + 1e-9 || (std::abs(f - fbest) <= 1e-9 && p > pbest)) {
            fbest = f;
            pbest = p;
            best = x;
        }
    }
    for (auto& v : best) v = std::fmod(std::fmod(v, pi) + pi, pi);  // waveplates are pi-periodic
    SolveResult r;
    r.spec = templ;
    set_angles(r.spec, best);
    r.fidelity = walk_fidelity(r.spec, target, ctx.obj, &r.probability);
    r.converged = r.fidelity >= 0.95;
    return r;
}

SolveResult solve_coins(const PolarizedSuperposition& target, const WalkSpec& templ, const SolveOptions& opt) {
    return solve_coins(walker_target(target), templ, opt);
}

namespace {

struct CoinCtx {
    Jones target;
};

double coin_misfit(const gsl_vector* x, void* p) {
    const auto* c = static_cast<CoinCtx*>(p);
    StepConfig st;
    st.qwp1.angle = gsl_vector_get(x, 0);
    st.hwp.angle = gsl_vector_get(x, 1);
    st.qwp2.angle = gsl_vector_get(x, 2);
    const Jones j = coin_jones(st);
    cplx tr = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) tr += std::conj(j[a][b]) * c->target[a][b];
    return -std::norm(tr) / 4.0;
}

}  // namespace

std::array<double, 3> fit_coin(const Jones& target, double* quality, uint64_t seed) {
    CoinCtx ctx{target};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, pi);
    gsl_multimin_function fn{&coin_misfit, 3, &ctx};
    std::array<double, 3> best{};
    double fbest = 1.0;
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    for (int s = 0; s < 12 && fbest > -1.0 + 1e-13; ++s) {
        for (int i = 0; i < 3; ++i) gsl_vector_set(x, i, U(rng));
        gsl_vector_set_all(step, 0.3);
        auto* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
        gsl_multimin_fminimizer_set(m, &fn, x, step);
        for (int it = 0; it < 2000; ++it) {
            if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
            if (gsl_multimin_fminimizer_size(m) < 1e-10) break;
        }
        if (m->fval < fbest) {
            fbest = m->fval;
            for (int i = 0; i < 3; ++i) best[i] = std::fmod(std::fmod(gsl_vector_get(m->x, i), pi) + pi, pi);
        }
        gsl_multimin_fminimizer_free(m);
    }
    gsl_vector_free(x);
    gsl_vector_free(step);
    if (quality) *quality = -fbest;
    return best;
}

// ---------------------------------------------------------------- numeric

Field simulate_numeric(const WalkSpec& s) {
    check_walk(s);
    const Grid g = s.make_grid();
    PolarizedSuperposition in;
    in.L.push_back({s.input_polarization[0], ModeFamily::LG, 0, 0, 0});
    in.R.push_back({s.input_polarization[1], ModeFamily::LG, 0, 0, 0});
    Field f = render(in, s.beam.at(0.0), g);
    const auto z = s.plate_positions();
    for (size_t i = 0; i < s.steps.size(); ++i) {
        const auto& st = s.steps[i];
        f = jones_transform(f, coin_jones(st));
        QPlateConfig qp = st.qplate;
        qp.z = z[i];
        f.z = z[i];
        f = qplate_transform(f, qp);
        if (st.gap > 0) f = fresnel_fft(f, st.gap);
    }
    return f;
}

// ---------------------------------------------------------------- modal machinery

namespace {

using Vec = Eigen::VectorXcd;
using Key = std::pair<int, int>;  // (pol 0=L 1=R, m)

double gouy_phase(int k, int m, double psi) { return (2.0 * k + std::abs(m) + 1.0) * psi; }

// LG coefficients (K) for m_out produced by multiplying a K_in-vector of m_in at plane z by exp(i(m_out-m_in)phi)
Vec shift_map(const Vec& v, int m_in, int m_out, double psi, int K) {
    const int Kin = static_cast<int>(v.size());
    const auto& Q = radial::overlap_matrix(std::abs(m_in), std::abs(m_out), std::max(K, Kin));
    const int KQ = std::max(K, Kin);
    Vec a(Kin);
    for (int k = 0; k < Kin; ++k) a[k] = v[k] * std::polar(1.0, gouy_phase(k, m_in, psi));
    Vec o = Vec::Zero(K);
    for (int ko = 0; ko < K; ++ko) {
        cplx s = 0.0;
        for (int k = 0; k < Kin; ++k) s += Q[size_t(ko) * KQ + k] * a[k];
        o[ko] = s * std::polar(1.0, -gouy_phase(ko, m_out, psi));
    }
    return o;
}

using State = std::map<Key, Vec>;

void add_to(State& st, Key k, const Vec& v) {
    auto it = st.find(k);
    if (it == st.end()) st.emplace(k, v);
    else {
        const auto old = it->second.size();
        if (old < v.size()) {
            it->second.conservativeResize(v.size());
            it->second.tail(v.size() - old).setZero();
        }
        it->second.head(v.size()) += v;
    }
}

// coin + q-plate on LG-coefficient state (vectors already truncated as desired)
State apply_step(const State& st, const StepConfig& step, double psi, int Kout) {
    const Jones c = coin_jones(step);
    std::set<int> ms;
    for (const auto& [k, v] : st) ms.insert(k.second);
    State mid;
    for (int m : ms) {
        auto itL = st.find({0, m}), itR = st.find({1, m});
        const int len = std::max(itL != st.end() ? int(itL->second.size()) : 0, itR != st.end() ? int(itR->second.size()) : 0);
        Vec l = Vec::Zero(len), r = Vec::Zero(len);
        if (itL != st.end()) l.head(itL->second.size()) = itL->second;
        if (itR != st.end()) r.head(itR->second.size()) = itR->second;
        mid[{0, m}] = c[0][0] * l + c[0][1] * r;
        mid[{1, m}] = c[1][0] * l + c[1][1] * r;
    }
    const int d = shift_of(step.qplate);
    const double cs = std::cos(0.5 * step.qplate.delta), sn = std::sin(0.5 * step.qplate.delta);
    const cplx toR = I * sn * std::polar(1.0, 2.0 * step.qplate.alpha0);
    const cplx toL = I * sn * std::polar(1.0, -2.0 * step.qplate.alpha0);
    State out;
    for (const auto& [k, v] : mid) {
        if (v.norm() == 0.0) continue;
        const int m = k.second;
        if (cs != 0.0) {
            Vec u = Vec::Zero(std::max<int>(Kout, v.size()));
            u.head(v.size()) = cs * v;
            add_to(out, k, u.head(Kout));
        }
        if (sn != 0.0) {
            if (k.first == 0) add_to(out, {1, m + d}, toR * shift_map(v, m, m + d, psi, Kout));
            else add_to(out, {0, m - d}, toL * shift_map(v, m, m - d, psi, Kout));
        }
    }
    return out;
}

}  // namespace

PolarizedSuperposition simulate_modal(const WalkSpec& s, int K) {
    check_walk(s);
    State st;
    st[{0, 0}] = Vec::Constant(1, s.input_polarization[0]);
    st[{1, 0}] = Vec::Constant(1, s.input_polarization[1]);
    const auto z = s.plate_positions();
    for (size_t i = 0; i < s.steps.size(); ++i) st = apply_step(st, s.steps[i], s.beam.gouy(z[i]), K);
    PolarizedSuperposition out;
    for (const auto& [k, v] : st)
        for (int j = 0; j < v.size(); ++j)
            if (v[j] != 0.0) (k.first == 0 ? out.L : out.R).push_back({v[j], ModeFamily::LG, double(j), k.second, 0.0});
    return out;
}

// ---------------------------------------------------------------- semi-analytic

double hygg_gram(double j1, double j2, int m) {
    const int a = std::abs(m);
    return std::exp(specfun::log_gamma(0.5 * (j1 + j2) + a + 1.0) -
                    0.5 * (specfun::log_gamma(j1 + a + 1.0) + specfun::log_gamma(j2 + a + 1.0)));
}

double gram_power(const PolarizedSuperposition& s) {
    double p = 0.0;
    for (const auto* list : {&s.L, &s.R}) {
        for (const auto& a : *list)
            for (const auto& b : *list) {
                if (a.m != b.m) continue;
                double g;
                if (a.family == ModeFamily::LG && b.family == ModeFamily::LG) g = (a.p == b.p) ? 1.0 : 0.0;
                else if (a.family == ModeFamily::HyGG && b.family == ModeFamily::HyGG && a.origin == b.origin)
                    g = hygg_gram(a.p, b.p, a.m);
                else
                    throw DomainError("gram_power: mixed families or origins");
                p += (std::conj(a.coeff) * b.coeff).real() * g;
            }
    }
    return p;
}

namespace {

std::vector<double> span_for(int m, const SemiOptions& opt) {
    const int jmax = std::max(2 * opt.span - 1, 2 * opt.k_trunc + 1);
    std::vector<double> js;
    for (int j = -1; j <= jmax; j += 2)
        if (j >= -std::abs(m)) js.push_back(j);
    return js;
}

// K x J matrix whose columns are the LG coefficients of born HyGG_{j,m}
Eigen::MatrixXcd born_basis(const std::vector<double>& js, int m, double psi_b, int K) {
    Eigen::MatrixXcd B(K, js.size());
    for (size_t c = 0; c < js.size(); ++c) {
        const auto A = hygg_coefficients(js[c], m, K - 1);
        for (int k = 0; k < K; ++k) B(k, c) = A[k] * std::polar(1.0, -2.0 * k * psi_b);
    }
    return B;
}

}  // namespace

SemiResult simulate_semianalytic(const WalkSpec& s, const SemiOptions& opt) {
    check_walk(s);
    if (opt.k_trunc < 0) throw DomainError("k_trunc must be >= 0");
    for (const auto& st : s.steps)
        if (std::abs(st.qplate.delta - pi) > 1e-9) throw DomainError("semi-analytic path requires delta = pi");
    const int K = opt.K;
    const int kt1 = opt.k_trunc + 1;
    // HyGG coefficient state at the plane zb
    struct Branch {
        std::vector<double> js;
        Vec c;
    };
    std::map<Key, Branch> st;
    st[{0, 0}] = {{0.0}, Vec::Constant(1, s.input_polarization[0])};
    st[{1, 0}] = {{0.0}, Vec::Constant(1, s.input_polarization[1])};
    double psi_b = 0.0, zb = 0.0;
    SemiResult res;
    const auto z = s.plate_positions();
    for (size_t i = 0; i < s.steps.size(); ++i) {
        // expand into LG orders <= k_trunc
        State lg;
        double ttrunc = 0.0;
        for (const auto& [k, br] : st) {
            const Vec v = born_basis(br.js, k.second, psi_b, K) * br.c;
            double gp = 0.0;
            for (size_t a = 0; a < br.js.size(); ++a)
                for (size_t b = 0; b < br.js.size(); ++b)
                    gp += (std::conj(br.c[a]) * br.c[b]).real() * hygg_gram(br.js[a], br.js[b], k.second);
            const Vec head = v.head(std::min<int>(kt1, v.size()));
            ttrunc += gp - head.squaredNorm();
            lg[k] = head;
        }
        const double psi = s.beam.gouy(z[i]);
        double before = 0.0;
        for (const auto& [k, v] : lg) before += v.squaredNorm();
        const State full = apply_step(lg, s.steps[i], psi, K);
        // re-collect on HyGG born at this plate; whatever the span cannot hold
        // (least-squares residual, orders beyond K) shows up as lost Gram power
        psi_b = psi;
        zb = z[i];
        st.clear();
        double kept = 0.0;
        for (const auto& [k, v] : full) {
            if (v.norm() == 0.0) continue;
            auto js = span_for(k.second, opt);
            const auto B = born_basis(js, k.second, psi_b, K);
            Vec c = B.colPivHouseholderQr().solve(v);
            for (size_t a = 0; a < js.size(); ++a)
                for (size_t b = 0; b < js.size(); ++b)
                    kept += (std::conj(c[a]) * c[b]).real() * hygg_gram(js[a], js[b], k.second);
            st[k] = {std::move(js), std::move(c)};
        }
        const double trec = before - kept;
        res.truncation_tail.push_back(ttrunc);
        res.recollection_tail.push_back(trec);
    }
    for (const auto& [k, br] : st)
        for (size_t a = 0; a < br.js.size(); ++a)
            (k.first == 0 ? res.state.L : res.state.R).push_back({br.c[a], ModeFamily::HyGG, br.js[a], k.second, zb});
    for (double t : res.truncation_tail) res.total_tail += t;
    for (double t : res.recollection_tail) res.total_tail += t;
    res.gram_power = gram_power(res.state);
    return res;
}

// ---------------------------------------------------------------- targets

std::vector<ModeTerm> model_mode(int m, TargetModel model, const WalkSpec& templ) {
    if (model == TargetModel::LG) return {{1.0, ModeFamily::LG, 0.0, m, 0.0}};
    const auto sol = solve_coins(oam_target({{m, 1.0}}), templ);
    const auto semi = simulate_semianalytic(sol.spec);
    // H projection of the m component: (L + R)/sqrt2, combine equal (j, origin)
    std::map<std::pair<double, double>, cplx> acc;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (const auto* list : {&semi.state.L, &semi.state.R})
        for (const auto& t : *list)
            if (t.m == m) acc[{t.p, t.origin}] += r2 * t.coeff;
    std::vector<ModeTerm> terms;
    for (const auto& [key, c] : acc) terms.push_back({c, ModeFamily::HyGG, key.first, m, key.second});
    PolarizedSuperposition tmp;
    tmp.L = terms;
    const double p = gram_power(tmp);
    if (p <= 0) throw DomainError("model_mode: no power on m");
    for (auto& t : terms) t.coeff /= std::sqrt(p);
    return terms;
}

PolarizedSuperposition vvb_target(const VVBTarget& t, TargetModel model, const WalkSpec& templ) {
    if (t.m1 == t.m2) throw DomainError("vvb_target: m1 == m2");
    const auto& ms = walker_ms();
    if (std::find(ms.begin(), ms.end(), t.m1) == ms.end() || std::find(ms.begin(), ms.end(), t.m2) == ms.end())
        throw DomainError("vvb_target: m outside the walker set");
    PolarizedSuperposition s;
    const cplx a = std::cos(0.5 * t.theta), b = std::polar(std::sin(0.5 * t.theta), t.beta);
    for (auto term : model_mode(t.m1, model, templ)) {
        term.coeff *= a;
        if (term.coeff != 0.0) s.L.push_back(term);
    }
    for (auto term : model_mode(t.m2, model, templ)) {
        term.coeff *= b;
        if (term.coeff != 0.0) s.R.push_back(term);
    }
    s.normalized = model == TargetModel::LG;
    return s;
}

}  // namespace oamsim
