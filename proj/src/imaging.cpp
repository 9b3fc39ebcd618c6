#include "oamsim/imaging.hpp"
#include "oamsim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace oamsim {

using std::numbers::pi;

// ---------------------------------------------------------------- Stokes

Projections polarization_projections(const Field& f) {
    Projections p;
    const size_t N = f.size();
    for (auto* v : {&p.H, &p.V, &p.D, &p.A, &p.L, &p.R}) v->resize(N);
    const double r2 = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);
    for (size_t i = 0; i < N; ++i) {
        const cplx l = f.L[i], r = f.R[i];
        const cplx eh = r2 * (l + r);
        const cplx ev = r2 * I * (l - r);
        p.H[i] = std::norm(eh);
        p.V[i] = std::norm(ev);
        p.D[i] = std::norm(r2 * (eh + ev));
        p.A[i] = std::norm(r2 * (eh - ev));
        p.L[i] = std::norm(l);
        p.R[i] = std::norm(r);
    }
    return p;
}

StokesImage stokes_from_projections(const Projections& p, int n, double floor_rel) {
    StokesImage s;
    s.n = n;
    const size_t N = size_t(n) * n;
    s.s1.assign(N, 0.0);
    s.s2.assign(N, 0.0);
    s.s3.assign(N, 0.0);
    s.intensity.assign(N, 0.0);
    double imax = 0.0;
    for (size_t i = 0; i < N; ++i) {
        s.intensity[i] = std::max(0.0, p.H[i] + p.V[i]);
        imax = std::max(imax, s.intensity[i]);
    }
    const double floor = floor_rel * imax;
    auto ratio = [](double a, double b) {
        const double d = a + b;
        return d > 0 ? std::clamp((a - b) / d, -1.0, 1.0) : 0.0;
    };
    for (size_t i = 0; i < N; ++i) {
        if (s.intensity[i] <= floor || imax == 0.0) continue;
        s.s1[i] = ratio(p.H[i], p.V[i]);
        s.s2[i] = ratio(p.D[i], p.A[i]);
        s.s3[i] = ratio(p.L[i], p.R[i]);
    }
    return s;
}

StokesImage stokes_from_field(const Field& f, double floor_rel) {
    return stokes_from_projections(polarization_projections(f), f.n, floor_rel);
}

Image8 rgb_encode(const StokesImage& s) {
    Image8 img{s.n, s.n, 3, std::vector<uint8_t>(size_t(s.n) * s.n * 3)};
    const double imax = *std::max_element(s.intensity.begin(), s.intensity.end());
    for (size_t i = 0; i < s.intensity.size(); ++i) {
        const double g = imax > 0 ? s.intensity[i] / imax : 0.0;
        const double S[3] = {s.s1[i], s.s2[i], s.s3[i]};
        for (int c = 0; c < 3; ++c)
            img.data[3 * i + c] = static_cast<uint8_t>(std::clamp(std::lround(255.0 * (S[c] + 1.0) / 2.0 * g), 0L, 255L));
    }
    return img;
}

StokesImage rgb_decode(const Image8& img, const std::vector<double>& gate) {
    if (img.channels != 3 || img.width != img.height) throw DomainError("rgb_decode: square RGB image expected");
    StokesImage s;
    s.n = img.width;
    const size_t N = size_t(s.n) * s.n;
    if (gate.size() != N) throw DomainError("rgb_decode: gate size mismatch");
    s.s1.assign(N, 0.0);
    s.s2.assign(N, 0.0);
    s.s3.assign(N, 0.0);
    s.intensity = gate;
    for (size_t i = 0; i < N; ++i) {
        if (gate[i] <= 0) continue;
        double* S[3] = {&s.s1[i], &s.s2[i], &s.s3[i]};
        for (int c = 0; c < 3; ++c) *S[c] = std::clamp(2.0 * img.data[3 * i + c] / (255.0 * gate[i]) - 1.0, -1.0, 1.0);
    }
    return s;
}

int azimuthal_period(const StokesImage& s, int hmax) {
    const int n = s.n;
    const double c = n / 2;
    // radial intensity profile in 1-pixel bins
    const int nb = n / 2 - 1;
    std::vector<double> sum(nb, 0.0), cnt(nb, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int b = static_cast<int>(std::hypot(i - c, j - c) + 0.5);
            if (b < nb) {
                sum[b] += s.intensity[size_t(i) * n + j];
                cnt[b] += 1;
            }
        }
    int best = 0;
    double bv = 0.0;
    for (int b = 0; b < nb; ++b) {
        const double v = cnt[b] > 0 ? sum[b] / cnt[b] : 0.0;
        if (v > bv) {
            bv = v;
            best = b;
        }
    }
    if (best < 2 || bv <= 0.0) throw DomainError("azimuthal_period: no intensity ring found");
    const int nphi = 720;
    std::vector<double> ring(nphi);
    for (int t = 0; t < nphi; ++t) {
        const double phi = 2.0 * pi * t / nphi;
        const double y = c + best * std::sin(phi), x = c + best * std::cos(phi);
        const int i0 = static_cast<int>(std::floor(y)), j0 = static_cast<int>(std::floor(x));
        const double ty = y - i0, tx = x - j0;
        auto at = [&](int i, int j) { return s.s1[size_t(i) * n + j]; };
        ring[t] = (1 - ty) * ((1 - tx) * at(i0, j0) + tx * at(i0, j0 + 1)) +
                  ty * ((1 - tx) * at(i0 + 1, j0) + tx * at(i0 + 1, j0 + 1));
    }
    int hbest = 0;
    double pbest = -1.0;
    for (int h = 1; h <= hmax; ++h) {
        cplx a = 0.0;
        for (int t = 0; t < nphi; ++t) a += ring[t] * std::polar(1.0, -2.0 * pi * h * t / nphi);
        if (std::norm(a) > pbest) {
            pbest = std::norm(a);
            hbest = h;
        }
    }
    return hbest;
}

// ---------------------------------------------------------------- datasets

void check_perturbation(const PerturbationSpec& p) {
    if (p.wp_angle_max < 0 || p.center_jitter < 0 || p.intensity_noise < 0 || p.waist_error < 0)
        throw ConfigError("perturbation parameters must be non-negative");
}

PerturbationSpec pseudo_experimental_defaults() {
    PerturbationSpec p;
    p.wp_angle_max = 3.0 * pi / 180.0;
    p.center_jitter = 0.1e-3;
    p.intensity_noise = 0.02;
    p.waist_error = 0.062e-3;
    return p;
}

std::string model_name(DatasetModel m) {
    switch (m) {
        case DatasetModel::LG: return "lg";
        case DatasetModel::HyGG: return "hygg";
        case DatasetModel::PseudoExperimental: return "pseudo-experimental";
    }
    return "?";
}

DatasetModel parse_model(const std::string& s) {
    if (s == "lg" || s == "LG") return DatasetModel::LG;
    if (s == "hygg" || s == "HyGG") return DatasetModel::HyGG;
    if (s == "pseudo-experimental" || s == "pseudo" || s == "exp") return DatasetModel::PseudoExperimental;
    throw ConfigError("unknown model '" + s + "' (lg, hygg, pseudo-experimental)");
}

std::vector<std::pair<int, int>> dataset_classes() {
    std::vector<std::pair<int, int>> c;
    const auto& ms = walker_ms();
    for (size_t i = 0; i < ms.size(); ++i)
        for (size_t j = i + 1; j < ms.size(); ++j) c.emplace_back(ms[i], ms[j]);
    return c;
}

std::string class_label(const std::pair<int, int>& c) {
    return "m" + std::to_string(c.first) + "_m" + std::to_string(c.second);
}

std::mt19937_64 image_rng(uint64_t seed, int cls, int index) {
    std::seed_seq sq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(cls), uint32_t(index)};
    return std::mt19937_64(sq);
}

double draw_wp_error(std::mt19937_64& rng, double max) {
    if (max <= 0) return 0.0;
    return std::uniform_real_distribution<double>(-max, max)(rng);
}

namespace {

// shared per-options state: model profiles and coin solutions
struct Renderer {
    const DatasetOptions& opt;
    Grid img;
    BeamParams out_beam;
    std::map<int, Field> profile;                 // E_m in the L slot
    std::map<std::pair<int, int>, WalkSpec> sol;  // beta = 0 solution per class

    explicit Renderer(const DatasetOptions& o) : opt(o) {
        img = Grid{o.image_size, o.view_w0 * o.walk.beam.w0};
        out_beam = o.walk.beam.at(o.walk.output_plane());
    }

    const Field& model_profile(int m) {
        auto it = profile.find(m);
        if (it != profile.end()) return it->second;
        PolarizedSuperposition s;
        s.L = model_mode(m, opt.model == DatasetModel::LG ? TargetModel::LG : TargetModel::HyGG, opt.walk);
        return profile.emplace(m, render(s, out_beam, img)).first->second;
    }

    const WalkSpec& solution(int m1, int m2) {
        auto key = std::make_pair(m1, m2);
        auto it = sol.find(key);
        if (it != sol.end()) return it->second;
        WalkerTarget t;
        const double r2 = 1.0 / std::sqrt(2.0);
        t.amp[m1][0] = r2;
        t.amp[m2][1] = r2;
        SolveOptions so;
        so.objective = Objective::Full;
        auto r = solve_coins(t, opt.walk, so);
        return sol.emplace(key, r.spec).first->second;
    }

    // coins for beta: last coin pre-multiplied by diag(e^{i beta/2}, e^{-i beta/2})
    WalkSpec coins_for(int m1, int m2, double beta) {
        WalkSpec s = solution(m1, m2);
        auto& last = s.steps.back();
        Jones c = coin_jones(last);
        const cplx a = std::polar(1.0, 0.5 * beta), b = std::polar(1.0, -0.5 * beta);
        for (int j = 0; j < 2; ++j) {
            c[0][j] *= a;
            c[1][j] *= b;
        }
        const auto ang = fit_coin(c);
        last.qwp1.angle = ang[0];
        last.hwp.angle = ang[1];
        last.qwp2.angle = ang[2];
        return s;
    }

    Field model_field(int m1, int m2, double beta, std::mt19937_64& rng) {
        Field f(img, out_beam.z, out_beam.wavelength);
        if (opt.pert.wp_angle_max <= 0.0) {
            const double r2 = 1.0 / std::sqrt(2.0);
            const Field& e1 = model_profile(m1);
            const Field& e2 = model_profile(m2);
            const cplx b = std::polar(r2, beta);
            for (size_t i = 0; i < f.size(); ++i) {
                f.L[i] = r2 * e1.L[i];
                f.R[i] = b * e2.L[i];
            }
            return f;
        }
        WalkSpec s = coins_for(m1, m2, beta);
        perturb_angles(s, rng);
        const WalkerState w = ideal_walk(s);
        for (int m = -w.mmax; m <= w.mmax; ++m) {
            const auto& a = w.at(m);
            if (std::norm(a[0]) + std::norm(a[1]) < 1e-14) continue;
            const Field& e = model_profile(m);
            for (size_t i = 0; i < f.size(); ++i) {
                f.L[i] += a[0] * e.L[i];
                f.R[i] += a[1] * e.L[i];
            }
        }
        return f;
    }

    void perturb_angles(WalkSpec& s, std::mt19937_64& rng) {
        for (auto& st : s.steps)
            for (auto* wp : {&st.qwp1, &st.hwp, &st.qwp2}) wp->angle += draw_wp_error(rng, opt.pert.wp_angle_max);
    }

    Field pseudo_field(int m1, int m2, double beta, std::mt19937_64& rng) {
        WalkSpec s = coins_for(m1, m2, beta);
        perturb_angles(s, rng);
        const double w = s.beam.w0;
        s.beam.w0 = w + opt.pert.waist_error;
        s.grid.n = opt.pseudo_grid_n;
        // keep the pitch equal to the image pitch
        s.grid.extent_w0 = img.dx() * opt.pseudo_grid_n / s.beam.w0;
        Field full = simulate_numeric(s);
        int sx = 0, sy = 0;
        if (opt.pert.center_jitter > 0) {
            std::uniform_real_distribution<double> J(-opt.pert.center_jitter, opt.pert.center_jitter);
            sx = static_cast<int>(std::lround(J(rng) / img.dx()));
            sy = static_cast<int>(std::lround(J(rng) / img.dx()));
        }
        Field f(img, full.z, full.wavelength);
        const int off = (full.n - img.n) / 2;
        for (int i = 0; i < img.n; ++i)
            for (int j = 0; j < img.n; ++j) {
                const int si = i + off - sy, sj = j + off - sx;
                if (si < 0 || sj < 0 || si >= full.n || sj >= full.n) continue;
                f.L[size_t(i) * img.n + j] = full.L[size_t(si) * full.n + sj];
                f.R[size_t(i) * img.n + j] = full.R[size_t(si) * full.n + sj];
            }
        return f;
    }

    Image8 image(int m1, int m2, double beta, std::mt19937_64& rng) {
        const Field f = opt.model == DatasetModel::PseudoExperimental ? pseudo_field(m1, m2, beta, rng)
                                                                       : model_field(m1, m2, beta, rng);
        Projections p = polarization_projections(f);
        if (opt.pert.intensity_noise > 0) {
            double imax = 0.0;
            for (size_t i = 0; i < p.H.size(); ++i) imax = std::max(imax, p.H[i] + p.V[i]);
            std::normal_distribution<double> N(0.0, opt.pert.intensity_noise * imax);
            for (auto* v : {&p.H, &p.V, &p.D, &p.A, &p.L, &p.R})
                for (auto& x : *v) x = std::max(0.0, x + N(rng));
        }
        return rgb_encode(stokes_from_projections(p, f.n));
    }
};

}  // namespace

Image8 render_vvb_image(const DatasetOptions& opt, int m1, int m2, double beta, std::mt19937_64& rng) {
    Renderer r(opt);
    return r.image(m1, m2, beta, rng);
}

DatasetManifest generate_dataset(const DatasetOptions& opt) {
    check_perturbation(opt.pert);
    check_walk(opt.walk);
    if (opt.per_class <= 0) throw ConfigError("per_class must be positive");
    if (opt.image_size < 64 || opt.image_size % 2) throw ConfigError("image_size must be even and >= 64");
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    DatasetManifest man;
    man.classes = dataset_classes();
    man.per_class = opt.per_class;
    man.model_tag = model_name(opt.model);
    man.image_size = opt.image_size;
    man.seed = opt.seed;
    man.pert = opt.pert;
    Renderer rend(opt);
    for (size_t c = 0; c < man.classes.size(); ++c) {
        const auto [m1, m2] = man.classes[c];
        for (int k = 0; k < opt.per_class; ++k) {
            auto rng = image_rng(opt.seed, int(c), k);
            const double beta = std::uniform_real_distribution<double>(0.0, 2.0 * pi)(rng);
            const Image8 img = rend.image(m1, m2, beta, rng);
            std::ostringstream name;
            name << class_label(man.classes[c]) << "_" << std::setw(4) << std::setfill('0') << k << ".png";
            write_png(img, (fs::path(opt.out_dir) / name.str()).string());
            man.files.push_back({name.str(), int(c), m1, m2, beta});
        }
    }
    if (man.files.size() != man.classes.size() * size_t(opt.per_class))
        throw Error("generate_dataset: file count mismatch");
    std::ofstream os(fs::path(opt.out_dir) / "manifest.json");
    if (!os) throw IoError("cannot write manifest in " + opt.out_dir);
    os << manifest_json(man);
    return man;
}

std::string manifest_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["schema"] = "oamsim-dataset/1";
    j["model"] = m.model_tag;
    j["image_size"] = m.image_size;
    j["per_class"] = m.per_class;
    j["seed"] = m.seed;
    j["theta"] = pi / 2;
    j["perturbation"] = {{"wp_angle_max_deg", m.pert.wp_angle_max * 180.0 / pi},
                         {"center_jitter_mm", m.pert.center_jitter * 1e3},
                         {"intensity_noise", m.pert.intensity_noise},
                         {"waist_error_mm", m.pert.waist_error * 1e3}};
    auto& cl = j["classes"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < m.classes.size(); ++i)
        cl.push_back({{"label", int(i)}, {"name", class_label(m.classes[i])}, {"m1", m.classes[i].first},
                      {"m2", m.classes[i].second}});
    auto& fl = j["files"] = nlohmann::ordered_json::array();
    for (const auto& e : m.files)
        fl.push_back({{"file", e.file}, {"label", e.label}, {"m1", e.m1}, {"m2", e.m2}, {"beta", e.beta}});
    return j.dump(1) + "\n";
}

}  // namespace oamsim
