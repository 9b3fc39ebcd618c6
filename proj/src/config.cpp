#include "oamsim/config.hpp"
#include "oamsim/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace oamsim {

using std::numbers::pi;

namespace {

constexpr double kDeg = pi / 180.0;
constexpr double kMm = 1e-3;

template <typename T>
T get(const YAML::Node& n, const std::string& key, T fallback, const std::string& path) {
    const YAML::Node v = n[key];
    if (!v) return fallback;
    try {
        return v.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path + key + ": invalid value");
    }
}

void require_map(const YAML::Node& n, const std::string& path) {
    if (n && !n.IsMap()) throw ConfigError(path + ": expected a mapping");
}

void reject_unknown(const YAML::Node& n, std::initializer_list<const char*> keys, const std::string& path) {
    for (const auto& kv : n) {
        const auto k = kv.first.as<std::string>();
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            throw ConfigError(path + k + ": unknown key");
    }
}

std::array<cplx, 2> parse_pol(const YAML::Node& n) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const cplx I(0, 1);
    if (n.IsScalar()) {
        const auto s = n.as<std::string>();
        if (s == "H") return {r2, r2};
        if (s == "V") return {-I * r2, I * r2};
        if (s == "D") return {cplx(0.5, -0.5), cplx(0.5, 0.5)};
        if (s == "A") return {cplx(0.5, 0.5), cplx(0.5, -0.5)};
        if (s == "L") return {1.0, 0.0};
        if (s == "R") return {0.0, 1.0};
        throw ConfigError("input_polarization: unknown state '" + s + "'");
    }
    if (n.IsSequence() && n.size() == 4) {
        try {
            std::array<cplx, 2> p{cplx(n[0].as<double>(), n[1].as<double>()), cplx(n[2].as<double>(), n[3].as<double>())};
            const double nn = std::sqrt(std::norm(p[0]) + std::norm(p[1]));
            if (nn == 0) throw ConfigError("input_polarization: zero vector");
            p[0] /= nn;
            p[1] /= nn;
            return p;
        } catch (const YAML::Exception&) {
        }
    }
    throw ConfigError("input_polarization: expected H/V/D/A/L/R or [l_re, l_im, r_re, r_im]");
}

void apply_beam_grid(const YAML::Node& root, WalkSpec& s) {
    if (auto b = root["beam"]) {
        require_map(b, "beam");
        reject_unknown(b, {"w0_mm", "wavelength_mm"}, "beam.");
        s.beam.w0 = get(b, "w0_mm", s.beam.w0 / kMm, "beam.") * kMm;
        s.beam.wavelength = get(b, "wavelength_mm", s.beam.wavelength / kMm, "beam.") * kMm;
    }
    if (auto g = root["grid"]) {
        require_map(g, "grid");
        reject_unknown(g, {"n", "extent_w0"}, "grid.");
        s.grid.n = get(g, "n", s.grid.n, "grid.");
        s.grid.extent_w0 = get(g, "extent_w0", s.grid.extent_w0, "grid.");
    }
}

WalkSpec walk_from_node(const YAML::Node& root) {
    if (!root.IsMap()) throw ConfigError("walk: expected a mapping");
    reject_unknown(root, {"beam", "grid", "input_polarization", "steps"}, "");
    WalkSpec s = default_walk();
    apply_beam_grid(root, s);
    if (auto p = root["input_polarization"]) s.input_polarization = parse_pol(p);
    if (auto st = root["steps"]) {
        if (!st.IsSequence() || st.size() == 0) throw ConfigError("steps: expected a non-empty list");
        s.steps.assign(st.size(), StepConfig{});
        for (size_t i = 0; i < st.size(); ++i) {
            const std::string path = "steps[" + std::to_string(i) + "].";
            const YAML::Node n = st[i];
            require_map(n, path.substr(0, path.size() - 1));
            reject_unknown(n, {"qwp1_deg", "hwp_deg", "qwp2_deg", "gap_mm", "qplate"}, path);
            auto& c = s.steps[i];
            c.qwp1.angle = get(n, "qwp1_deg", 0.0, path) * kDeg;
            c.hwp.angle = get(n, "hwp_deg", 0.0, path) * kDeg;
            c.qwp2.angle = get(n, "qwp2_deg", 0.0, path) * kDeg;
            c.gap = get(n, "gap_mm", 50.0, path) * kMm;
            if (auto q = n["qplate"]) {
                require_map(q, path + "qplate");
                reject_unknown(q, {"q", "delta_deg", "alpha0_deg"}, path + "qplate.");
                c.qplate.q = get(q, "q", 0.5, path + "qplate.");
                c.qplate.delta = get(q, "delta_deg", 180.0, path + "qplate.") * kDeg;
                c.qplate.alpha0 = get(q, "alpha0_deg", 0.0, path + "qplate.") * kDeg;
            }
        }
        const auto z = s.plate_positions();
        for (size_t i = 0; i < s.steps.size(); ++i) s.steps[i].qplate.z = z[i];
    }
    check_walk(s);
    return s;
}

YAML::Node parse_text(const std::string& text, const std::string& what) {
    try {
        return YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

WalkSpec parse_walk(const std::string& text) { return walk_from_node(parse_text(text, "walk")); }

WalkSpec load_walk(const std::string& path) { return parse_walk(slurp(path)); }

std::string dump_walk(const WalkSpec& s) {
    YAML::Emitter e;
    e.SetDoublePrecision(12);
    e << YAML::BeginMap;
    e << YAML::Key << "beam" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "w0_mm" << YAML::Value
      << s.beam.w0 / kMm << YAML::Key << "wavelength_mm" << YAML::Value << s.beam.wavelength / kMm << YAML::EndMap;
    e << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "n" << YAML::Value
      << s.grid.n << YAML::Key << "extent_w0" << YAML::Value << s.grid.extent_w0 << YAML::EndMap;
    e << YAML::Key << "input_polarization" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << s.input_polarization[0].real() << s.input_polarization[0].imag() << s.input_polarization[1].real()
      << s.input_polarization[1].imag() << YAML::EndSeq;
    e << YAML::Key << "steps" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : s.steps) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "qwp1_deg" << YAML::Value << c.qwp1.angle / kDeg;
        e << YAML::Key << "hwp_deg" << YAML::Value << c.hwp.angle / kDeg;
        e << YAML::Key << "qwp2_deg" << YAML::Value << c.qwp2.angle / kDeg;
        e << YAML::Key << "gap_mm" << YAML::Value << c.gap / kMm;
        e << YAML::Key << "qplate" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "q" << YAML::Value
          << c.qplate.q << YAML::Key << "delta_deg" << YAML::Value << c.qplate.delta / kDeg << YAML::Key
          << "alpha0_deg" << YAML::Value << c.qplate.alpha0 / kDeg << YAML::EndMap;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
    namespace fs = std::filesystem;
    const YAML::Node root = parse_text(text, "config");
    if (!root.IsMap()) throw ConfigError("config: expected a mapping at top level");
    reject_unknown(root, {"walk", "beam", "grid", "out", "seed", "model", "k_trunc", "measure", "dataset"}, "");
    RunConfig rc;
    if (auto w = root["walk"]) {
        if (w.IsScalar()) {
            fs::path p = w.as<std::string>();
            if (p.is_relative()) p = fs::path(base_dir) / p;
            if (!fs::exists(p)) throw ConfigError("walk: file not found: " + p.string());
            rc.walk_path = p.string();
            rc.walk = load_walk(p.string());
        } else {
            rc.walk = walk_from_node(w);
        }
    }
    apply_beam_grid(root, rc.walk);
    check_walk(rc.walk);
    rc.out_dir = get(root, "out", rc.out_dir, "");
    rc.seed = get<uint64_t>(root, "seed", rc.seed, "");
    const auto model = get<std::string>(root, "model", "hygg", "");
    if (model == "lg") rc.model = TargetModel::LG;
    else if (model == "hygg") rc.model = TargetModel::HyGG;
    else throw ConfigError("model: expected lg or hygg");
    rc.k_trunc = get(root, "k_trunc", rc.k_trunc, "");
    if (rc.k_trunc < 0) throw ConfigError("k_trunc: must be >= 0");

    rc.table.walk = rc.walk;
    if (auto m = root["measure"]) {
        require_map(m, "measure");
        reject_unknown(m, {"delta_mm", "hologram_n", "grating_period_px", "fiber_waist_mm", "focal_length_mm", "method",
                           "hygg_source"},
                       "measure.");
        auto& t = rc.table;
        t.delta = get(m, "delta_mm", t.delta / kMm, "measure.") * kMm;
        t.holo_n = get(m, "hologram_n", t.holo_n, "measure.");
        t.grating_period_px = get(m, "grating_period_px", t.grating_period_px, "measure.");
        t.fiber_waist = get(m, "fiber_waist_mm", t.fiber_waist / kMm, "measure.") * kMm;
        t.focal_length = get(m, "focal_length_mm", t.focal_length / kMm, "measure.") * kMm;
        const auto meth = get<std::string>(m, "method", "holographic", "measure.");
        if (meth == "holographic") t.method = Method::Holographic;
        else if (meth == "ideal") t.method = Method::Ideal;
        else throw ConfigError("measure.method: expected holographic or ideal");
        const auto src = get<std::string>(m, "hygg_source", "numeric", "measure.");
        if (src == "numeric") t.hygg_source = HyggSource::Numeric;
        else if (src == "semianalytic") t.hygg_source = HyggSource::Semianalytic;
        else throw ConfigError("measure.hygg_source: expected numeric or semianalytic");
        if (t.holo_n < rc.walk.grid.n || t.holo_n % 2) throw ConfigError("measure.hologram_n: must be even and >= grid.n");
        if (t.grating_period_px < 4) throw ConfigError("measure.grating_period_px: must be >= 4");
        if (!(t.fiber_waist > 0) || !(t.focal_length > 0) || t.delta < 0)
            throw ConfigError("measure: lengths must be positive");
    }
    auto& d = rc.dataset;
    d.walk = rc.walk;
    d.seed = rc.seed;
    d.out_dir = rc.out_dir;
    if (auto ds = root["dataset"]) {
        require_map(ds, "dataset");
        reject_unknown(ds, {"model", "per_class", "image_size", "view_w0", "pseudo_grid_n", "wp_error_deg",
                            "center_jitter_mm", "intensity_noise", "waist_error_mm"},
                       "dataset.");
        d.model = parse_model(get<std::string>(ds, "model", model_name(d.model), "dataset."));
        if (d.model == DatasetModel::PseudoExperimental) d.pert = pseudo_experimental_defaults();
        d.per_class = get(ds, "per_class", d.per_class, "dataset.");
        d.image_size = get(ds, "image_size", d.image_size, "dataset.");
        d.view_w0 = get(ds, "view_w0", d.view_w0, "dataset.");
        d.pseudo_grid_n = get(ds, "pseudo_grid_n", d.pseudo_grid_n, "dataset.");
        d.pert.wp_angle_max = get(ds, "wp_error_deg", d.pert.wp_angle_max / kDeg, "dataset.") * kDeg;
        d.pert.center_jitter = get(ds, "center_jitter_mm", d.pert.center_jitter / kMm, "dataset.") * kMm;
        d.pert.intensity_noise = get(ds, "intensity_noise", d.pert.intensity_noise, "dataset.");
        d.pert.waist_error = get(ds, "waist_error_mm", d.pert.waist_error / kMm, "dataset.") * kMm;
        check_perturbation(d.pert);
        if (d.per_class <= 0) throw ConfigError("dataset.per_class: must be positive");
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    namespace fs = std::filesystem;
    return parse_run_config(slurp(path), fs::path(path).parent_path().string().empty()
                                             ? std::string(".")
                                             : fs::path(path).parent_path().string());
}

}  // namespace oamsim
