#pragma once

#include "oamsim/cascade.hpp"
#include "oamsim/holography.hpp"
#include "oamsim/imaging.hpp"

#include <cstdint>
#include <string>

namespace oamsim {

// WalkSpec text format (YAML). Angles in degrees, lengths in millimetres.
//
//   beam: {w0_mm: 0.22, wavelength_mm: 0.000808}
//   grid: {n: 512, extent_w0: 24}
//   input_polarization: H          # H V D A L R, or [l_re, l_im, r_re, r_im]
//   steps:
//     - {qwp1_deg: 0, hwp_deg: 0, qwp2_deg: 0, gap_mm: 50,
//        qplate: {q: 0.5, delta_deg: 180, alpha0_deg: 0}}
//
// Missing keys take the defaults of default_walk(). Errors are ConfigError naming the key.
WalkSpec parse_walk(const std::string& yaml_text);
WalkSpec load_walk(const std::string& path);
std::string dump_walk(const WalkSpec& s);

struct RunConfig {
    WalkSpec walk = default_walk();
    std::string walk_path;   // optional file the walk was read from
    std::string out_dir = "out";
    uint64_t seed = 1;
    TargetModel model = TargetModel::HyGG;
    // simulate
    int k_trunc = 3;
    // measure / hologram
    TableConfig table{};
    std::vector<TargetState> targets = benchmark_targets();
    // dataset
    DatasetOptions dataset{};
};

// RunConfig file (YAML):
//   walk: path/to/walk.yaml   (relative to the config file) or an inline walk mapping
//   beam / grid: override the walk's values
//   out: dir, seed: N, model: lg|hygg, k_trunc: 3
//   measure: {delta_mm, hologram_n, grating_period_px, fiber_waist_mm, focal_length_mm,
//             method: holographic|ideal, hygg_source: numeric|semianalytic}
//   dataset: {model, per_class, image_size, view_w0, pseudo_grid_n,
//             wp_error_deg, center_jitter_mm, intensity_noise, waist_error_mm}
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& yaml_text, const std::string& base_dir = ".");

}  // namespace oamsim
