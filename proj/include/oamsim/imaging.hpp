#pragma once

#include "oamsim/cascade.hpp"
#include "oamsim/field.hpp"
#include "oamsim/png_io.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oamsim {

// S3 = +1 for left-circular light.
struct StokesImage {
    int n = 0;
    std::vector<double> s1, s2, s3, intensity;
};

struct Projections {
    std::vector<double> H, V, D, A, L, R;
};

Projections polarization_projections(const Field& f);
StokesImage stokes_from_projections(const Projections& p, int n, double floor_rel = 1e-3);
StokesImage stokes_from_field(const Field& f, double floor_rel = 1e-3);

// channel_i = round(255 (S_i + 1)/2 * I/I_max)
Image8 rgb_encode(const StokesImage& s);
// inverse map for pixels with known gate I/I_max (pixels with gate 0 decode to S = 0)
StokesImage rgb_decode(const Image8& img, const std::vector<double>& gate);

// dominant angular harmonic of S1 on the peak-intensity ring
int azimuthal_period(const StokesImage& s, int hmax = 16);

struct PerturbationSpec {
    double wp_angle_max = 0.0;     // rad, uniform in [-max, max] per waveplate
    double center_jitter = 0.0;    // m, uniform per axis
    double intensity_noise = 0.0;  // relative to I_max, additive gaussian on each projection
    double waist_error = 0.0;      // m, added to w0
};

void check_perturbation(const PerturbationSpec& p);
PerturbationSpec pseudo_experimental_defaults();

enum class DatasetModel { LG, HyGG, PseudoExperimental };
std::string model_name(DatasetModel m);
DatasetModel parse_model(const std::string& s);

struct DatasetOptions {
    DatasetModel model = DatasetModel::HyGG;
    int per_class = 400;
    PerturbationSpec pert{};
    uint64_t seed = 1;
    std::string out_dir;
    int image_size = 128;
    double view_w0 = 12.0;       // image side in units of w0
    WalkSpec walk = default_walk();
    int pseudo_grid_n = 256;     // numeric grid for the pseudo-experimental corpus
    double pseudo_extent_w0 = 24.0;
};

struct DatasetEntry {
    std::string file;
    int label = 0;
    int m1 = 0, m2 = 0;
    double beta = 0.0;
};

struct DatasetManifest {
    std::vector<std::pair<int, int>> classes;
    int per_class = 0;
    std::string model_tag;
    int image_size = 0;
    uint64_t seed = 0;
    PerturbationSpec pert{};
    std::vector<DatasetEntry> files;
};

// the 15 unordered pairs of distinct m in {-5,-3,-1,1,3,5}
std::vector<std::pair<int, int>> dataset_classes();
std::string class_label(const std::pair<int, int>& c);

// Per-image RNG stream, independent of generation order
std::mt19937_64 image_rng(uint64_t seed, int cls, int index);
double draw_wp_error(std::mt19937_64& rng, double max);

// Render one image of class (m1, m2) with the given beta and RNG (perturbations).
Image8 render_vvb_image(const DatasetOptions& opt, int m1, int m2, double beta, std::mt19937_64& rng);

DatasetManifest generate_dataset(const DatasetOptions& opt);
std::string manifest_json(const DatasetManifest& m);

}  // namespace oamsim
