#pragma once

#include "oamsim/cascade.hpp"
#include "oamsim/field.hpp"
#include "oamsim/modes.hpp"

#include <map>
#include <string>
#include <vector>

namespace oamsim {

struct Hologram {
    int n = 0;
    double extent = 0.0;
    double wavelength = 0.0;
    std::vector<double> phase;  // [0, 2pi), row-major
    double grating_period = 0.0;
    TargetModel model_tag = TargetModel::HyGG;
    PolarizedSuperposition target;        // symbolic description, may be empty
    std::vector<cplx> target_scalar;      // normalised H-component used for the encoding
    double focal_length = 0.5;            // Fourier lens in front of the fiber
};

// Amplitude-and-phase encoding of conj(target) into the +1 order of a blazed grating:
// phase = M(A) * mod(-arg t - pi M(A) + 2 pi x / period, 2 pi), sinc(pi (M - 1)) = A.
Hologram generate_hologram(const Field& target, double grating_period, TargetModel tag = TargetModel::HyGG,
                           const PolarizedSuperposition& desc = {});

// sinc-inversion amplitude map, A in [0, 1] -> M in [0, 1]
double hologram_modulation(double A);

enum class Method { Ideal, Holographic };

struct MeasurementResult {
    cplx overlap{0.0, 0.0};
    double eta = 0.0;
    Method method = Method::Ideal;
};

// eta = |<t|in>|^2 with both fields normalised
MeasurementResult measure_ideal(const Field& input, const Field& target_model);

// Hologram readout: H-component of input times exp(i phase), lens to the focal plane,
// first-order window, Gaussian fiber mode at the order centre. eta is referenced to the
// coupling obtained when the hologram's own target is the input.
MeasurementResult measure_holographic(const Field& input, const Hologram& h, double fiber_waist);

struct BasisSet {
    std::vector<Field> elements;  // orthonormal
    int target_index = 0;
};

// Gram-Schmidt over {target} + candidates (ordered by increasing overlap with target), keeps dim elements.
BasisSet complete_basis(const Field& target, const std::vector<Field>& candidates, int dim = 6);
double gram_deviation(const BasisSet& b);

struct MeasureSpec {
    Method method = Method::Ideal;
    double grating_period = 0.0;  // holographic only
    double fiber_waist = 2.5e-6;
    double focal_length = 0.5;
};

double fidelity_on_basis(const Field& input, const BasisSet& basis, const MeasureSpec& ms = {});
// detailed version: per-element eta
std::vector<double> basis_etas(const Field& input, const BasisSet& basis, const MeasureSpec& ms);

double efficiency_ratio(const Field& input, const Field& hygg_model, const Field& lg_model);

// ---------------------------------------------------------------- tables

struct TargetState {
    std::string label;
    std::map<int, cplx> amp;  // OAM amplitudes, H polarised
};

// 6 computational states, 4 (|-5> + e^{i beta}|5>)/sqrt2, 4 QFT_k
std::vector<TargetState> benchmark_targets();

enum class HyggSource { Numeric, Semianalytic };

struct TableConfig {
    WalkSpec walk = default_walk();   // beam.w0 = hologram waist
    double delta = 0.062e-3;          // experimental waist offset
    int holo_n = 1024;                // embedding grid for holograms
    int grating_period_px = 8;
    double fiber_waist = 2.5e-6;
    double focal_length = 0.5;
    Method method = Method::Holographic;
    HyggSource hygg_source = HyggSource::Numeric;
};

struct TableRow {
    std::string label;
    double F_LG = 0, F_HyGG = 0, eta_LG = 0, eta_HyGG = 0, ratio = 0, D = 0;
};

std::vector<TableRow> measure_table(const TableConfig& cfg, const std::vector<TargetState>& targets);
std::string format_table(const std::vector<TableRow>& rows, const std::map<std::string, double>& reference_D = {});

// Field models used by measure_table (H-analysed, normalised, on the walk grid)
Field experimental_field(const WalkSpec& solved, double delta);
Field hygg_model_field(const WalkSpec& solved, HyggSource src);
Field lg_model_field(const std::map<int, cplx>& amp, const WalkSpec& walk);

// D for a single OAM target at waist w0 (solves coins, numeric fields)
double basis_state_D(int m, const WalkSpec& walk, double delta, HyggSource src = HyggSource::Numeric);

struct WaistFit {
    double w0 = 0.0;
    std::vector<double> D;  // |1>, |3>, |5>
    double cost = 0.0;
};
// Single global w0 minimising sum (log D/D_ref)^2 over |1>, |3>, |5>
WaistFit fit_waist(const WalkSpec& walk, double delta, const std::vector<double>& targets, double lo, double hi,
                   int iters = 14, HyggSource src = HyggSource::Numeric);

void write_hologram_png(const Hologram& h, const std::string& path);

}  // namespace oamsim
