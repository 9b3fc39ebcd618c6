#pragma once

#include "oamsim/field.hpp"
#include "oamsim/modes.hpp"
#include "oamsim/propagation.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace oamsim {

struct StepConfig {
    WaveplateConfig qwp1{3.14159265358979323846 / 2, 0.0};
    WaveplateConfig hwp{3.14159265358979323846, 0.0};
    WaveplateConfig qwp2{3.14159265358979323846 / 2, 0.0};
    QPlateConfig qplate{};
    double gap = 50e-3;  // free propagation after the q-plate
};

struct GridSpec {
    int n = 512;
    double extent_w0 = 24.0;  // side length in units of w0
};

struct WalkSpec {
    std::vector<StepConfig> steps;
    std::array<cplx, 2> input_polarization{cplx(1.0 / 1.4142135623730951), cplx(1.0 / 1.4142135623730951)};
    BeamParams beam{};
    GridSpec grid{};

    Grid make_grid() const { return {grid.n, grid.extent_w0 * beam.w0}; }
    // plane of each q-plate (first one at z = 0) and of the output
    std::vector<double> plate_positions() const;
    double output_plane() const;
};

// Five identity-coin steps, q = 1/2, delta = pi, 50 mm gaps, H input.
WalkSpec default_walk(int nsteps = 5);
void check_walk(const WalkSpec& s);
Jones coin_jones(const StepConfig& st);

// Set the 3 waveplate angles of every step from a flat list (rad).
void set_angles(WalkSpec& s, const std::vector<double>& angles);
std::vector<double> get_angles(const WalkSpec& s);

// Walker state in the thin-plate limit: amplitudes per (m, polarization).
struct WalkerState {
    int mmax = 0;
    std::vector<std::array<cplx, 2>> amp;  // index m + mmax, {L, R}
    std::array<cplx, 2>& at(int m) { return amp[m + mmax]; }
    const std::array<cplx, 2>& at(int m) const { return amp[m + mmax]; }
};

// q-plate law only (no diffraction).
WalkerState ideal_walk(const WalkSpec& s);

struct VVBTarget {
    double theta = 1.5707963267948966;
    double beta = 0.0;
    int m1 = -1;
    int m2 = 1;
};

enum class TargetModel { LG, HyGG };

// Walker-space description of a target (radial content ignored).
struct WalkerTarget {
    std::map<int, std::array<cplx, 2>> amp;  // m -> {L, R}
};

WalkerTarget walker_target(const PolarizedSuperposition& s);
// OAM state sum_m a_m |m> in H polarization
WalkerTarget oam_target(const std::map<int, cplx>& a);

enum class Objective { Auto, AnalyzerH, Full };

struct SolveOptions {
    int starts = 40;
    uint64_t seed = 1;
    Objective objective = Objective::Auto;
    const std::vector<double>* warm_start = nullptr;  // tried first when given
};

struct SolveResult {
    WalkSpec spec;
    double fidelity = 0.0;     // achieved overlap^2 (post-selected for AnalyzerH)
    double probability = 1.0;  // analyzer transmission
    bool converged = false;    // fidelity >= 0.95
};

double walk_fidelity(const WalkSpec& s, const WalkerTarget& t, Objective obj, double* prob = nullptr);

// Optimise the 15 waveplate angles. Template supplies beam, gaps, plates.
SolveResult solve_coins(const WalkerTarget& target, const WalkSpec& templ, const SolveOptions& opt = {});
SolveResult solve_coins(const PolarizedSuperposition& target, const WalkSpec& templ, const SolveOptions& opt = {});

// Waveplate angles (qwp1, hwp, qwp2) whose coin matches `target` up to a global phase.
// Returns |tr(C^H target)|^2 / 4 through `quality`.
std::array<double, 3> fit_coin(const Jones& target, double* quality = nullptr, uint64_t seed = 7);

// Ground truth: grid simulation of every element.
Field simulate_numeric(const WalkSpec& s);

// Untruncated modal simulation (LG orders 0..K-1 per branch), rendered at the output plane.
PolarizedSuperposition simulate_modal(const WalkSpec& s, int K = 100);

struct SemiOptions {
    int k_trunc = 3;
    int span = 4;  // re-collection basis HyGG_{2p-1,m}, p = 0..span (extended to 2 k_trunc + 1)
    int K = 100;   // LG orders used internally for projections
};

struct SemiResult {
    PolarizedSuperposition state;             // HyGG terms born at the last q-plate
    std::vector<double> truncation_tail;      // per step, power dropped by the LG truncation
    std::vector<double> recollection_tail;    // per step, residual outside the HyGG span
    double total_tail = 0.0;
    double gram_power = 0.0;                  // c^H G c of the output, = 1 - total_tail
};

SemiResult simulate_semianalytic(const WalkSpec& s, const SemiOptions& opt = {});

// <HyGG_{j,m}|HyGG_{j',m}> for modes born at the same plane
double hygg_gram(double j1, double j2, int m);
double gram_power(const PolarizedSuperposition& s);

// Model field E_m used by vvb_target. For HyGG: the H-projected m-component of the
// semi-analytic output when the walk is solved for |m>.
std::vector<ModeTerm> model_mode(int m, TargetModel model, const WalkSpec& templ);
PolarizedSuperposition vvb_target(const VVBTarget& t, TargetModel model, const WalkSpec& templ);

// Walker odd-m set used throughout: -5, -3, -1, 1, 3, 5
const std::vector<int>& walker_ms();

}  // namespace oamsim
