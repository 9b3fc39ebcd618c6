#include "oamsim/radial.hpp"
#include "oamsim/specfun.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>

namespace oamsim::radial {

void lg_profiles(int K, int a, double x, double* out) {
    if (K <= 0) return;
    // normalised recurrence, no factorial overflow
    const double lead = (a == 0 ? 1.0 : std::pow(x, 0.5 * a)) * std::exp(-0.5 * x - 0.5 * specfun::log_gamma(a + 1.0));
    double l0 = lead;
    out[0] = l0;
    if (K == 1) return;
    double l1 = (1.0 + a - x) * l0 / std::sqrt(1.0 + a);
    out[1] = l1;
    for (int k = 1; k + 1 < K; ++k) {
        const double l2 = ((2.0 * k + 1.0 + a - x) * l1 - std::sqrt(k * (k + double(a))) * l0) /
                          std::sqrt((k + 1.0) * (k + 1.0 + a));
        out[k + 1] = l2;
        l0 = l1;
        l1 = l2;
    }
}

namespace {

struct Cache {
    std::shared_mutex mu;
    std::map<std::tuple<int, int, int>, std::unique_ptr<std::vector<double>>> tab;
};

Cache& cache() {
    static Cache c;
    return c;
}

std::vector<double> compute(int a_in, int a_out, int K) {
    // x = s^2, s in [0, S]; u ~ exp(-x/2) so S^2 well beyond the outer lobe of k = K
    const double S = std::sqrt(4.0 * K + 2.0 * std::max(a_in, a_out) + 120.0);
    const int nodes = 400 + 12 * K;
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(nodes);
    std::vector<double> Q(size_t(K) * K, 0.0), ui(K), uo(K);
    for (int i = 0; i < nodes; ++i) {
        double s, w;
        gsl_integration_glfixed_point(0.0, S, i, &s, &w, t);
        const double x = s * s;
        lg_profiles(K, a_in, x, ui.data());
        lg_profiles(K, a_out, x, uo.data());
        const double jw = 2.0 * s * w;
        for (int ko = 0; ko < K; ++ko) {
            const double f = jw * uo[ko];
            double* row = &Q[size_t(ko) * K];
            for (int ki = 0; ki < K; ++ki) row[ki] += f * ui[ki];
        }
    }
    gsl_integration_glfixed_table_free(t);
    return Q;
}

}  // namespace

const std::vector<double>& overlap_matrix(int a_in, int a_out, int K) {
    auto& c = cache();
    const auto key = std::make_tuple(a_in, a_out, K);
    {
        std::shared_lock lk(c.mu);
        auto it = c.tab.find(key);
        if (it != c.tab.end()) return *it->second;
    }
    auto v = std::make_unique<std::vector<double>>(compute(a_in, a_out, K));
    std::unique_lock lk(c.mu);
    auto [it, inserted] = c.tab.emplace(key, std::move(v));
    return *it->second;
}

}  // namespace oamsim::radial
