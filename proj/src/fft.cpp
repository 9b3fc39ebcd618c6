#include "oamsim/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace oamsim {

namespace {

struct Plans {
    fftw_plan fwd;
    fftw_plan bwd;
    fftw_complex* buf;
};

std::mutex g_mu;

Plans& plans(int n) {
    static std::map<int, Plans> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto* buf = fftw_alloc_complex(size_t(n) * n);
    Plans p{fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE),
            fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE), buf};
    return cache.emplace(n, p).first->second;
}

}  // namespace

void fft2d(std::vector<std::complex<double>>& a, int n, bool forward) {
    // one shared buffer per size, so serialise
    std::lock_guard lk(g_mu);
    Plans& p = plans(n);
    const size_t bytes = size_t(n) * n * sizeof(fftw_complex);
    std::memcpy(p.buf, a.data(), bytes);
    fftw_execute(forward ? p.fwd : p.bwd);
    std::memcpy(a.data(), p.buf, bytes);
}

}  // namespace oamsim
