#include "tunnelwave/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace tw {

namespace {

// One persistent in-place buffer + plan pair per transform size. FFTW plans
// bind to the buffer they were created on, so execution copies through it.
struct PlanPair {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex mu;
    return mu;
}

// Caller must hold plan_mutex(); the buffer is shared per size.
PlanPair& plan_for(int n) {
    static std::map<int, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanPair pair;
    pair.buf = fftw_alloc_complex(static_cast<size_t>(n));
    pair.fwd = fftw_plan_dft_1d(n, pair.buf, pair.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    pair.bwd = fftw_plan_dft_1d(n, pair.buf, pair.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(n, pair).first->second;
}

void run(std::vector<std::complex<double>>& v, bool forward) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return;
    std::lock_guard<std::mutex> lock(plan_mutex());
    PlanPair& pair = plan_for(n);
    for (int i = 0; i < n; ++i) {
        pair.buf[i][0] = v[static_cast<size_t>(i)].real();
        pair.buf[i][1] = v[static_cast<size_t>(i)].imag();
    }
    fftw_execute(forward ? pair.fwd : pair.bwd);
    for (int i = 0; i < n; ++i) {
        v[static_cast<size_t>(i)] = {pair.buf[i][0], pair.buf[i][1]};
    }
}

} // namespace

void fft_forward(std::vector<std::complex<double>>& v) { run(v, true); }

void fft_backward(std::vector<std::complex<double>>& v) { run(v, false); }

double fft_wavenumber(int m, int n, double dx) {
    const int signed_bin = (m <= n / 2) ? m : m - n;
    return 2.0 * M_PI * signed_bin / (n * dx);
}

} // namespace tw
