#pragma once

#include <complex>
#include <vector>

namespace tw {

// Unnormalized DFT via FFTW (ESTIMATE plans for run-to-run determinism).
// forward: sum_j v_j e^{-2 pi i jk/n}; backward is its unnormalized inverse.
// Plans are cached per size and share a per-size buffer, so calls serialize.
void fft_forward(std::vector<std::complex<double>>& v);
void fft_backward(std::vector<std::complex<double>>& v);

// FFT wavenumber kappa_m = 2 pi m' / (n dx) with m' the signed bin index.
double fft_wavenumber(int m, int n, double dx);

} // namespace tw
