#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rrl {

using cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n);

// In-place radix-2 transform, X_j = sum_k x_k exp(sign * 2 pi i j k / N), unscaled.
// N must be a power of two. OpenMP-parallel over butterflies; every output is
// produced by the same operation sequence regardless of thread count.
void fft_inplace(std::vector<cplx>& x, int sign);

// Serial O(N^2) reference transform with long double accumulation.
std::vector<cplx> dft_reference(const std::vector<cplx>& x, int sign);

// Full linear convolution, length na + nb - 1 (0 if either is empty).
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b);
// Same, with long double transforms; the result is rounded once to double.
std::vector<double> fft_convolve_extended(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> direct_convolve_raw(const std::vector<double>& a, const std::vector<double>& b);

// Bound on max |computed - exact| for fft_convolve.
double fft_convolve_error_bound(double norm2_a, double norm2_b, std::size_t n_transform);
// Bound on max |computed - exact| for fft_convolve_extended, before the final
// rounding to double (which adds eps/2 relative per entry).
double fft_convolve_extended_error_bound(double norm2_a, double norm2_b, std::size_t n_transform);
// Bound on the l2 norm of (computed - exact) for fft_convolve_extended over
// the full output, before the final rounding to double.
double fft_convolve_extended_l2_error_bound(double norm1_a, double norm2_a, double norm1_b, double norm2_b,
                                            std::size_t n_transform);
// Bound on max |computed - exact| for one unscaled transform of a vector with the given 2-norm.
double fft_error_bound(double norm2_x, std::size_t n_transform);

double norm2(const std::vector<double>& v);
double norm1(const std::vector<double>& v);

// Honors RRL_THREADS if set; returns the thread count in effect.
int configure_threads_from_env();

}  // namespace rrl
