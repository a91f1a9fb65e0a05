#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bandana::dsp {

/// Forward real FFT (n/2 + 1 bins, unnormalized).
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// Inverse of rfft for an n-point signal, normalized by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

}  // namespace bandana::dsp
