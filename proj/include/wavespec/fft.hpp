#pragma once

#include <complex>
#include <span>
#include <vector>

namespace wavespec::fft {

using cdouble = std::complex<double>;

enum class Direction { Forward, Backward };

/// Unnormalised complex DFT. Forward uses exp(-2 pi i j k / n), Backward
/// exp(+2 pi i j k / n). Safe to call concurrently: plans are cached per
/// thread and creation is serialised internally.
void dft(std::span<const cdouble> in, std::span<cdouble> out, Direction dir);
std::vector<cdouble> dft(std::span<const cdouble> in, Direction dir);

/// Forward real-input DFT; returns the n/2 + 1 non-redundant bins.
std::vector<cdouble> rdft(std::span<const double> in);

/// Unnormalised 2-D DFT of a row-major rows x cols array, in place.
/// Rows and columns are transformed by independent 1-D passes spread over
/// OpenMP threads.
void dft2d_inplace(std::span<cdouble> data, std::size_t rows, std::size_t cols, Direction dir);

/// Reference for dft2d_inplace: one serial multi-dimensional FFTW plan.
void dft2d_inplace_serial(std::span<cdouble> data, std::size_t rows, std::size_t cols,
                          Direction dir);

}  // namespace wavespec::fft
