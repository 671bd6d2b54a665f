#pragma once

// Thin real-to-complex FFT layer over FFTW. Plans are created once per shape
// (under a lock) and executed through the new-array interface, which FFTW
// guarantees to be thread-safe.

#include <complex>
#include <span>
#include <string_view>

namespace bflow::spectral {

using cplx = std::complex<double>;

/// Signed wavenumber of storage index `idx` for a transform of length n.
inline int wavenumber(int idx, int n) noexcept { return idx <= n / 2 ? idx : idx - n; }

/// Unnormalized forward transform; out.size() == n/2 + 1.
void forward(int n, std::span<const double> in, std::span<cplx> out);
/// Inverse including the 1/n factor; `in` is not modified.
void backward(int n, std::span<const cplx> in, std::span<double> out);

/// 2-D transforms on row-major nx * ny data; spectrum is nx * (ny/2 + 1).
void forward2(int nx, int ny, std::span<const double> in, std::span<cplx> out);
void backward2(int nx, int ny, std::span<const cplx> in, std::span<double> out);

/// Version string reported by the linked FFTW.
std::string_view fftw_version() noexcept;

}  // namespace bflow::spectral
