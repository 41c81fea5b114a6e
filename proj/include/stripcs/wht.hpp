#pragma once

#include <complex>
#include <span>
#include <vector>

namespace stripcs {

/// Unnormalized Walsh-Hadamard transform W(l) = sum_x (-1)^{l.x} v(x), in place.
/// Throws std::invalid_argument unless the length is a power of two.
void fwht(std::span<std::complex<double>> v);
void fwht(std::span<double> v);

std::vector<std::complex<double>> fwht_copy(std::span<const std::complex<double>> v);

/// Direct O(N^2) evaluation of the same transform.
std::vector<std::complex<double>> naive_wht(std::span<const std::complex<double>> v);

} // namespace stripcs
