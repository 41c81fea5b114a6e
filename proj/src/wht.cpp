#include "stripcs/wht.hpp"

#include <bit>
#include <stdexcept>

namespace stripcs {

namespace {

void check_length(std::size_t n) {
    if (n == 0 || !std::has_single_bit(n))
        throw std::invalid_argument("Walsh-Hadamard transform needs a power-of-two length");
}

template <class T>
void butterfly(std::span<T> v) {
    check_length(v.size());
    const std::size_t n = v.size();
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const T a = v[j];
                const T b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

} // namespace

void fwht(std::span<std::complex<double>> v) { butterfly(v); }
void fwht(std::span<double> v) { butterfly(v); }

std::vector<std::complex<double>> fwht_copy(std::span<const std::complex<double>> v) {
    std::vector<std::complex<double>> out(v.begin(), v.end());
    fwht(std::span<std::complex<double>>(out));
    return out;
}

std::vector<std::complex<double>> naive_wht(std::span<const std::complex<double>> v) {
    check_length(v.size());
    const std::size_t n = v.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t l = 0; l < n; ++l) {
        std::complex<double> acc = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            acc += (std::popcount(l & x) & 1) ? -v[x] : v[x];
        out[l] = acc;
    }
    return out;
}

} // namespace stripcs
