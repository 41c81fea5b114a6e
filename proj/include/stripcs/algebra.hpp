#pragma once

// Bit-level GF(2) vectors and symmetric matrices, and quadratic forms over Z4.

#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stripcs {

using Complex = std::complex<double>;

/// Largest supported vector length; a BinaryVector lives in one machine word.
inline constexpr int kMaxBits = 63;

class BinaryVector {
public:
    BinaryVector() = default;
    BinaryVector(std::uint64_t bits, int length);

    static BinaryVector unit(int i, int length);
    static BinaryVector zeros(int length) { return BinaryVector(0, length); }

    std::uint64_t bits() const { return bits_; }
    int size() const { return length_; }
    bool operator[](int i) const { return (bits_ >> i) & 1u; }
    int weight() const { return std::popcount(bits_); }

    /// Inner product over GF(2).
    bool dot(const BinaryVector& other) const;

    friend BinaryVector operator^(const BinaryVector& a, const BinaryVector& b);
    friend BinaryVector operator&(const BinaryVector& a, const BinaryVector& b);
    friend bool operator==(const BinaryVector&, const BinaryVector&) = default;

private:
    std::uint64_t bits_ = 0;
    int length_ = 0;
};

/// m x m symmetric matrix over GF(2), one word per row. Bit j of row i is entry (i, j).
class BinarySymmetricMatrix {
public:
    BinarySymmetricMatrix() = default;
    explicit BinarySymmetricMatrix(int m);

    /// Throws std::invalid_argument unless rows describe a symmetric m x m matrix.
    static BinarySymmetricMatrix from_rows(std::vector<std::uint64_t> rows);
    static BinarySymmetricMatrix identity(int m);

    int size() const { return static_cast<int>(rows_.size()); }
    std::uint64_t row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
    std::span<const std::uint64_t> rows() const { return rows_; }
    bool at(int i, int j) const { return (rows_[static_cast<std::size_t>(i)] >> j) & 1u; }

    /// The main diagonal d_P.
    BinaryVector diagonal() const;
    /// Row vector a * P.
    BinaryVector left_multiply(const BinaryVector& a) const;

    friend BinarySymmetricMatrix operator^(const BinarySymmetricMatrix& a,
                                           const BinarySymmetricMatrix& b);
    friend bool operator==(const BinarySymmetricMatrix&, const BinarySymmetricMatrix&) = default;

    static bool is_symmetric(std::span<const std::uint64_t> rows);

private:
    std::vector<std::uint64_t> rows_;
};

/// Rank over GF(2) of an arbitrary list of row words.
int gf2_rank(std::span<const std::uint64_t> rows);
int gf2_rank(const BinarySymmetricMatrix& matrix);

/// Element of the ring Z4.
class Z4Value {
public:
    constexpr Z4Value() = default;
    constexpr explicit Z4Value(int v) : v_(static_cast<std::uint8_t>(((v % 4) + 4) % 4)) {}

    constexpr int value() const { return v_; }
    constexpr Z4Value operator+(Z4Value o) const { return Z4Value(v_ + o.v_); }
    constexpr Z4Value operator-() const { return Z4Value(4 - v_); }
    constexpr bool operator==(const Z4Value&) const = default;

    /// i^v as a complex number, exactly.
    Complex power_of_i() const;

private:
    std::uint8_t v_ = 0;
};

/// sum_{i,j} x_i P_ij x_j + 2 sum_i b_i x_i over the integers, reduced mod 4.
Z4Value z4_form_eval(const BinarySymmetricMatrix& P, const BinaryVector& b, const BinaryVector& x);

/// Same as z4_form_eval on raw words; no dimension checks.
inline int z4_form_raw(std::span<const std::uint64_t> rows, std::uint64_t b, std::uint64_t x) {
    int s = 0;
    for (std::uint64_t w = x; w != 0; w &= w - 1) {
        const int i = std::countr_zero(w);
        s += std::popcount(rows[static_cast<std::size_t>(i)] & x);
    }
    s += 2 * std::popcount(b & x);
    return s & 3;
}

/// Fill out[x] = x P x^T mod 4 for every x in [0, 2^m), in O(2^m) popcounts.
void quadratic_form_table(std::span<const std::uint64_t> rows, std::span<std::uint8_t> out);

/// GF(2^m) for 1 <= m <= 16, defined by a fixed primitive polynomial per degree.
class GF2m {
public:
    explicit GF2m(int m);

    int degree() const { return m_; }
    /// Defining polynomial including the x^m term.
    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t order() const { return std::uint32_t{1} << m_; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t square(std::uint32_t a) const { return mul(a, a); }
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
    /// Absolute trace to GF(2).
    int trace(std::uint32_t a) const;

    static std::uint32_t default_modulus(int m);

private:
    int m_;
    std::uint32_t modulus_;
};

struct GF2mElement {
    std::uint32_t value = 0;
    std::uint32_t modulus = 0;

    /// Throws if value is not reduced or the modulus is not a supported field.
    static GF2mElement make(std::uint32_t value, const GF2m& field);
    friend bool operator==(const GF2mElement&, const GF2mElement&) = default;
};

GF2mElement gf2m_mul(const GF2mElement& a, const GF2mElement& b);
int gf2m_trace(const GF2mElement& a);

/// Row-major dense complex matrix, used for small Gram matrices.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
/// Throws std::invalid_argument if G is not square, larger than 64, or not Hermitian to 1e-10.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& G);

/// Solves A z = rhs by Gaussian elimination with partial pivoting.
/// Returns nullopt when a pivot falls below pivot_tol times the largest entry of A.
std::optional<std::vector<Complex>> solve_linear(ComplexMatrix A, std::vector<Complex> rhs, double pivot_tol = 1e-12);

} // namespace stripcs
