#include "stripcs/algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace stripcs {

namespace {

std::uint64_t low_mask(int length) {
    return length >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << length) - 1);
}

void check_length(int length) {
    if (length < 0 || length > kMaxBits)
        throw std::invalid_argument("binary length must be in [0, 63], got " + std::to_string(length));
}

void check_same(int a, int b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
}

} // namespace

BinaryVector::BinaryVector(std::uint64_t bits, int length) : bits_(bits), length_(length) {
    check_length(length);
    if ((bits & ~low_mask(length)) != 0)
        throw std::invalid_argument("BinaryVector: bits set above position length-1");
}

BinaryVector BinaryVector::unit(int i, int length) {
    if (i < 0 || i >= length)
        throw std::out_of_range("BinaryVector::unit: index out of range");
    return BinaryVector(std::uint64_t{1} << i, length);
}

bool BinaryVector::dot(const BinaryVector& other) const {
    check_same(length_, other.length_, "BinaryVector::dot");
    return std::popcount(bits_ & other.bits_) & 1;
}

BinaryVector operator^(const BinaryVector& a, const BinaryVector& b) {
    check_same(a.length_, b.length_, "BinaryVector xor");
    return BinaryVector(a.bits_ ^ b.bits_, a.length_);
}

BinaryVector operator&(const BinaryVector& a, const BinaryVector& b) {
    check_same(a.length_, b.length_, "BinaryVector and");
    return BinaryVector(a.bits_ & b.bits_, a.length_);
}

BinarySymmetricMatrix::BinarySymmetricMatrix(int m) : rows_(static_cast<std::size_t>(m), 0) {
    check_length(m);
}

bool BinarySymmetricMatrix::is_symmetric(std::span<const std::uint64_t> rows) {
    const int m = static_cast<int>(rows.size());
    for (int i = 0; i < m; ++i) {
        if ((rows[static_cast<std::size_t>(i)] & ~low_mask(m)) != 0) return false;
        for (int j = i + 1; j < m; ++j) {
            const bool ij = (rows[static_cast<std::size_t>(i)] >> j) & 1u;
            const bool ji = (rows[static_cast<std::size_t>(j)] >> i) & 1u;
            if (ij != ji) return false;
        }
    }
    return true;
}

BinarySymmetricMatrix BinarySymmetricMatrix::from_rows(std::vector<std::uint64_t> rows) {
    check_length(static_cast<int>(rows.size()));
    if (!is_symmetric(rows))
        throw std::invalid_argument("BinarySymmetricMatrix: rows are not a symmetric matrix");
    BinarySymmetricMatrix out;
    out.rows_ = std::move(rows);
    return out;
}

BinarySymmetricMatrix BinarySymmetricMatrix::identity(int m) {
    BinarySymmetricMatrix out(m);
    for (int i = 0; i < m; ++i) out.rows_[static_cast<std::size_t>(i)] = std::uint64_t{1} << i;
    return out;
}

BinaryVector BinarySymmetricMatrix::diagonal() const {
    std::uint64_t d = 0;
    for (int i = 0; i < size(); ++i) d |= ((rows_[static_cast<std::size_t>(i)] >> i) & 1u) << i;
    return BinaryVector(d, size());
}

BinaryVector BinarySymmetricMatrix::left_multiply(const BinaryVector& a) const {
    check_same(a.size(), size(), "BinarySymmetricMatrix::left_multiply");
    std::uint64_t acc = 0;
    for (std::uint64_t w = a.bits(); w != 0; w &= w - 1)
        acc ^= rows_[static_cast<std::size_t>(std::countr_zero(w))];
    return BinaryVector(acc, size());
}

BinarySymmetricMatrix operator^(const BinarySymmetricMatrix& a, const BinarySymmetricMatrix& b) {
    check_same(a.size(), b.size(), "BinarySymmetricMatrix xor");
    BinarySymmetricMatrix out(a.size());
    for (std::size_t i = 0; i < a.rows_.size(); ++i) out.rows_[i] = a.rows_[i] ^ b.rows_[i];
    return out;
}

int gf2_rank(std::span<const std::uint64_t> rows) {
    std::vector<std::uint64_t> work(rows.begin(), rows.end());
    int rank = 0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        const std::uint64_t pivot_row = work[i];
        if (pivot_row == 0) continue;
        ++rank;
        const std::uint64_t pivot = pivot_row & (~pivot_row + 1);
        for (std::size_t j = i + 1; j < work.size(); ++j)
            if (work[j] & pivot) work[j] ^= pivot_row;
    }
    return rank;
}

int gf2_rank(const BinarySymmetricMatrix& matrix) { return gf2_rank(matrix.rows()); }

Complex Z4Value::power_of_i() const {
    switch (v_) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

Z4Value z4_form_eval(const BinarySymmetricMatrix& P, const BinaryVector& b, const BinaryVector& x) {
    check_same(P.size(), b.size(), "z4_form_eval(P, b)");
    check_same(P.size(), x.size(), "z4_form_eval(P, x)");
    return Z4Value(z4_form_raw(P.rows(), b.bits(), x.bits()));
}

void quadratic_form_table(std::span<const std::uint64_t> rows, std::span<std::uint8_t> out) {
    const std::size_t n = std::size_t{1} << rows.size();
    if (out.size() != n) throw std::invalid_argument("quadratic_form_table: output size must be 2^m");
    out[0] = 0;
    // x = rest | e_h with h the top bit: Q(x) = Q(rest) + P_hh + 2 popcount(row_h & rest)
    for (std::size_t x = 1; x < n; ++x) {
        const int h = std::bit_width(x) - 1;
        const std::uint64_t rest = x & ~(std::uint64_t{1} << h);
        const std::uint64_t row = rows[static_cast<std::size_t>(h)];
        const int v = out[rest] + static_cast<int>((row >> h) & 1u) + 2 * std::popcount(row & rest);
        out[x] = static_cast<std::uint8_t>(v & 3);
    }
}

namespace {

// Primitive polynomials (Conway polynomials for these degrees), bit i = coefficient of x^i.
constexpr std::array<std::uint32_t, 17> kConway = {
    0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x5B,   0x83,   0x11D,
    0x211,  0x46F,  0x805,  0x10EB, 0x201B, 0x40A9, 0x8003, 0x1002D,
};

} // namespace

std::uint32_t GF2m::default_modulus(int m) {
    if (m < 1 || m > 16) throw std::invalid_argument("GF2m: degree must be in [1, 16], got " + std::to_string(m));
    return kConway[static_cast<std::size_t>(m)];
}

GF2m::GF2m(int m) : m_(m), modulus_(default_modulus(m)) {}

std::uint32_t GF2m::mul(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t acc = 0;
    while (b != 0) {
        if (b & 1u) acc ^= a;
        b >>= 1;
        a <<= 1;
        if (a & order()) a ^= modulus_;
    }
    return acc;
}

std::uint32_t GF2m::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t result = 1;
    while (e != 0) {
        if (e & 1u) result = mul(result, a);
        a = mul(a, a);
        e >>= 1;
    }
    return result;
}

int GF2m::trace(std::uint32_t a) const {
    std::uint32_t t = 0;
    std::uint32_t x = a;
    for (int i = 0; i < m_; ++i) {
        t ^= x;
        x = mul(x, x);
    }
    // The trace lies in the prime field, so t is 0 or 1.
    return static_cast<int>(t & 1u);
}

GF2mElement GF2mElement::make(std::uint32_t value, const GF2m& field) {
    if (value >= field.order()) throw std::invalid_argument("GF2mElement: value not reduced");
    return {value, field.modulus()};
}

namespace {

GF2m field_of(std::uint32_t modulus) {
    if (modulus < 2) throw std::invalid_argument("GF2mElement: missing field specification");
    const int m = std::bit_width(modulus) - 1;
    if (m < 1 || m > 16 || kConway[static_cast<std::size_t>(m)] != modulus)
        throw std::invalid_argument("GF2mElement: unsupported field polynomial");
    return GF2m(m);
}

} // namespace

GF2mElement gf2m_mul(const GF2mElement& a, const GF2mElement& b) {
    if (a.modulus != b.modulus) throw std::invalid_argument("gf2m_mul: elements belong to different fields");
    const GF2m field = field_of(a.modulus);
    if (a.value >= field.order() || b.value >= field.order())
        throw std::invalid_argument("gf2m_mul: value not reduced");
    return {field.mul(a.value, b.value), a.modulus};
}

int gf2m_trace(const GF2mElement& a) {
    const GF2m field = field_of(a.modulus);
    if (a.value >= field.order()) throw std::invalid_argument("gf2m_trace: value not reduced");
    return field.trace(a.value);
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& G) {
    const std::size_t n = G.rows();
    if (G.cols() != n) throw std::invalid_argument("hermitian_eigenvalues: matrix is not square");
    if (n > 64) throw std::invalid_argument("hermitian_eigenvalues: dimension above 64");
    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            frob += std::norm(G(i, j));
            if (std::abs(G(i, j) - std::conj(G(j, i))) > 1e-10)
                throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
        }
    frob = std::sqrt(frob);

    ComplexMatrix A = G;
    for (std::size_t i = 0; i < n; ++i) A(i, i) = A(i, i).real();
    const double target = 1e-12 * std::max(frob, 1.0);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += std::norm(A(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() >= target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(A(p, q));
                if (mag == 0.0) continue;
                // Rotate the phase of index q so that A(p, q) becomes real and positive.
                const Complex phase = std::conj(A(p, q)) / mag;
                for (std::size_t k = 0; k < n; ++k) A(k, q) *= phase;
                for (std::size_t k = 0; k < n; ++k) A(q, k) *= std::conj(phase);
                A(p, q) = mag;
                A(q, p) = mag;

                const double theta = (A(q, q).real() - A(p, p).real()) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = A(k, p);
                    const Complex akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = A(p, k);
                    const Complex aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = A(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::optional<std::vector<Complex>> solve_linear(ComplexMatrix A, std::vector<Complex> rhs, double pivot_tol) {
    const std::size_t n = A.rows();
    if (A.cols() != n || rhs.size() != n) throw std::invalid_argument("solve_linear: dimension mismatch");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(A(i, j)));
    if (n == 0) return rhs;
    if (scale == 0.0) return std::nullopt;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(A(i, col)) > std::abs(A(piv, col))) piv = i;
        if (std::abs(A(piv, col)) <= pivot_tol * scale) return std::nullopt;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(piv, j), A(col, j));
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t i = col + 1; i < n; ++i) {
            const Complex f = A(i, col) / A(col, col);
            if (f == Complex{}) continue;
            for (std::size_t j = col; j < n; ++j) A(i, j) -= f * A(col, j);
            rhs[i] -= f * rhs[col];
        }
    }
    std::vector<Complex> z(n);
    for (std::size_t i = n; i-- > 0;) {
        Complex acc = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= A(i, j) * z[j];
        z[i] = acc / A(i, i);
    }
    return z;
}

} // namespace stripcs
