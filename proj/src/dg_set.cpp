#include "stripcs/dg_set.hpp"

#include <stdexcept>

namespace stripcs {

namespace {

BinarySymmetricMatrix form_matrix(const GF2m& F, int m, int j, std::uint32_t t) {
    // Basis beta_i = x^i. j = 0 gives tr(t b_i b_k); j >= 1 gives the alternating form
    // tr(t (b_i b_k^{2^j} + b_i^{2^j} b_k)).
    std::vector<std::uint32_t> frob(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        std::uint32_t v = std::uint32_t{1} << i;
        for (int s = 0; s < j; ++s) v = F.square(v);
        frob[static_cast<std::size_t>(i)] = v;
    }
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const std::uint32_t bi = std::uint32_t{1} << i;
            const std::uint32_t bk = std::uint32_t{1} << k;
            int bit;
            if (j == 0) {
                bit = F.trace(F.mul(t, F.mul(bi, bk)));
            } else {
                const std::uint32_t s = F.mul(bi, frob[static_cast<std::size_t>(k)]) ^
                                        F.mul(frob[static_cast<std::size_t>(i)], bk);
                bit = F.trace(F.mul(t, s));
            }
            if (bit) rows[static_cast<std::size_t>(i)] |= std::uint64_t{1} << k;
        }
    }
    return BinarySymmetricMatrix::from_rows(std::move(rows));
}

} // namespace

DGSet::DGSet(int m, int r, std::vector<BinarySymmetricMatrix> generators)
    : m_(m), r_(r), generators_(std::move(generators)) {
    if (m * (m + 1) / 2 > 128) throw std::invalid_argument("DGSet: m too large");
    if (generators_.size() + static_cast<std::size_t>(m) > 62)
        throw std::invalid_argument("DGSet: column index would exceed 62 bits");
    for (const auto& g : generators_) diagonals_.push_back(g.diagonal().bits());

    for (std::size_t g = 0; g < generators_.size(); ++g) {
        Packed v = pack(generators_[g].rows().data());
        std::uint64_t comb = std::uint64_t{1} << g;
        for (std::size_t e = 0; e < echelon_.size(); ++e) {
            if ((v >> pivot_[e]) & 1) {
                v ^= echelon_[e];
                comb ^= combination_[e];
            }
        }
        if (v == 0) throw std::logic_error("DGSet: generators are linearly dependent");
        int p = 0;
        while (((v >> p) & 1) == 0) ++p;
        // Keep the echelon fully reduced on pivot columns.
        for (std::size_t e = 0; e < echelon_.size(); ++e) {
            if ((echelon_[e] >> p) & 1) {
                echelon_[e] ^= v;
                combination_[e] ^= comb;
            }
        }
        echelon_.push_back(v);
        combination_.push_back(comb);
        pivot_.push_back(p);
    }
}

DGSet DGSet::delsarte_goethals(int m, int r) {
    if (m < 3 || m > 15 || m % 2 == 0)
        throw std::invalid_argument("delsarte_goethals: m must be odd with 3 <= m <= 15, got " + std::to_string(m));
    if (r < 0 || r > (m - 1) / 2)
        throw std::invalid_argument("delsarte_goethals: r must be in [0, (m-1)/2], got " + std::to_string(r));
    if ((r + 2) * m > 62)
        throw std::invalid_argument("delsarte_goethals: (r+2)m must not exceed 62");
    const GF2m F(m);
    std::vector<BinarySymmetricMatrix> gens;
    for (int j = 0; j <= r; ++j)
        for (int i = 0; i < m; ++i) gens.push_back(form_matrix(F, m, j, std::uint32_t{1} << i));
    return DGSet(m, r, std::move(gens));
}

DGSet DGSet::all_symmetric(int m) {
    if (m < 1 || m * (m + 1) / 2 + m > 62)
        throw std::invalid_argument("all_symmetric: m must be in [1, 9], got " + std::to_string(m));
    std::vector<BinarySymmetricMatrix> gens;
    for (int i = 0; i < m; ++i) {
        for (int k = i; k < m; ++k) {
            std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
            rows[static_cast<std::size_t>(i)] |= std::uint64_t{1} << k;
            rows[static_cast<std::size_t>(k)] |= std::uint64_t{1} << i;
            gens.push_back(BinarySymmetricMatrix::from_rows(std::move(rows)));
        }
    }
    return DGSet(m, -1, std::move(gens));
}

DGSet::Packed DGSet::pack(const std::uint64_t* rows) const {
    Packed out = 0;
    int pos = 0;
    for (int i = 0; i < m_; ++i) {
        const std::uint64_t upper = rows[i] >> i;
        out |= static_cast<Packed>(upper) << pos;
        pos += m_ - i;
    }
    return out;
}

BinarySymmetricMatrix DGSet::matrix(std::uint64_t coeffs) const {
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m_));
    matrix_rows(coeffs, rows.data());
    return BinarySymmetricMatrix::from_rows(std::move(rows));
}

void DGSet::matrix_rows(std::uint64_t coeffs, std::uint64_t* rows) const {
    if (coeffs >= size()) throw std::out_of_range("DGSet: coefficient word out of range");
    for (int i = 0; i < m_; ++i) rows[i] = 0;
    for (std::uint64_t w = coeffs; w != 0; w &= w - 1) {
        const auto& g = generators_[static_cast<std::size_t>(std::countr_zero(w))];
        for (int i = 0; i < m_; ++i) rows[i] ^= g.row(i);
    }
}

std::uint64_t DGSet::diagonal(std::uint64_t coeffs) const {
    std::uint64_t d = 0;
    for (std::uint64_t w = coeffs; w != 0; w &= w - 1) d ^= diagonals_[static_cast<std::size_t>(std::countr_zero(w))];
    return d;
}

std::optional<std::uint64_t> DGSet::coefficients_of_rows(const std::uint64_t* rows) const {
    if (!BinarySymmetricMatrix::is_symmetric(std::span<const std::uint64_t>(rows, static_cast<std::size_t>(m_))))
        return std::nullopt;
    Packed v = pack(rows);
    std::uint64_t comb = 0;
    for (std::size_t e = 0; e < echelon_.size(); ++e) {
        if ((v >> pivot_[e]) & 1) {
            v ^= echelon_[e];
            comb ^= combination_[e];
        }
    }
    if (v != 0) return std::nullopt;
    return comb;
}

std::optional<std::uint64_t> DGSet::coefficients_of(const BinarySymmetricMatrix& P) const {
    if (P.size() != m_) throw std::invalid_argument("DGSet::coefficients_of: dimension mismatch");
    return coefficients_of_rows(P.rows().data());
}

std::string DGSet::name() const {
    if (is_full_symmetric()) return "SYM(" + std::to_string(m_) + ")";
    return "DG(" + std::to_string(m_) + "," + std::to_string(r_) + ")";
}

} // namespace stripcs
