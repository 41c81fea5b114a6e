#pragma once

#include "stripcs/algebra.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stripcs {

/// A GF(2)-linear space of m x m binary symmetric matrices, given by a basis.
/// Members are addressed by their coefficient word over the basis.
class DGSet {
public:
    /// DG(m, r): span of the bilinear forms of tr(t x^{2^j + 1}), j = 0..r.
    static DGSet delsarte_goethals(int m, int r);
    /// Every binary symmetric m x m matrix (all second-order Reed-Muller cosets).
    static DGSet all_symmetric(int m);

    int m() const { return m_; }
    /// r for Delsarte-Goethals sets, -1 for the full symmetric set.
    int r() const { return r_; }
    bool is_full_symmetric() const { return r_ < 0; }
    int dimension() const { return static_cast<int>(generators_.size()); }
    std::uint64_t size() const { return std::uint64_t{1} << dimension(); }

    const std::vector<BinarySymmetricMatrix>& generators() const { return generators_; }

    BinarySymmetricMatrix matrix(std::uint64_t coeffs) const;
    /// Writes the m rows of the member with these coefficients.
    void matrix_rows(std::uint64_t coeffs, std::uint64_t* rows) const;
    /// Diagonal of the member, which is linear in the coefficients.
    std::uint64_t diagonal(std::uint64_t coeffs) const;
    /// Generator diagonals, bit-packed.
    const std::vector<std::uint64_t>& generator_diagonals() const { return diagonals_; }

    /// Coefficients of P over the basis, or nullopt when P is not a member.
    std::optional<std::uint64_t> coefficients_of(const BinarySymmetricMatrix& P) const;
    std::optional<std::uint64_t> coefficients_of_rows(const std::uint64_t* rows) const;

    std::string name() const;

private:
    __extension__ typedef unsigned __int128 Packed;

    DGSet(int m, int r, std::vector<BinarySymmetricMatrix> generators);
    Packed pack(const std::uint64_t* rows) const;

    int m_ = 0;
    int r_ = 0;
    std::vector<BinarySymmetricMatrix> generators_;
    std::vector<std::uint64_t> diagonals_;
    // Echelon form of the packed generators, with the generator combination behind each row.
    std::vector<Packed> echelon_;
    std::vector<std::uint64_t> combination_;
    std::vector<int> pivot_;
};

} // namespace stripcs
