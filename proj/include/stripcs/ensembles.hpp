#pragma once

#include "stripcs/algebra.hpp"
#include "stripcs/dg_set.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stripcs {

enum class Family { Chirp, DelsarteGoethals, SecondOrderRM, BCH, PartialFourier, Gaussian, Dense };

std::string family_name(Family f);
/// Accepts the names produced by family_name plus a few aliases ("dg", "kerdock", "pf").
Family parse_family(const std::string& name);

/// Serializable description of a sensing matrix: {family, params, seed}.
struct MatrixSpec {
    Family family = Family::Chirp;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static MatrixSpec from_json(const nlohmann::json& j);
    std::string describe() const;
    friend bool operator==(const MatrixSpec& a, const MatrixSpec& b) {
        return a.family == b.family && a.params == b.params && a.seed == b.seed;
    }
};

/// Column evaluator behind a SensingMatrix. Implementations are immutable and
/// safe to call from several threads. Column 0 is the identity column for the
/// structured families.
class ColumnOracle {
public:
    virtual ~ColumnOracle() = default;

    virtual std::size_t rows() const = 0;
    virtual std::uint64_t cols() const = 0;
    virtual void column_into(std::uint64_t j, std::span<Complex> out) const = 0;

    /// Index of the pointwise product of columns a and b, when the family knows it.
    virtual std::optional<std::uint64_t> product_index(std::uint64_t, std::uint64_t) const { return std::nullopt; }
    virtual std::optional<std::uint64_t> conjugate_index(std::uint64_t) const { return std::nullopt; }
    /// Columns generating the group of columns under pointwise product, if any.
    virtual std::vector<std::uint64_t> group_generators() const { return {}; }
    virtual bool unimodular() const { return true; }

    /// out = sum_j coeffs[j] phi_j for a dense coefficient vector of length cols().
    virtual void apply(std::span<const Complex> coeffs, std::span<Complex> out) const;
    /// out[j] = sum_x phi_j(x) for every column.
    virtual void column_sums(std::span<Complex> out) const;
};

class SensingMatrix {
public:
    SensingMatrix(std::shared_ptr<const ColumnOracle> oracle, MatrixSpec spec, Family family,
                  std::shared_ptr<const DGSet> dg = nullptr);

    std::size_t rows() const { return rows_; }
    std::uint64_t cols() const { return cols_; }
    Family family() const { return family_; }
    const MatrixSpec& spec() const { return spec_; }
    const ColumnOracle& oracle() const { return *oracle_; }
    std::shared_ptr<const ColumnOracle> oracle_ptr() const { return oracle_; }
    /// The matrix set behind a Delsarte-Goethals or second-order Reed-Muller matrix, else nullptr.
    const DGSet* dg_set() const { return dg_.get(); }
    bool unimodular() const { return oracle_->unimodular(); }

    std::vector<Complex> column(std::uint64_t j) const;
    void column_into(std::uint64_t j, std::span<Complex> out) const;
    Complex entry(std::uint64_t j, std::size_t x) const;

    std::optional<std::uint64_t> product_index(std::uint64_t a, std::uint64_t b) const;
    std::optional<std::uint64_t> conjugate_index(std::uint64_t j) const;

    /// Dense coefficients (length cols()) to a length-rows() vector, without normalization.
    std::vector<Complex> apply(std::span<const Complex> coeffs) const;
    /// Sparse coefficients: sum_i values[i] phi_{indices[i]}.
    std::vector<Complex> apply_sparse(std::span<const std::uint64_t> indices, std::span<const Complex> values) const;

    std::vector<Complex> column_sums() const;

private:
    void check_index(std::uint64_t j) const;

    std::shared_ptr<const ColumnOracle> oracle_;
    MatrixSpec spec_;
    Family family_;
    std::shared_ptr<const DGSet> dg_;
    std::size_t rows_;
    std::uint64_t cols_;
};

/// Delsarte-Goethals column address: flat index = coeffs * 2^m + b.
struct DGColumnIndex {
    std::uint64_t coeffs = 0;
    std::uint64_t b = 0;
};
DGColumnIndex dg_split(const SensingMatrix& matrix, std::uint64_t j);
std::uint64_t dg_join(const SensingMatrix& matrix, DGColumnIndex idx);

bool is_prime(std::uint64_t n);

SensingMatrix build_chirp(int p);
SensingMatrix build_delsarte_goethals(int m, int r);
/// All binary symmetric matrices of order m (m <= 9); no rank guarantees.
SensingMatrix build_second_order_rm(int m);
SensingMatrix build_bch(int m, int t);
SensingMatrix build_partial_fourier(std::uint64_t C, std::size_t N, std::uint64_t seed);
SensingMatrix build_gaussian(std::size_t N, std::uint64_t C, std::uint64_t seed);
/// Explicit matrix from columns, for tiny cross-checks.
SensingMatrix build_dense(std::vector<std::vector<Complex>> columns);
/// Keep `count` distinct columns chosen uniformly at random, in increasing order.
SensingMatrix subsample_columns(const SensingMatrix& base, std::uint64_t count, std::uint64_t seed);

SensingMatrix build_from_spec(const MatrixSpec& spec);

/// The fixed public vector b of the BCH construction, as a list of coordinates.
std::vector<std::size_t> bch_public_vector(int m, int t);

/// Writes the matrix row-major as "re,im" pairs, one row per line. Refuses matrices above 2^20 entries.
void export_csv(const SensingMatrix& matrix, std::ostream& os);

} // namespace stripcs
