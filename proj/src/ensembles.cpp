#include "stripcs/ensembles.hpp"

#include "stripcs/rng.hpp"
#include "stripcs/wht.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace stripcs {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSubsampleStream = 0x5342u;

Complex i_power(int e) {
    switch (e & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

std::vector<Complex> roots_of_unity(std::uint64_t n) {
    std::vector<Complex> w(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = {std::cos(angle), std::sin(angle)};
    }
    // Exact values at the quarter turns.
    if (n % 4 == 0) {
        w[n / 4] = {0.0, 1.0};
        w[3 * n / 4] = {0.0, -1.0};
    }
    if (n % 2 == 0) w[n / 2] = {-1.0, 0.0};
    return w;
}

class ChirpOracle final : public ColumnOracle {
public:
    explicit ChirpOracle(int p) : p_(static_cast<std::uint64_t>(p)), w_(roots_of_unity(p_)) {}

    std::size_t rows() const override { return p_; }
    std::uint64_t cols() const override { return p_ * p_; }

    void column_into(std::uint64_t j, std::span<Complex> out) const override {
        const std::uint64_t m = j / p_;
        const std::uint64_t r = j % p_;
        for (std::uint64_t x = 0; x < p_; ++x) out[x] = w_[(r + m * x + r * (x * x % p_)) % p_];
    }

    std::optional<std::uint64_t> product_index(std::uint64_t a, std::uint64_t b) const override {
        return ((a / p_ + b / p_) % p_) * p_ + (a % p_ + b % p_) % p_;
    }
    std::optional<std::uint64_t> conjugate_index(std::uint64_t j) const override {
        return ((p_ - j / p_) % p_) * p_ + (p_ - j % p_) % p_;
    }
    std::vector<std::uint64_t> group_generators() const override { return {1, p_}; }

private:
    std::uint64_t p_;
    std::vector<Complex> w_;
};

class DGOracle final : public ColumnOracle {
public:
    explicit DGOracle(std::shared_ptr<const DGSet> set)
        : set_(std::move(set)), m_(set_->m()), n_(std::size_t{1} << m_) {}

    std::size_t rows() const override { return n_; }
    std::uint64_t cols() const override { return set_->size() << m_; }

    void column_into(std::uint64_t j, std::span<Complex> out) const override {
        const std::uint64_t c = j >> m_;
        const std::uint64_t b = j & (n_ - 1);
        std::uint64_t rows[64];
        set_->matrix_rows(c, rows);
        thread_local std::vector<std::uint8_t> q;
        q.resize(n_);
        quadratic_form_table(std::span<const std::uint64_t>(rows, static_cast<std::size_t>(m_)), q);
        const int base = std::popcount(set_->diagonal(c)) + 2 * std::popcount(b);
        for (std::size_t x = 0; x < n_; ++x)
            out[x] = i_power(base + q[x] + 2 * std::popcount(b & x));
    }

    std::optional<std::uint64_t> product_index(std::uint64_t a, std::uint64_t b) const override {
        const std::uint64_t ca = a >> m_, cb = b >> m_;
        const std::uint64_t bb = (a ^ b ^ (set_->diagonal(ca) & set_->diagonal(cb))) & (n_ - 1);
        return ((ca ^ cb) << m_) | bb;
    }
    std::optional<std::uint64_t> conjugate_index(std::uint64_t j) const override {
        const std::uint64_t c = j >> m_;
        return (c << m_) | ((j ^ set_->diagonal(c)) & (n_ - 1));
    }
    std::vector<std::uint64_t> group_generators() const override {
        std::vector<std::uint64_t> g;
        for (int i = 0; i < m_; ++i) g.push_back(std::uint64_t{1} << i);
        for (int i = 0; i < set_->dimension(); ++i) g.push_back(std::uint64_t{1} << (i + m_));
        return g;
    }

    void apply(std::span<const Complex> coeffs, std::span<Complex> out) const override {
        std::fill(out.begin(), out.end(), Complex{});
        std::vector<Complex> v(n_);
        std::vector<Complex> base(n_);
        for (std::uint64_t c = 0; c < set_->size(); ++c) {
            const auto block = coeffs.subspan(c * n_, n_);
            if (std::all_of(block.begin(), block.end(), [](const Complex& z) { return z == Complex{}; })) continue;
            for (std::size_t b = 0; b < n_; ++b) v[b] = (std::popcount(b) & 1) ? -block[b] : block[b];
            fwht(std::span<Complex>(v));
            column_into(c << m_, base);
            for (std::size_t x = 0; x < n_; ++x) out[x] += base[x] * v[x];
        }
    }

    void column_sums(std::span<Complex> out) const override {
        std::vector<Complex> h(n_);
        for (std::uint64_t c = 0; c < set_->size(); ++c) {
            column_into(c << m_, h);
            fwht(std::span<Complex>(h));
            for (std::size_t b = 0; b < n_; ++b) out[(c << m_) | b] = (std::popcount(b) & 1) ? -h[b] : h[b];
        }
    }

private:
    std::shared_ptr<const DGSet> set_;
    int m_;
    std::size_t n_;
};

struct BCHTables {
    int m = 0;
    int t = 0;
    // syndrome[x] bit (i*m + k) = tr(beta_k x^{2i+1}): the value at coordinate x of the
    // codeword whose only nonzero coefficient is beta_k in slot i.
    std::vector<std::uint64_t> syndrome;
    std::size_t b0 = 0;
    std::size_t b1 = 0;
};

BCHTables make_bch_tables(int m, int t) {
    const GF2m F(m);
    const std::size_t n = std::size_t{1} << m;
    BCHTables tab;
    tab.m = m;
    tab.t = t;
    tab.syndrome.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
        const auto xv = static_cast<std::uint32_t>(x);
        const std::uint32_t x2 = F.square(xv);
        std::uint32_t power = xv;
        for (int i = 0; i < t; ++i) {
            for (int k = 0; k < m; ++k) {
                if (F.trace(F.mul(std::uint32_t{1} << k, power)))
                    tab.syndrome[x] |= std::uint64_t{1} << (i * m + k);
            }
            power = F.mul(power, x2);
        }
    }
    // b must keep every row sum zero: b + e_x must not be orthogonal to the code for any x,
    // i.e. syndrome(b) is nonzero and differs from every single-coordinate syndrome.
    std::unordered_set<std::uint64_t> singles(tab.syndrome.begin(), tab.syndrome.end());
    for (std::size_t y1 = 0; y1 < n; ++y1) {
        for (std::size_t y2 = y1 + 1; y2 < n; ++y2) {
            const std::uint64_t s = tab.syndrome[y1] ^ tab.syndrome[y2];
            if (s != 0 && !singles.contains(s)) {
                tab.b0 = y1;
                tab.b1 = y2;
                return tab;
            }
        }
    }
    throw std::logic_error("build_bch: no weight-2 public vector keeps the row sums zero");
}

class BCHOracle final : public ColumnOracle {
public:
    explicit BCHOracle(BCHTables tab) : tab_(std::move(tab)), n_(std::size_t{1} << tab_.m) {}

    std::size_t rows() const override { return n_; }
    std::uint64_t cols() const override { return std::uint64_t{1} << (tab_.m * tab_.t); }

    void column_into(std::uint64_t j, std::span<Complex> out) const override {
        const bool flip = bit(j, tab_.b0) != bit(j, tab_.b1);
        for (std::size_t x = 0; x < n_; ++x) out[x] = (bit(j, x) != flip) ? -1.0 : 1.0;
    }

    std::optional<std::uint64_t> product_index(std::uint64_t a, std::uint64_t b) const override { return a ^ b; }
    std::optional<std::uint64_t> conjugate_index(std::uint64_t j) const override { return j; }
    std::vector<std::uint64_t> group_generators() const override {
        std::vector<std::uint64_t> g;
        for (int i = 0; i < tab_.m * tab_.t; ++i) g.push_back(std::uint64_t{1} << i);
        return g;
    }

    const BCHTables& tables() const { return tab_; }

private:
    bool bit(std::uint64_t j, std::size_t x) const { return std::popcount(j & tab_.syndrome[x]) & 1; }

    BCHTables tab_;
    std::size_t n_;
};

class PartialFourierOracle final : public ColumnOracle {
public:
    PartialFourierOracle(std::uint64_t C, std::vector<std::uint64_t> rows)
        : c_(C), rows_(std::move(rows)), w_(roots_of_unity(C)) {}

    std::size_t rows() const override { return rows_.size(); }
    std::uint64_t cols() const override { return c_; }

    void column_into(std::uint64_t u, std::span<Complex> out) const override {
        for (std::size_t x = 0; x < rows_.size(); ++x) out[x] = w_[(u * rows_[x]) % c_];
    }
    std::optional<std::uint64_t> product_index(std::uint64_t a, std::uint64_t b) const override { return (a + b) % c_; }
    std::optional<std::uint64_t> conjugate_index(std::uint64_t j) const override { return (c_ - j) % c_; }
    std::vector<std::uint64_t> group_generators() const override { return {1}; }

private:
    std::uint64_t c_;
    std::vector<std::uint64_t> rows_;
    std::vector<Complex> w_;
};

class GaussianOracle final : public ColumnOracle {
public:
    GaussianOracle(std::size_t N, std::uint64_t C, std::uint64_t seed) : n_(N), c_(C), seed_(seed) {}

    std::size_t rows() const override { return n_; }
    std::uint64_t cols() const override { return c_; }
    bool unimodular() const override { return false; }

    void column_into(std::uint64_t j, std::span<Complex> out) const override {
        Rng rng(derive_seed(seed_, j));
        for (std::size_t x = 0; x < n_; ++x) out[x] = rng.normal();
    }

private:
    std::size_t n_;
    std::uint64_t c_;
    std::uint64_t seed_;
};

class DenseOracle final : public ColumnOracle {
public:
    DenseOracle(std::size_t N, std::vector<std::vector<Complex>> columns)
        : n_(N), columns_(std::move(columns)) {
        unimodular_ = true;
        for (const auto& col : columns_)
            for (const auto& z : col)
                if (std::abs(std::abs(z) - 1.0) > 1e-12) unimodular_ = false;
    }

    std::size_t rows() const override { return n_; }
    std::uint64_t cols() const override { return columns_.size(); }
    bool unimodular() const override { return unimodular_; }
    void column_into(std::uint64_t j, std::span<Complex> out) const override {
        std::copy(columns_[j].begin(), columns_[j].end(), out.begin());
    }

private:
    std::size_t n_;
    std::vector<std::vector<Complex>> columns_;
    bool unimodular_;
};

class SubsampledOracle final : public ColumnOracle {
public:
    SubsampledOracle(std::shared_ptr<const ColumnOracle> base, std::vector<std::uint64_t> keep)
        : base_(std::move(base)), keep_(std::move(keep)) {}

    std::size_t rows() const override { return base_->rows(); }
    std::uint64_t cols() const override { return keep_.size(); }
    bool unimodular() const override { return base_->unimodular(); }
    void column_into(std::uint64_t j, std::span<Complex> out) const override { base_->column_into(keep_[j], out); }

private:
    std::shared_ptr<const ColumnOracle> base_;
    std::vector<std::uint64_t> keep_;
};

template <class T>
T param(const MatrixSpec& spec, const char* key) {
    if (!spec.params.contains(key))
        throw std::invalid_argument(std::string("params.") + key + ": missing for family " + family_name(spec.family));
    try {
        return spec.params.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("params.") + key + ": wrong type");
    }
}

} // namespace

void ColumnOracle::apply(std::span<const Complex> coeffs, std::span<Complex> out) const {
    std::fill(out.begin(), out.end(), Complex{});
    std::vector<Complex> col(rows());
    for (std::uint64_t j = 0; j < cols(); ++j) {
        if (coeffs[j] == Complex{}) continue;
        column_into(j, col);
        for (std::size_t x = 0; x < col.size(); ++x) out[x] += coeffs[j] * col[x];
    }
}

void ColumnOracle::column_sums(std::span<Complex> out) const {
    std::vector<Complex> col(rows());
    for (std::uint64_t j = 0; j < cols(); ++j) {
        column_into(j, col);
        Complex s = 0.0;
        for (const auto& z : col) s += z;
        out[j] = s;
    }
}

std::string family_name(Family f) {
    switch (f) {
    case Family::Chirp: return "chirp";
    case Family::DelsarteGoethals: return "dg";
    case Family::SecondOrderRM: return "rm2";
    case Family::BCH: return "bch";
    case Family::PartialFourier: return "partial_fourier";
    case Family::Gaussian: return "gaussian";
    case Family::Dense: return "dense";
    }
    return "unknown";
}

Family parse_family(const std::string& name) {
    if (name == "chirp") return Family::Chirp;
    if (name == "dg" || name == "kerdock" || name == "delsarte_goethals") return Family::DelsarteGoethals;
    if (name == "rm2" || name == "rm") return Family::SecondOrderRM;
    if (name == "bch") return Family::BCH;
    if (name == "partial_fourier" || name == "pf" || name == "fourier") return Family::PartialFourier;
    if (name == "gaussian") return Family::Gaussian;
    if (name == "dense") return Family::Dense;
    throw std::invalid_argument("family: unknown family '" + name + "'");
}

json MatrixSpec::to_json() const {
    return json{{"family", family_name(family)}, {"params", params}, {"seed", seed}};
}

MatrixSpec MatrixSpec::from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("matrix: expected an object");
    if (!j.contains("family") || !j.at("family").is_string())
        throw std::invalid_argument("matrix.family: missing or not a string");
    MatrixSpec spec;
    spec.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("params")) {
        if (!j.at("params").is_object()) throw std::invalid_argument("matrix.params: expected an object");
        spec.params = j.at("params");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            throw std::invalid_argument("matrix.seed: expected a non-negative integer");
        spec.seed = j.at("seed").get<std::uint64_t>();
    }
    return spec;
}

std::string MatrixSpec::describe() const {
    std::string out = family_name(family) + "(";
    bool first = true;
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (!first) out += ",";
        first = false;
        out += it.key() + "=" + it.value().dump();
    }
    out += ")";
    if (family == Family::Gaussian || family == Family::PartialFourier || params.contains("subsample"))
        out += " seed=" + std::to_string(seed);
    return out;
}

SensingMatrix::SensingMatrix(std::shared_ptr<const ColumnOracle> oracle, MatrixSpec spec, Family family,
                             std::shared_ptr<const DGSet> dg)
    : oracle_(std::move(oracle)), spec_(std::move(spec)), family_(family), dg_(std::move(dg)),
      rows_(oracle_->rows()), cols_(oracle_->cols()) {}

void SensingMatrix::check_index(std::uint64_t j) const {
    if (j >= cols_)
        throw std::out_of_range("column index " + std::to_string(j) + " out of range [0, " + std::to_string(cols_) + ")");
}

std::vector<Complex> SensingMatrix::column(std::uint64_t j) const {
    std::vector<Complex> out(rows_);
    column_into(j, out);
    return out;
}

void SensingMatrix::column_into(std::uint64_t j, std::span<Complex> out) const {
    check_index(j);
    if (out.size() != rows_) throw std::invalid_argument("column_into: output length must equal rows()");
    oracle_->column_into(j, out);
}

Complex SensingMatrix::entry(std::uint64_t j, std::size_t x) const {
    if (x >= rows_) throw std::out_of_range("row index out of range");
    return column(j)[x];
}

std::optional<std::uint64_t> SensingMatrix::product_index(std::uint64_t a, std::uint64_t b) const {
    check_index(a);
    check_index(b);
    return oracle_->product_index(a, b);
}

std::optional<std::uint64_t> SensingMatrix::conjugate_index(std::uint64_t j) const {
    check_index(j);
    return oracle_->conjugate_index(j);
}

std::vector<Complex> SensingMatrix::apply(std::span<const Complex> coeffs) const {
    if (coeffs.size() != cols_) throw std::invalid_argument("apply: coefficient length must equal cols()");
    std::vector<Complex> out(rows_);
    oracle_->apply(coeffs, out);
    return out;
}

std::vector<Complex> SensingMatrix::apply_sparse(std::span<const std::uint64_t> indices,
                                                 std::span<const Complex> values) const {
    if (indices.size() != values.size()) throw std::invalid_argument("apply_sparse: length mismatch");
    std::vector<Complex> out(rows_);
    std::vector<Complex> col(rows_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        column_into(indices[i], col);
        for (std::size_t x = 0; x < rows_; ++x) out[x] += values[i] * col[x];
    }
    return out;
}

std::vector<Complex> SensingMatrix::column_sums() const {
    std::vector<Complex> out(cols_);
    oracle_->column_sums(out);
    return out;
}

DGColumnIndex dg_split(const SensingMatrix& matrix, std::uint64_t j) {
    const DGSet* set = matrix.dg_set();
    if (!set) throw std::invalid_argument("dg_split: not a Delsarte-Goethals matrix");
    if (j >= matrix.cols()) throw std::out_of_range("dg_split: column index out of range");
    return {j >> set->m(), j & ((std::uint64_t{1} << set->m()) - 1)};
}

std::uint64_t dg_join(const SensingMatrix& matrix, DGColumnIndex idx) {
    const DGSet* set = matrix.dg_set();
    if (!set) throw std::invalid_argument("dg_join: not a Delsarte-Goethals matrix");
    if (idx.coeffs >= set->size() || idx.b >= (std::uint64_t{1} << set->m()))
        throw std::out_of_range("dg_join: index out of range");
    return (idx.coeffs << set->m()) | idx.b;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

SensingMatrix build_chirp(int p) {
    if (p < 3 || p > 1024) throw std::invalid_argument("params.p: must be in [3, 1024], got " + std::to_string(p));
    if (!is_prime(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("params.p: " + std::to_string(p) + " is not prime");
    MatrixSpec spec{Family::Chirp, json{{"p", p}}, 0};
    return SensingMatrix(std::make_shared<ChirpOracle>(p), spec, Family::Chirp);
}

SensingMatrix build_delsarte_goethals(int m, int r) {
    auto set = std::make_shared<const DGSet>(DGSet::delsarte_goethals(m, r));
    MatrixSpec spec{Family::DelsarteGoethals, json{{"m", m}, {"r", r}}, 0};
    return SensingMatrix(std::make_shared<DGOracle>(set), spec, Family::DelsarteGoethals, set);
}

SensingMatrix build_second_order_rm(int m) {
    auto set = std::make_shared<const DGSet>(DGSet::all_symmetric(m));
    MatrixSpec spec{Family::SecondOrderRM, json{{"m", m}}, 0};
    return SensingMatrix(std::make_shared<DGOracle>(set), spec, Family::SecondOrderRM, set);
}

SensingMatrix build_bch(int m, int t) {
    if (m < 4 || m > 14) throw std::invalid_argument("params.m: must be in [4, 14], got " + std::to_string(m));
    if (t < 2) throw std::invalid_argument("params.t: must be at least 2, got " + std::to_string(t));
    if (2 * t - 1 >= (1 << ((m + 1) / 2)))
        throw std::invalid_argument("params.t: 2t-1 must be below 2^ceil(m/2)");
    if (m * t > 62) throw std::invalid_argument("params.t: m*t must not exceed 62");
    MatrixSpec spec{Family::BCH, json{{"m", m}, {"t", t}}, 0};
    return SensingMatrix(std::make_shared<BCHOracle>(make_bch_tables(m, t)), spec, Family::BCH);
}

std::vector<std::size_t> bch_public_vector(int m, int t) {
    const SensingMatrix bch = build_bch(m, t);
    const auto& tab = static_cast<const BCHOracle&>(bch.oracle()).tables();
    return {tab.b0, tab.b1};
}

SensingMatrix build_partial_fourier(std::uint64_t C, std::size_t N, std::uint64_t seed) {
    if (C < 2 || C > (std::uint64_t{1} << 20)) throw std::invalid_argument("params.C: must be in [2, 2^20]");
    if (N < 1 || N >= C) throw std::invalid_argument("params.N: must satisfy 1 <= N < C");
    // Partial Fisher-Yates over the nonzero frequencies 1..C-1.
    std::vector<std::uint64_t> pool(C - 1);
    for (std::uint64_t i = 0; i < C - 1; ++i) pool[i] = i + 1;
    Rng rng(derive_seed(seed, 0));
    for (std::size_t i = 0; i < N; ++i) {
        const std::uint64_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    std::vector<std::uint64_t> rows(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(N));
    std::sort(rows.begin(), rows.end());
    MatrixSpec spec{Family::PartialFourier, json{{"C", C}, {"N", N}}, seed};
    return SensingMatrix(std::make_shared<PartialFourierOracle>(C, std::move(rows)), spec, Family::PartialFourier);
}

SensingMatrix build_gaussian(std::size_t N, std::uint64_t C, std::uint64_t seed) {
    if (N < 1 || C < 1) throw std::invalid_argument("params: N and C must be positive");
    MatrixSpec spec{Family::Gaussian, json{{"N", N}, {"C", C}}, seed};
    return SensingMatrix(std::make_shared<GaussianOracle>(N, C, seed), spec, Family::Gaussian);
}

SensingMatrix build_dense(std::vector<std::vector<Complex>> columns) {
    if (columns.empty()) throw std::invalid_argument("build_dense: no columns");
    const std::size_t n = columns.front().size();
    if (n == 0) throw std::invalid_argument("build_dense: empty columns");
    for (const auto& c : columns)
        if (c.size() != n) throw std::invalid_argument("build_dense: ragged columns");
    MatrixSpec spec{Family::Dense, json{{"N", n}, {"C", columns.size()}}, 0};
    return SensingMatrix(std::make_shared<DenseOracle>(n, std::move(columns)), spec, Family::Dense);
}

SensingMatrix subsample_columns(const SensingMatrix& base, std::uint64_t count, std::uint64_t seed) {
    if (count < 1 || count > base.cols()) throw std::invalid_argument("params.subsample: must be in [1, C]");
    // Floyd's algorithm: uniform count-subset without materializing [0, C).
    Rng rng(derive_seed(seed, kSubsampleStream));
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = base.cols() - count; j < base.cols(); ++j) {
        const std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> keep(chosen.begin(), chosen.end());
    std::sort(keep.begin(), keep.end());
    MatrixSpec spec = base.spec();
    spec.params["subsample"] = count;
    spec.seed = seed;
    return SensingMatrix(std::make_shared<SubsampledOracle>(base.oracle_ptr(), std::move(keep)), spec, base.family());
}

SensingMatrix build_from_spec(const MatrixSpec& spec) {
    SensingMatrix base = [&] {
        switch (spec.family) {
        case Family::Chirp: return build_chirp(param<int>(spec, "p"));
        case Family::DelsarteGoethals:
            return build_delsarte_goethals(param<int>(spec, "m"), spec.params.contains("r") ? param<int>(spec, "r") : 0);
        case Family::SecondOrderRM: return build_second_order_rm(param<int>(spec, "m"));
        case Family::BCH: return build_bch(param<int>(spec, "m"), param<int>(spec, "t"));
        case Family::PartialFourier:
            return build_partial_fourier(param<std::uint64_t>(spec, "C"), param<std::size_t>(spec, "N"), spec.seed);
        case Family::Gaussian:
            return build_gaussian(param<std::size_t>(spec, "N"), param<std::uint64_t>(spec, "C"), spec.seed);
        case Family::Dense: break;
        }
        throw std::invalid_argument("family: dense matrices cannot be built from a spec");
    }();
    if (spec.params.contains("subsample")) return subsample_columns(base, param<std::uint64_t>(spec, "subsample"), spec.seed);
    return base;
}

void export_csv(const SensingMatrix& matrix, std::ostream& os) {
    if (static_cast<double>(matrix.rows()) * static_cast<double>(matrix.cols()) > static_cast<double>(1 << 20))
        throw std::invalid_argument("export_csv: matrix too large to export");
    std::vector<std::vector<Complex>> cols;
    for (std::uint64_t j = 0; j < matrix.cols(); ++j) cols.push_back(matrix.column(j));
    os.precision(17);
    for (std::size_t x = 0; x < matrix.rows(); ++x) {
        for (std::uint64_t j = 0; j < matrix.cols(); ++j) {
            if (j) os << ',';
            os << cols[j][x].real() << ',' << cols[j][x].imag();
        }
        os << '\n';
    }
}

} // namespace stripcs
