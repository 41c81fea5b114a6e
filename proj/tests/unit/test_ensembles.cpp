#include "stripcs/ensembles.hpp"
#include "stripcs/rng.hpp"
#include "stripcs/stripcheck.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

using namespace stripcs;

namespace {

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}

TEST_SUITE("ensembles") {

TEST_CASE("chirp dimensions and columns") {
    const auto M = build_chirp(7);
    CHECK(M.rows() == 7);
    CHECK(M.cols() == 49);
    for (const auto& z : M.column(0)) CHECK(std::abs(z - 1.0) < 1e-15);
    const auto P5 = build_chirp(5);
    const Complex w = std::polar(1.0, 2 * std::numbers::pi / 5);
    const auto col = P5.column(1 * 5 + 0);  // (m=1, r=0): w^x
    for (int x = 0; x < 5; ++x) CHECK(std::abs(col[x] - std::pow(w, x)) < 1e-12);
    // (m=0, r=1): w^{1 + x^2}
    const auto c2 = P5.column(1);
    for (int x = 0; x < 5; ++x) CHECK(std::abs(c2[x] - std::pow(w, (1 + x * x) % 5)) < 1e-12);
    CHECK_THROWS_AS(build_chirp(9), std::invalid_argument);
    CHECK_THROWS_AS(M.column(49), std::out_of_range);
}

TEST_CASE("chirp row sums vanish") {
    const auto M = build_chirp(5);
    std::vector<Complex> rows(5);
    for (std::uint64_t j = 0; j < M.cols(); ++j) {
        const auto c = M.column(j);
        for (int x = 0; x < 5; ++x) rows[x] += c[x];
    }
    for (const auto& s : rows) CHECK(std::abs(s) < 1e-10);
}

TEST_CASE("Delsarte-Goethals dimensions and identity column") {
    const auto M = build_delsarte_goethals(3, 0);
    CHECK(M.rows() == 8);
    CHECK(M.cols() == 64);
    CHECK(build_delsarte_goethals(5, 1).cols() == (1u << 15));
    for (const auto& z : M.column(0)) CHECK(std::abs(z - 1.0) < 1e-15);
    CHECK_THROWS_AS(build_delsarte_goethals(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_delsarte_goethals(5, 3), std::invalid_argument);
}

TEST_CASE("DG column with P = 0 is a signed Walsh function") {
    const auto M = build_delsarte_goethals(3, 0);
    const auto col = M.column(dg_join(M, {0, 0b001}));
    for (std::uint64_t x = 0; x < 8; ++x) {
        const double walsh = (x & 1) ? -1.0 : 1.0;
        CHECK(std::abs(col[x] - (-walsh)) < 1e-15);  // initial phase i^2 = -1
    }
}

TEST_CASE("DG columns follow the Z4 form") {
    const auto M = build_delsarte_goethals(5, 1);
    const DGSet* set = M.dg_set();
    REQUIRE(set != nullptr);
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const std::uint64_t j = rng.below(M.cols());
        const auto [c, b] = dg_split(M, j);
        const auto P = set->matrix(c);
        const auto col = M.column(j);
        for (std::uint64_t x = 0; x < 32; ++x) {
            const int e = P.diagonal().weight() + 2 * std::popcount(b) + z4_form_eval(P, BinaryVector(b, 5), BinaryVector(x, 5)).value();
            CHECK(std::abs(col[x] - Z4Value(e).power_of_i()) < 1e-15);
        }
    }
}

TEST_CASE("unimodular entries, tight frame and distinct columns on small instances") {
    for (const auto& M : {build_chirp(5), build_delsarte_goethals(3, 0), build_delsarte_goethals(3, 1), build_bch(4, 2)}) {
        const std::size_t N = M.rows();
        std::vector<std::vector<Complex>> cols;
        for (std::uint64_t j = 0; j < M.cols(); ++j) {
            cols.push_back(M.column(j));
            for (const auto& z : cols.back()) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
        }
        for (std::size_t x = 0; x < N; ++x)
            for (std::size_t y = 0; y < N; ++y) {
                Complex s = 0.0;
                for (const auto& c : cols) s += c[x] * std::conj(c[y]);
                CHECK(std::abs(s - (x == y ? static_cast<double>(M.cols()) : 0.0)) < 1e-9);
            }
        for (std::size_t a = 0; a < cols.size(); ++a)
            for (std::size_t b = a + 1; b < cols.size(); ++b) {
                Complex s = 0.0;
                for (std::size_t x = 0; x < N; ++x) s += std::conj(cols[a][x]) * cols[b][x];
                CHECK(std::abs(s - static_cast<double>(N)) > 1e-6);
            }
    }
}

TEST_CASE("product and conjugate indices are exact") {
    for (const auto& M : {build_chirp(7), build_delsarte_goethals(3, 1), build_bch(4, 2)}) {
        Rng rng(2);
        for (int t = 0; t < 200; ++t) {
            const std::uint64_t a = rng.below(M.cols()), b = rng.below(M.cols());
            const auto p = M.product_index(a, b);
            REQUIRE(p.has_value());
            const auto ca = M.column(a), cb = M.column(b), cp = M.column(*p);
            for (std::size_t x = 0; x < M.rows(); ++x) CHECK(std::abs(ca[x] * cb[x] - cp[x]) < 1e-12);
            const auto q = M.conjugate_index(a);
            REQUIRE(q.has_value());
            const auto cq = M.column(*q);
            for (std::size_t x = 0; x < M.rows(); ++x) CHECK(std::abs(std::conj(ca[x]) - cq[x]) < 1e-12);
        }
    }
}

TEST_CASE("BCH column sums match the reference weight distribution") {
    // |N - 2 wt(c)|^2 histogram over the 4096 codewords, from tests/oracles/derive_values.py.
    const std::map<long, std::uint64_t> expected = {{0, 1071}, {64, 2688}, {256, 336}, {4096, 1}};
    const auto M = build_bch(6, 2);
    CHECK(M.rows() == 64);
    CHECK(M.cols() == 4096);
    std::map<long, std::uint64_t> got;
    for (const auto& s : M.column_sums()) ++got[std::lround(std::norm(s))];
    CHECK(got == expected);
    for (const auto& z : M.column(0)) CHECK(std::abs(z - 1.0) < 1e-15);
    // Non-zero codeword weights lie in [24, 40].
    for (const auto& [s2, n] : got)
        if (s2 != 4096) CHECK(s2 <= 8 * 8 * 4);
    CHECK_THROWS_AS(build_bch(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_bch(6, 5), std::invalid_argument);
}

TEST_CASE("partial Fourier") {
    const auto M = build_partial_fourier(64, 16, 3);
    CHECK(M.rows() == 16);
    CHECK(M.cols() == 64);
    for (const auto& z : M.column(0)) CHECK(z == Complex(1.0));
    CertifyOptions opt;
    const auto cert = certify(M, opt);
    CHECK(cert.st1_row_orthogonality_pass);
    CHECK(cert.st1_row_sum_pass);
    CHECK(cert.st2_pass);
    CHECK_THROWS_AS(build_partial_fourier(16, 16, 0), std::invalid_argument);
    // Same seed, same rows.
    const auto again = build_partial_fourier(64, 16, 3);
    CHECK(max_abs_diff(M.column(5), again.column(5)) == 0.0);
}

TEST_CASE("Gaussian baseline statistics and determinism") {
    const auto M = build_gaussian(512, 4096, 7);
    double sum = 0.0, n = 0.0;
    for (std::uint64_t j = 0; j < 2000; ++j)
        for (const auto& z : M.column(j)) {
            sum += z.real();
            n += 1;
        }
    CHECK(std::abs(sum / n) < 0.005);
    // Real entries: norm^2 / N has standard deviation sqrt(2/512) = 0.0625 per column.
    double mean_ratio = 0.0;
    int close = 0;
    for (std::uint64_t j = 0; j < 1000; ++j) {
        double e = 0.0;
        for (const auto& z : M.column(j)) e += std::norm(z);
        mean_ratio += e / 512.0 / 1000.0;
        close += std::abs(e / 512.0 - 1.0) < 0.1;
    }
    CHECK(std::abs(mean_ratio - 1.0) < 0.01);
    CHECK(close >= 850);
    const auto again = build_gaussian(512, 4096, 7);
    CHECK(max_abs_diff(M.column(123), again.column(123)) == 0.0);
    CHECK_FALSE(M.unimodular());
}

TEST_CASE("fast apply and column sums agree with the dense defaults") {
    for (const auto& M : {build_delsarte_goethals(3, 1), build_chirp(5), build_bch(4, 2)}) {
        Rng rng(4);
        std::vector<Complex> coeffs(M.cols());
        for (auto& z : coeffs) z = Complex(rng.normal(), rng.normal());
        std::vector<Complex> dense(M.rows());
        std::vector<Complex> sums(M.cols());
        for (std::uint64_t j = 0; j < M.cols(); ++j) {
            const auto c = M.column(j);
            for (std::size_t x = 0; x < M.rows(); ++x) {
                dense[x] += coeffs[j] * c[x];
                sums[j] += c[x];
            }
        }
        CHECK(max_abs_diff(M.apply(coeffs), dense) < 1e-9);
        CHECK(max_abs_diff(M.column_sums(), sums) < 1e-9);
    }
}

TEST_CASE("spec round trip and construction") {
    MatrixSpec spec;
    spec.family = Family::DelsarteGoethals;
    spec.params = {{"m", 5}, {"r", 1}};
    const auto back = MatrixSpec::from_json(spec.to_json());
    CHECK(back == spec);
    CHECK(build_from_spec(back).cols() == (1u << 15));
    CHECK_THROWS_AS(MatrixSpec::from_json(nlohmann::json{{"params", {}}}), std::invalid_argument);
    CHECK(parse_family("kerdock") == Family::DelsarteGoethals);
    CHECK_THROWS_AS(parse_family("nope"), std::invalid_argument);
}

TEST_CASE("column subsampling") {
    const auto base = build_delsarte_goethals(5, 0);
    const auto sub = subsample_columns(base, 100, 9);
    CHECK(sub.cols() == 100);
    CHECK(sub.rows() == 32);
    for (const auto& z : sub.column(0)) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
    CHECK_THROWS_AS(subsample_columns(base, 2000, 9), std::invalid_argument);
}

TEST_CASE("CSV export of a tiny matrix") {
    std::ostringstream os;
    export_csv(build_chirp(3), os);
    std::istringstream in(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        CHECK(std::count(line.begin(), line.end(), ',') == 2 * 9 - 1);
    }
    CHECK(lines == 3);
}

}
