#include "stripcs/recon.hpp"
#include "stripcs/rng.hpp"
#include "stripcs/wht.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace stripcs;

namespace {

double norm2(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

}

TEST_SUITE("recon") {

TEST_CASE("signal sampling") {
    CHECK(sample_signal(64, 0, ValueModel::UnitSphere, 1).k() == 0);
    const auto a = sample_signal(64, 5, ValueModel::RandomPhase, 3), b = sample_signal(64, 5, ValueModel::RandomPhase, 3);
    CHECK(a.entries() == b.entries());
    for (const auto& v : a.values()) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    CHECK(sample_signal(64, 5, ValueModel::UnitSphere, 4).norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(sample_signal(4, 5, ValueModel::UnitSphere, 1), std::invalid_argument);
    CHECK_THROWS_AS(SparseSignal(8, {{1, 1.0}, {1, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(SparseSignal(8, {{9, 1.0}}), std::invalid_argument);
}

TEST_CASE("supports are uniform over pairs") {
    // 10^4 draws of 2-subsets of 64; each of the 2016 pairs is roughly Poisson(4.96).
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> count;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const auto s = sample_signal(64, 2, ValueModel::UnitSphere, derive_seed(77, t));
        ++count[{s.indices()[0], s.indices()[1]}];
    }
    const double expect = draws / 2016.0;
    double chi2 = 0.0;
    for (std::uint64_t a = 0; a < 64; ++a)
        for (std::uint64_t b = a + 1; b < 64; ++b) {
            const double o = count.count({a, b}) ? count[{a, b}] : 0;
            chi2 += (o - expect) * (o - expect) / expect;
        }
    // 2015 degrees of freedom: mean 2015, sd about 63.5.
    CHECK(std::abs(chi2 - 2015.0) < 4.0 * 63.5);
}

TEST_CASE("measurement basics") {
    const auto M = build_delsarte_goethals(5, 0);
    const auto zero = measure(M, SparseSignal(M.cols(), {}), {}, 0);
    CHECK(norm2(zero.f) == 0.0);
    const auto one = measure(M, SparseSignal(M.cols(), {{77, Complex(1.0)}}), {}, 0);
    CHECK(norm2(one.f) == doctest::Approx(1.0).epsilon(1e-14));
    const auto noisy = measure(M, SparseSignal(M.cols(), {{77, Complex(1.0)}}), {NoiseKind::MeasurementGaussian, 0.1}, 5);
    CHECK(noisy.noise_norm > 0);
    CHECK_THROWS_AS(measure(M, SparseSignal(10, {}), {}, 0), std::invalid_argument);
}

TEST_CASE("signal-domain noise covariance") {
    // nu = N^{-1/2} Phi mu with mu ~ CN(0, 2 sigma^2 I_C): E[nu(x) conj nu(x')] = 2 sigma^2 (C/N) delta.
    const auto M = build_delsarte_goethals(3, 0);
    const double sigma = 0.5;
    const int draws = 10000;
    std::vector<Complex> cov(8 * 8);
    for (int t = 0; t < draws; ++t) {
        const auto me = measure(M, SparseSignal(M.cols(), {}), {NoiseKind::SignalGaussian, sigma}, derive_seed(1, t));
        for (int x = 0; x < 8; ++x)
            for (int y = 0; y < 8; ++y) cov[x * 8 + y] += me.nu[x] * std::conj(me.nu[y]);
    }
    const double target = 2 * sigma * sigma * 64.0 / 8.0;
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            const Complex c = cov[x * 8 + y] / static_cast<double>(draws);
            // Standard error of a product of two CN(0, target) variables averaged over draws.
            const double tol = 4.0 * target / std::sqrt(static_cast<double>(draws)) * (x == y ? 1.0 : 1.0);
            CHECK(std::abs(c - (x == y ? target : 0.0)) < tol);
        }
}

TEST_CASE("shift multiply") {
    const auto M = build_delsarte_goethals(5, 1);
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        const std::uint64_t j = rng.below(M.cols());
        const auto f = M.column(j);
        const auto g0 = shift_multiply(f, BinaryVector(0, 5));
        for (std::size_t x = 0; x < 32; ++x) CHECK(std::abs(g0[x] - std::norm(f[x])) < 1e-15);
        const BinaryVector a(rng.below(31) + 1, 5);
        auto g = shift_multiply(f, a);
        for (const auto& z : g) CHECK(std::abs(z) <= 1.0 + 1e-12);
        fwht(std::span<Complex>(g));
        const auto P = M.dg_set()->matrix(dg_split(M, j).coeffs);
        const std::uint64_t peak = P.left_multiply(a).bits();
        for (std::uint64_t l = 0; l < 32; ++l) {
            if (l == peak) CHECK(std::abs(g[l]) == doctest::Approx(32.0));
            else CHECK(std::abs(g[l]) < 1e-9);
        }
    }
    CHECK_THROWS_AS(shift_multiply(std::vector<Complex>(6), BinaryVector(1, 3)), std::invalid_argument);
}

TEST_CASE("single columns are recovered exactly, exhaustively at m=3") {
    const auto M = build_delsarte_goethals(3, 0);
    ReconOptions opt;
    for (std::uint64_t j = 0; j < M.cols(); ++j) {
        const SparseSignal a(M.cols(), {{j, Complex(1.0)}});
        const auto res = quadratic_reconstruct(M, measure(M, a, {}, 0).f, opt);
        CHECK(recovery_matches(a, res.estimate, 1e-9));
        CHECK(res.residual_norm < 1e-9);
        CHECK(res.log.size() == 1);
    }
}

TEST_CASE("single columns at m=5, every association mode") {
    for (int r : {0, 1}) {
        const auto M = build_delsarte_goethals(5, r);
        Rng rng(8);
        for (auto assoc : {Association::Score, Association::Peaks}) {
            ReconOptions opt;
            opt.association = assoc;
            opt.offsets = assoc == Association::Peaks ? OffsetSet::Unit : OffsetSet::All;
            for (int t = 0; t < 40; ++t) {
                const SparseSignal a(M.cols(), {{rng.below(M.cols()), std::polar(1.0, rng.uniform() * 6.28)}});
                const auto res = quadratic_reconstruct(M, measure(M, a, {}, 0).f, opt);
                CHECK(recovery_matches(a, res.estimate, 1e-9));
                CHECK(res.log.size() == 1);
            }
        }
    }
}

TEST_CASE("zero measurement and bad inputs") {
    const auto M = build_delsarte_goethals(5, 0);
    const auto res = quadratic_reconstruct(M, std::vector<Complex>(32), ReconOptions{});
    CHECK(res.estimate.k() == 0);
    CHECK(res.log.empty());
    CHECK_THROWS_AS(quadratic_reconstruct(build_chirp(5), std::vector<Complex>(5), ReconOptions{}), std::invalid_argument);
    ReconOptions bad;
    bad.k_max = 0;
    CHECK_THROWS_AS(quadratic_reconstruct(M, std::vector<Complex>(32), bad), std::invalid_argument);
}

TEST_CASE("peeling conserves energy and decreases the residual") {
    const auto M = build_delsarte_goethals(9, 0);
    ReconOptions opt;
    opt.k_max = 10;
    opt.refit = Refit::None;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto a = sample_signal(M.cols(), 10, ValueModel::RandomPhase, s);
        const auto res = quadratic_reconstruct(M, measure(M, a, {}, 0).f, opt);
        for (const auto& it : res.log) {
            CHECK(it.residual_after < it.residual_before);
            CHECK(std::abs(it.residual_before * it.residual_before - std::norm(it.beta) -
                           it.residual_after * it.residual_after) < 1e-9);
        }
    }
}

TEST_CASE("moderate sparsity at m=9 is recovered and deterministic") {
    const auto M = build_delsarte_goethals(9, 0);
    ReconOptions opt;
    opt.k_max = 10;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto a = sample_signal(M.cols(), 10, ValueModel::RandomPhase, s);
        const auto f = measure(M, a, {}, 0).f;
        const auto r1 = quadratic_reconstruct(M, f, opt), r2 = quadratic_reconstruct(M, f, opt);
        CHECK(recovery_matches(a, r1.estimate, 1e-6));
        CHECK(r1.estimate.entries() == r2.estimate.entries());
    }
}

TEST_CASE("options round trip") {
    ReconOptions o;
    o.k_max = 7;
    o.association = Association::Peaks;
    o.refit = Refit::Every;
    o.offsets = OffsetSet::Unit;
    const auto back = ReconOptions::from_json(o.to_json());
    CHECK(back.k_max == 7);
    CHECK(back.association == Association::Peaks);
    CHECK(back.refit == Refit::Every);
    CHECK(back.offsets == OffsetSet::Unit);
    CHECK_THROWS_AS(ReconOptions::from_json(nlohmann::json{{"refit", "sometimes"}}), std::invalid_argument);
}

TEST_CASE("cross-term energy") {
    const auto M = build_delsarte_goethals(7, 0);
    const std::vector<Complex> one = {1.0};
    const auto r1 = crossterm_energy_check(M, one, BinaryVector(1, 7), 50, 1);
    CHECK(r1.target == 0.0);
    CHECK(r1.pooled_mean < 1e-18);
    const std::vector<Complex> two = {1.0, Complex(0, 1)};
    const auto r2 = crossterm_energy_check(M, two, BinaryVector(3, 7), 2000, 2);
    CHECK(r2.target == doctest::Approx(2.0));
    CHECK(std::abs(r2.pooled_mean / r2.target - 1.0) < 0.1);
}

TEST_CASE("error bound") {
    CHECK(error_bound(0.0, 0.0, 0.3) == 0.0);
    CHECK(error_bound(0.0, 0.25, 0.0) == doctest::Approx(0.5));
    CHECK(error_bound(1.0, 0.0, 0.5) == doctest::Approx(11.0));
    CHECK_THROWS_AS(error_bound(0.0, 0.0, 1.0), std::invalid_argument);
    const SparseSignal a(16, {{1, 1.0}, {2, 0.01}}), ak(16, {{1, 1.0}});
    CHECK(error_bound(a, ak, 0.0, 0.0) == doctest::Approx(0.05));
}

TEST_CASE("noise names") {
    for (auto k : {NoiseKind::None, NoiseKind::MeasurementGaussian, NoiseKind::SignalGaussian})
        CHECK(parse_noise_kind(noise_kind_name(k)) == k);
    CHECK_THROWS_AS(parse_noise_kind("pink"), std::invalid_argument);
}

}
