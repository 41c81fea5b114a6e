#include "stripcs/concentration.hpp"
#include "stripcs/stripcheck.hpp"

#include <doctest.h>

#include <cmath>

using namespace stripcs;

TEST_SUITE("stripcheck") {

TEST_CASE("certificates of the structured families") {
    for (int p : {5, 7}) {
        const auto cert = certify(build_chirp(p));
        CHECK(cert.all_pass());
        CHECK(cert.st3_eta == doctest::Approx(1.0));
        for (const auto& [v, n] : cert.column_sum_sq_values) CHECK((v == 0.0 || std::abs(v - p) < 1e-6));
    }
    const auto dg = certify(build_delsarte_goethals(3, 0));
    CHECK(dg.all_pass());
    for (const auto& [v, n] : dg.column_sum_sq_values) CHECK((v == 0.0 || std::abs(v - 8.0) < 1e-6));
    const auto dg51 = certify(build_delsarte_goethals(5, 1));
    CHECK(dg51.all_pass());
    CHECK(dg51.st3_eta == doctest::Approx(1.0 - 2.0 / 5.0));
    CHECK(dg51.max_column_sum_sq == doctest::Approx(128.0));
}

TEST_CASE("a repeated column fails the group check with a witness") {
    const auto base = build_chirp(3);
    std::vector<std::vector<Complex>> cols;
    for (std::uint64_t j = 0; j < base.cols(); ++j) cols.push_back(base.column(j));
    cols.push_back(base.column(4));
    const auto cert = certify(build_dense(cols));
    CHECK_FALSE(cert.st2_pass);
    CHECK(cert.st2_witness.has_value());
    CHECK_FALSE(cert.all_pass());
}

TEST_CASE("sampled certification agrees on a structured family") {
    CertifyOptions opt;
    opt.mode = CertifyMode::Sampled;
    opt.seed = 4;
    const auto cert = certify(build_delsarte_goethals(7, 0), opt);
    CHECK(cert.all_pass());
    CHECK(cert.st3_eta == doctest::Approx(1.0));
}

TEST_CASE("closure prediction on DG m=3") {
    const auto rep = closure_prediction_check(build_delsarte_goethals(3, 0));
    CHECK(rep.pairs == 64u * 64u);
    CHECK(rep.mismatches == 0);
}

TEST_CASE("strip_delta reference values") {
    // High-precision values from tests/oracles/derive_values.py.
    CHECK(strip_delta(512, 262144, 10, 0.5, 1).value == doctest::Approx(0.40388176708503979).epsilon(1e-12));
    CHECK(strip_delta(512, 262144, 1, 0.5, 1).value == doctest::Approx(2.0 * std::exp(-16.0)).epsilon(1e-12));
    const auto v = strip_delta(512, 262144, 3, 2.0 / 262143.0, 1);
    CHECK(v.vacuous);
    CHECK(v.value == 2.0);
    CHECK_THROWS_AS(strip_delta(512, 262144, 3, 0.5, 2.5), std::invalid_argument);
}

TEST_CASE("strip_delta is monotone in N and k") {
    for (double eps : {0.2, 0.5}) {
        double prev = 3.0;
        for (double N : {64.0, 128.0, 256.0, 512.0}) {
            const double d = strip_delta(N, 1e6, 4, eps, 1).value;
            CHECK(d < prev);
            prev = d;
        }
        prev = 0.0;
        for (double k : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const double d = strip_delta(512, 1e6, k, eps, 1).value;
            CHECK(d > prev);
            prev = d;
        }
    }
}

TEST_CASE("sharpened bound") {
    CHECK(strip_delta_sharpened(512, 262144, 1, 0.5, 2, 4).value == doctest::Approx(0.036637985727690681).epsilon(1e-12));
    const double spike = strip_delta_sharpened(512, 262144, 1, 0.5, 1, 4).value;
    CHECK(spike == doctest::Approx(2.2512530496246333e-7).epsilon(1e-12));
    CHECK(spike < strip_delta_sharpened(512, 262144, 1, 0.5, 2, 4).value);
    // rho = sqrt(k) is the flat worst case; it matches the main bound up to the centering term.
    const double flat = strip_delta_sharpened(512, 262144, 1, 0.5, 2, 4).value;
    CHECK(flat == doctest::Approx(strip_delta(512, 262144, 4, 0.5, 1).value).epsilon(1e-4));
    CHECK_THROWS_AS(strip_delta_sharpened(512, 262144, 1, 0.5, 3, 4), std::invalid_argument);
    CHECK_THROWS_AS(strip_delta_sharpened(512, 262144, 1, 0.5, 0.5, 4), std::invalid_argument);
}

TEST_CASE("coherence mean and threshold") {
    CHECK(coherence_mean(5, 25, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(coherence_threshold(512, 262144, 4, 1, 0.1) ==
          doctest::Approx(coherence_mean(512, 262144, 4) + std::sqrt(8.0 * std::log(262144 / 0.1)) / 512.0));
}

TEST_CASE("exact energy enumeration on chirp p=5") {
    // Full enumeration in tests/oracles/derive_values.py.
    const auto M = build_chirp(5);
    const std::vector<Complex> ones = {1.0, 1.0};
    const auto e = expected_energy(M, ones, EnergyMode::Exact);
    CHECK(e.mean == doctest::Approx(1.916666666666667).epsilon(1e-12));
    CHECK(e.mean >= (1.0 - 1.0 / 24.0) * 2.0 - 1e-12);
    CHECK(e.mean <= (1.0 + 1.0 / 24.0) * 2.0 + 1e-12);
    const std::vector<Complex> vals = {Complex(1, 0.5), Complex(-0.3, 2)};
    const auto e2 = expected_energy(M, vals, EnergyMode::Exact);
    CHECK(e2.mean == doctest::Approx(5.2816666666666405).epsilon(1e-12));
    CHECK(e2.mean == doctest::Approx(5.34 * expected_energy_closed_form(vals, 25)).epsilon(1e-12));
    const auto mc = expected_energy(M, vals, EnergyMode::MonteCarlo, 100000, 3);
    CHECK(std::abs(mc.mean - e2.mean) <= 3.0 * mc.standard_error);
    const std::vector<Complex> one = {Complex(0.6, 0.8)};
    CHECK(expected_energy(M, one, EnergyMode::Exact).mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact coherence enumeration on chirp p=5") {
    const auto M = build_chirp(5);
    CHECK(coherence_exact_mean(M, 3, 7) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(coherence_exact_mean(M, 0, 7) == 0.0);
    CHECK(std::abs(coherence_exact_mean(M, 2, 3) - coherence_mean(5, 25, 2)) < 1e-12);
}

TEST_CASE("Monte-Carlo isometry and coherence") {
    const auto M = build_delsarte_goethals(7, 0);
    const auto zero = strip_montecarlo(M, 3, 0.0, ValueModel::UnitSphere, 200, 1);
    CHECK(zero.failure_rate > 0.95);
    const auto mc = strip_montecarlo(M, 5, 0.5, ValueModel::UnitSphere, 2000, 2);
    const auto d = strip_delta(128, 16384, 5, 0.5, 1);
    CHECK(mc.failure_rate <= d.value + 3.0 * binomial_sigma(d.value, 2000));
    // Trials are independent of the thread count.
    const auto mc4 = strip_montecarlo(M, 5, 0.5, ValueModel::UnitSphere, 2000, 2, 4);
    CHECK(mc4.trials.size() == mc.trials.size());
    for (std::size_t t = 0; t < mc.trials.size(); ++t) CHECK(mc4.trials[t].distortion == mc.trials[t].distortion);

    CoherenceOptions opt;
    opt.trials = 5000;
    opt.seed = 3;
    const auto st = coherence_stats(M, 8, opt);
    CHECK(std::abs(st.mean - coherence_mean(128, 16384, 8)) <= 3.0 * st.standard_error + 1e-12);
    CoherenceOptions all = opt;
    all.policy = WPolicy::All;
    all.trials = 50;
    const auto sa = coherence_stats(M, 4, all);
    CHECK(sa.mean >= coherence_mean(128, 16384, 4));
}

TEST_CASE("all-w coherence fast path matches direct evaluation") {
    const auto M = build_delsarte_goethals(3, 0);
    CoherenceOptions all;
    all.policy = WPolicy::All;
    all.trials = 20;
    all.seed = 8;
    const auto fast = coherence_stats(M, 3, all);
    // A full-size subsample keeps the column order but hides the DG structure.
    const auto sub = subsample_columns(M, M.cols(), 0);
    REQUIRE(sub.dg_set() == nullptr);
    const auto slow = coherence_stats(sub, 3, all);
    REQUIRE(slow.samples.size() == fast.samples.size());
    for (std::size_t t = 0; t < fast.samples.size(); ++t) CHECK(std::abs(fast.samples[t] - slow.samples[t]) < 1e-12);
}

TEST_CASE("condition numbers") {
    const auto M = build_delsarte_goethals(5, 0);
    const std::size_t ks[] = {1, 4, 8};
    const auto r = condition_experiment(M, ks, 30, 1);
    REQUIRE(r.summary.size() == 3);
    CHECK(r.summary[0].mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.summary[0].std == doctest::Approx(0.0).epsilon(1e-12));
    for (const auto& s : r.summary) CHECK(s.infinite == 0);
    CHECK(r.rows.size() == 90);
    const std::uint64_t dup[] = {3, 3};
    CHECK(std::isinf(gram_condition_number(M, dup)));
}

TEST_CASE("brute-force uniqueness") {
    const auto M = build_chirp(5);
    CHECK(uniqueness_bruteforce(M, SparseSignal(25, {{7, Complex(1.0)}})));
    const auto base = build_chirp(3);
    std::vector<std::vector<Complex>> cols;
    for (std::uint64_t j = 0; j < base.cols(); ++j) cols.push_back(base.column(j));
    cols.push_back(base.column(2));
    const auto D = build_dense(cols);
    CHECK_FALSE(uniqueness_bruteforce(D, SparseSignal(10, {{2, Complex(1.0)}})));
    CHECK_THROWS_AS(uniqueness_bruteforce(build_delsarte_goethals(5, 0), SparseSignal(1024, {{1, Complex(1.0)}})),
                    std::invalid_argument);
}

TEST_CASE("certificate JSON carries every check") {
    const auto j = certify(build_chirp(5)).to_json();
    for (const char* key : {"st1_row_orthogonality_pass", "st1_row_sum_pass", "st2_pass", "st3_pass", "st3_eta"})
        CHECK(j.contains(key));
}

}
