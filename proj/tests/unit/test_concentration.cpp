#include "stripcs/concentration.hpp"
#include "stripcs/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace stripcs;

TEST_SUITE("concentration") {

TEST_CASE("distinct tuples are distinct with uniform marginals") {
    const DistinctTupleSampler s(50, 10);
    Rng rng(1);
    std::vector<std::vector<int>> freq(10, std::vector<int>(50, 0));
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) {
        const auto tup = s.sample(rng);
        CHECK(std::set<std::uint64_t>(tup.begin(), tup.end()).size() == 10);
        for (int i = 0; i < 10; ++i) ++freq[i][tup[i]];
    }
    const double p = 1.0 / 50.0, sd = std::sqrt(draws * p * (1 - p));
    for (const auto& row : freq)
        for (int f : row) CHECK(std::abs(f - draws * p) < 4.5 * sd);
    std::vector<std::uint64_t> out(10);
    for (int t = 0; t < 1000; ++t) {
        s.sample_excluding(rng, 7, out);
        CHECK(std::find(out.begin(), out.end(), 7u) == out.end());
    }
    CHECK_THROWS_AS(DistinctTupleSampler(3, 4), std::invalid_argument);
}

TEST_CASE("McDiarmid bound") {
    const double c2[] = {1.0, 1.0};
    CHECK(mcdiarmid_bound(c2, 0.0) == 2.0);
    CHECK(mcdiarmid_bound(c2, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
    const double c3[] = {0.5, 2.0, 1.0}, c3p[] = {2.0, 1.0, 0.5};
    CHECK(mcdiarmid_bound(c3, 1.3) == mcdiarmid_bound(c3p, 1.3));
    const double bad[] = {1.0, 0.0};
    CHECK_THROWS_AS(mcdiarmid_bound(bad, 1.0), std::invalid_argument);
}

TEST_CASE("the isometry application reproduces the energy exponent") {
    // c_l = 4 N^{-eta/2} |a_l| sum_{j != l} |a_j| gives exp(-2 b^2 N^eta / (16 sum_l |a_l|^2 (sum_{j!=l} |a_j|)^2)).
    const double a[] = {1.0, 0.5, 2.0};
    const double N = 512, eta = 1, beta = 0.3;
    std::vector<double> c;
    double denom = 0.0;
    for (int l = 0; l < 3; ++l) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j)
            if (j != l) s += a[j];
        c.push_back(4 * std::pow(N, -eta / 2) * a[l] * s);
        denom += a[l] * a[l] * s * s;
    }
    CHECK(mcdiarmid_bound(c, beta) == doctest::Approx(2 * std::exp(-2 * beta * beta * std::pow(N, eta) / (16 * denom))));
}

TEST_CASE("Hoeffding helpers") {
    CHECK(hoeffding_bound(1.0, 2.0, 2.0) == 1.0);
    CHECK(hoeffding_bound(0.5, -1.0, 1.0) == doctest::Approx(std::exp(0.125)));
    double prev = hoeffding_bound(1.0, -1.0, 1.0);
    for (double t : {0.5, 0.1, 0.01, 0.001}) {
        const double v = hoeffding_bound(t, -1.0, 1.0);
        CHECK(v < prev);
        CHECK(v >= 1.0);
        prev = v;
    }
    CHECK_THROWS_AS(hoeffding_bound(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hoeffding_bound(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK(partial_fourier_column_bound(256, 32, std::sqrt(std::log(256.0) / 32)) == doctest::Approx(0.015625));
}

TEST_CASE("incomplete gamma and chi tails against high-precision values") {
    // mpmath reference values from tests/oracles/derive_values.py.
    CHECK(regularized_gamma_q(0.5, 0.3) == doctest::Approx(0.43857802608099986).epsilon(1e-10));
    CHECK(regularized_gamma_q(3, 2) == doctest::Approx(0.67667641618306346).epsilon(1e-10));
    CHECK(regularized_gamma_q(7.5, 12) == doctest::Approx(0.065093486398830613).epsilon(1e-10));
    CHECK(regularized_gamma_q(100, 90) == doctest::Approx(0.84177901081356983).epsilon(1e-10));
    CHECK(gaussian_tail_S(0, 7) == 1.0);
    CHECK(gaussian_tail_S(1, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(gaussian_tail_S(3, 10) == doctest::Approx(0.53210357637471548).epsilon(1e-10));
    CHECK(gaussian_tail_S(25, 512) == doctest::Approx(0.00044850053602862318).epsilon(1e-10));
    CHECK(gaussian_tail_S(0.5, 1) == doctest::Approx(0.61707507745197379).epsilon(1e-10));
    CHECK(gaussian_tail_S(2, 20) == doctest::Approx(0.99995350192498274).epsilon(1e-10));
    CHECK_THROWS_AS(gaussian_tail_S(-1, 2), std::invalid_argument);
}

TEST_CASE("chi tail is monotone and bounded") {
    for (double dof : {1.0, 2.0, 10.0, 100.0}) {
        double prev = 1.0;
        for (double r = 0.0; r < 20.0; r += 0.25) {
            const double s = gaussian_tail_S(r, dof);
            CHECK(s >= 0.0);
            CHECK(s <= prev + 1e-15);
            prev = s;
        }
    }
}

TEST_CASE("noise bound probability") {
    CHECK(noise_bound_probability(0.3, 0.1, 1e-9, 1.0, 1024, 0.05) == doctest::Approx(0.9));
    CHECK(noise_bound_probability(0.3, 0.0, 0.1, 1.0, 1024, 0.001) == 0.0);
    CHECK_THROWS_AS(noise_bound_probability(0.3, 0.1, 0.0, 1.0, 1024, 0.05), std::invalid_argument);
}

TEST_CASE("empirical McDiarmid on a labelled coordinate sum") {
    std::vector<int> label(1000);
    for (std::size_t j = 0; j < label.size(); ++j) label[j] = (derive_seed(3, j) & 1) ? 1 : -1;
    const TupleFunction fn = [&](std::span<const std::uint64_t> t) {
        double s = 0.0;
        for (auto j : t) s += label[j];
        return s;
    };
    const std::vector<double> c(20, 2.0);
    const double gammas[] = {4, 8, 12};
    const auto rep = mcdiarmid_empirical(fn, 1000, 20, c, gammas, 20000, 4);
    CHECK(rep.pass);
    CHECK(rep.max_probe_ratio <= 1.0);
    const std::vector<double> tight(20, 1.0);
    CHECK_THROWS_AS(mcdiarmid_empirical(fn, 1000, 20, tight, gammas, 100, 4), std::invalid_argument);
    const TupleFunction constant = [](std::span<const std::uint64_t>) { return 3.0; };
    const auto flat = mcdiarmid_empirical(constant, 1000, 20, c, gammas, 1000, 4);
    for (const auto& t : flat.tails) CHECK(t.empirical == 0.0);
}

TEST_CASE("binomial sigma") {
    CHECK(binomial_sigma(0.5, 100) == doctest::Approx(0.05));
    CHECK(binomial_sigma(2.0, 100) == 0.0);
}

}
