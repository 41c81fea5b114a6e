#include "stripcs/concentration.hpp"

#include "stripcs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace stripcs {

DistinctTupleSampler::DistinctTupleSampler(std::uint64_t ground, std::size_t length)
    : ground_(ground), length_(length) {
    if (length > ground)
        throw std::invalid_argument("DistinctTupleSampler: tuple length " + std::to_string(length) +
                                    " exceeds ground set size " + std::to_string(ground));
}

void DistinctTupleSampler::sample_into(Rng& rng, std::span<std::uint64_t> out) const {
    if (out.size() != length_) throw std::invalid_argument("DistinctTupleSampler: output length mismatch");
    // Virtual array a[i] = i with the swaps recorded sparsely.
    std::unordered_map<std::uint64_t, std::uint64_t> moved;
    moved.reserve(2 * length_);
    auto value_at = [&](std::uint64_t i) {
        const auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };
    for (std::size_t i = 0; i < length_; ++i) {
        const std::uint64_t j = i + rng.below(ground_ - i);
        const std::uint64_t vi = value_at(i);
        const std::uint64_t vj = value_at(j);
        out[i] = vj;
        moved[j] = vi;
        moved[i] = vj;
    }
}

std::vector<std::uint64_t> DistinctTupleSampler::sample(Rng& rng) const {
    std::vector<std::uint64_t> out(length_);
    sample_into(rng, out);
    return out;
}

void DistinctTupleSampler::sample_excluding(Rng& rng, std::uint64_t excluded, std::span<std::uint64_t> out) const {
    if (excluded >= ground_) throw std::out_of_range("sample_excluding: excluded element out of range");
    if (length_ > ground_ - 1) throw std::invalid_argument("sample_excluding: tuple longer than the remaining set");
    DistinctTupleSampler inner(ground_ - 1, length_);
    inner.sample_into(rng, out);
    for (auto& v : out)
        if (v >= excluded) ++v;
}

double mcdiarmid_bound(std::span<const double> c, double gamma) {
    if (gamma < 0) throw std::invalid_argument("mcdiarmid_bound: gamma must be non-negative");
    if (c.empty()) throw std::invalid_argument("mcdiarmid_bound: empty sensitivity vector");
    double sum = 0.0;
    for (double ci : c) {
        if (!(ci > 0)) throw std::invalid_argument("mcdiarmid_bound: every c_i must be positive");
        sum += ci * ci;
    }
    return 2.0 * std::exp(-2.0 * gamma * gamma / sum);
}

double hoeffding_bound(double t, double a, double b) {
    if (!(t > 0)) throw std::invalid_argument("hoeffding_bound: t must be positive");
    if (a > b) throw std::invalid_argument("hoeffding_bound: need a <= b");
    return std::exp(t * t * (b - a) * (b - a) / 8.0);
}

double partial_fourier_column_bound(double C, double N, double eps) {
    if (!(C > 0) || !(N > 0)) throw std::invalid_argument("partial_fourier_column_bound: C and N must be positive");
    return 4.0 * C * std::exp(-2.0 * N * eps * eps);
}

double binomial_sigma(double p, std::size_t trials) {
    const double q = std::clamp(p, 0.0, 1.0);
    return trials == 0 ? 0.0 : std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

McDiarmidReport mcdiarmid_empirical(const TupleFunction& fn, std::uint64_t ground, std::size_t m,
                                    std::span<const double> c, std::span<const double> gammas,
                                    std::size_t trials, std::uint64_t seed, std::size_t probes, unsigned threads) {
    if (c.size() != m) throw std::invalid_argument("mcdiarmid_empirical: need one c_i per coordinate");
    if (trials == 0) throw std::invalid_argument("mcdiarmid_empirical: trials must be positive");
    if (ground <= m) throw std::invalid_argument("mcdiarmid_empirical: ground set must exceed the tuple length");
    const DistinctTupleSampler sampler(ground, m);

    McDiarmidReport report;
    std::vector<double> ratios(probes, 0.0);
    parallel_for(probes, threads, [&](std::size_t p) {
        Rng rng(derive_seed(seed, 1, p));
        std::vector<std::uint64_t> t = sampler.sample(rng);
        const double base = fn(t);
        const std::size_t i = p % m;
        std::uint64_t replacement;
        do replacement = rng.below(ground);
        while (std::find(t.begin(), t.end(), replacement) != t.end());
        t[i] = replacement;
        ratios[p] = std::abs(fn(t) - base) / c[i];
    });
    for (double r : ratios) report.max_probe_ratio = std::max(report.max_probe_ratio, r);
    if (report.max_probe_ratio > 1.0 + 1e-9)
        throw std::invalid_argument("mcdiarmid_empirical: sensitivity probe exceeded a declared c_i (ratio " +
                                    std::to_string(report.max_probe_ratio) + ")");

    std::vector<double> values(trials);
    parallel_for(trials, threads, [&](std::size_t s) {
        Rng rng(derive_seed(seed, 2, s));
        std::vector<std::uint64_t> t(m);
        sampler.sample_into(rng, t);
        values[s] = fn(t);
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(trials);
    report.mean = mean;
    report.pass = true;
    for (double g : gammas) {
        std::size_t hits = 0;
        for (double v : values)
            if (std::abs(v - mean) >= g) ++hits;
        TailEstimate te;
        te.gamma = g;
        te.empirical = static_cast<double>(hits) / static_cast<double>(trials);
        te.bound = mcdiarmid_bound(c, g);
        te.sigma = binomial_sigma(te.bound, trials);
        te.pass = te.empirical <= te.bound + 3.0 * te.sigma;
        report.pass = report.pass && te.pass;
        report.tails.push_back(te);
    }
    return report;
}

namespace {

double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * sum;
}

double gamma_q_continued_fraction(double a, double x) {
    // Modified Lentz evaluation of the continued fraction for Gamma(a, x).
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0)) throw std::invalid_argument("regularized_gamma_q: a must be positive");
    if (x < 0) throw std::invalid_argument("regularized_gamma_q: x must be non-negative");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double gaussian_tail_S(double r, double dof) {
    if (r < 0) throw std::invalid_argument("gaussian_tail_S: r must be non-negative");
    if (!(dof >= 1)) throw std::invalid_argument("gaussian_tail_S: dimension must be at least 1");
    return regularized_gamma_q(dof / 2.0, r * r / 2.0);
}

double noise_bound_probability(double eps_prime, double gamma, double sigma, double alpha_norm, double dof,
                               double delta) {
    if (!(sigma > 0)) throw std::invalid_argument("noise_bound_probability: sigma must be positive");
    if (gamma < 0) throw std::invalid_argument("noise_bound_probability: gamma must be non-negative");
    if (eps_prime < 0) throw std::invalid_argument("noise_bound_probability: eps_prime must be non-negative");
    const double p = 1.0 - 2.0 * (delta + gaussian_tail_S(gamma * alpha_norm / sigma, dof));
    return std::clamp(p, 0.0, 1.0);
}

} // namespace stripcs
