#pragma once

#include "stripcs/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stripcs {

/// Uniform ordered tuples of pairwise-distinct elements of [0, ground), by a
/// sparse partial Fisher-Yates shuffle.
class DistinctTupleSampler {
public:
    DistinctTupleSampler(std::uint64_t ground, std::size_t length);

    std::uint64_t ground() const { return ground_; }
    std::size_t length() const { return length_; }

    void sample_into(Rng& rng, std::span<std::uint64_t> out) const;
    std::vector<std::uint64_t> sample(Rng& rng) const;
    /// Same distribution over [0, ground) \ {excluded}.
    void sample_excluding(Rng& rng, std::uint64_t excluded, std::span<std::uint64_t> out) const;

private:
    std::uint64_t ground_;
    std::size_t length_;
};

/// 2 exp(-2 gamma^2 / sum c_i^2). Throws unless every c_i > 0 and gamma >= 0.
double mcdiarmid_bound(std::span<const double> c, double gamma);

/// exp(t^2 (b - a)^2 / 8), the moment-generating bound for X in [a, b] with mean zero.
/// Throws unless t > 0 and a <= b.
double hoeffding_bound(double t, double a, double b);

/// 4 C exp(-2 N eps^2): union bound over the column averages of a random partial Fourier matrix.
double partial_fourier_column_bound(double C, double N, double eps);

struct TailEstimate {
    double gamma = 0.0;
    double empirical = 0.0;
    double bound = 0.0;
    double sigma = 0.0;  // binomial standard error at the bound
    bool pass = false;   // empirical <= bound + 3 sigma
};

struct McDiarmidReport {
    double mean = 0.0;
    double max_probe_ratio = 0.0;  // largest observed |difference| / c_i
    std::vector<TailEstimate> tails;
    bool pass = false;
};

using TupleFunction = std::function<double(std::span<const std::uint64_t>)>;

/// Samples fn over distinct tuples and compares |fn - mean| tails with mcdiarmid_bound.
/// Before sampling, coordinate sensitivities are probed by single-coordinate
/// replacements; a difference above c_i rejects the configuration with std::invalid_argument.
McDiarmidReport mcdiarmid_empirical(const TupleFunction& fn, std::uint64_t ground, std::size_t m,
                                    std::span<const double> c, std::span<const double> gammas,
                                    std::size_t trials, std::uint64_t seed, std::size_t probes = 2000,
                                    unsigned threads = 1);

/// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

/// Pr[||g|| >= r] for a standard normal vector g with `dof` coordinates, i.e. Q(dof/2, r^2/2).
double gaussian_tail_S(double r, double dof);

/// 1 - 2 (delta + S(gamma alpha_norm / sigma)), clamped to [0, 1]. `dof` is the number of
/// real noise coordinates (2N for complex noise on N measurements).
double noise_bound_probability(double eps_prime, double gamma, double sigma, double alpha_norm, double dof,
                               double delta);

/// Binomial standard error sqrt(p(1-p)/trials), with p clamped to [0, 1].
double binomial_sigma(double p, std::size_t trials);

} // namespace stripcs
