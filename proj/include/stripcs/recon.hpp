#pragma once

#include "stripcs/ensembles.hpp"
#include "stripcs/signal.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stripcs {

enum class NoiseKind { None, MeasurementGaussian, SignalGaussian };

struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double sigma = 0.0;  // per real component
};

struct Measurement {
    std::vector<Complex> f;
    NoiseModel noise;
    /// Realized measurement-domain noise nu (zero vector without noise).
    std::vector<Complex> nu;
    double noise_norm = 0.0;
};

/// f = N^{-1/2} Phi alpha + nu. MeasurementGaussian adds i.i.d. complex normal nu with
/// variance sigma^2 per real component; SignalGaussian adds mu of the same law on every
/// one of the C coordinates and measures N^{-1/2} Phi (alpha + mu).
Measurement measure(const SensingMatrix& matrix, const SparseSignal& alpha, NoiseModel noise, std::uint64_t seed);

/// Dense variant; coeffs has length C.
Measurement measure_dense(const SensingMatrix& matrix, std::span<const Complex> coeffs, NoiseModel noise,
                          std::uint64_t seed);

/// g(x) = f(x xor a) conj(f(x)).
std::vector<Complex> shift_multiply(std::span<const Complex> f, const BinaryVector& a);

enum class OffsetSet { Unit, All };
enum class Association { Peaks, Score };
enum class Refit { None, Final, Every };

struct ReconOptions {
    std::size_t k_max = 1;
    std::size_t max_iterations = 0;  // 0: 2 k_max
    double stop_eps = -1.0;          // negative: 1e-6 ||f||
    OffsetSet offsets = OffsetSet::All;
    Association association = Association::Score;
    std::size_t search_width = 3;    // Peaks association only
    Refit refit = Refit::Final;

    nlohmann::json to_json() const;
    static ReconOptions from_json(const nlohmann::json& j, ReconOptions base);
    static ReconOptions from_json(const nlohmann::json& j) { return from_json(j, ReconOptions{}); }
};

struct IterationLog {
    std::size_t iteration = 0;
    std::uint64_t column = 0;
    std::uint64_t p_coeffs = 0;
    std::uint64_t b = 0;
    Complex beta;
    double residual_before = 0.0;
    double residual_after = 0.0;
    bool restored = false;
};

struct ReconResult {
    SparseSignal estimate;
    std::vector<IterationLog> log;
    double residual_norm = 0.0;
    std::string stop_reason;

    nlohmann::json to_json() const;
};

/// Quadratic reconstruction for Delsarte-Goethals matrices: shift-multiply and Walsh-Hadamard
/// peaks identify P, dechirping identifies b, and detected terms are peeled off.
ReconResult quadratic_reconstruct(const SensingMatrix& matrix, std::span<const Complex> f, const ReconOptions& options);

/// Same support as truth and every value within tol.
bool recovery_matches(const SparseSignal& truth, const SparseSignal& estimate, double tol = 1e-6);

struct CrosstermReport {
    double target = 0.0;          // sum_{j != t} |alpha_j|^2 |alpha_t|^2
    double pooled_mean = 0.0;     // mean of N^2 |Gamma_a^l|^2 over non-peak l and trials
    double max_relative_deviation = 0.0;  // over l, of the per-l mean
    double mean_max_over_mean = 0.0;  // per-trial max/mean of the non-peak spectrum, averaged
    std::vector<double> per_l;
};

/// Averages N^2 |Gamma_a^l|^2 at non-peak l over random supports carrying the given values.
CrosstermReport crossterm_energy_check(const SensingMatrix& matrix, std::span<const Complex> values,
                                       const BinaryVector& a, std::size_t trials, std::uint64_t seed,
                                       unsigned threads = 1);

/// (5+eps)/(1-eps) tail_norm + 2/(1-eps) nu_norm. Throws unless 0 <= eps < 1.
double error_bound(double tail_norm, double nu_norm, double eps);
double error_bound(const SparseSignal& alpha, const SparseSignal& alpha_k, double nu_norm, double eps);

std::string noise_kind_name(NoiseKind k);
NoiseKind parse_noise_kind(const std::string& s);

} // namespace stripcs
