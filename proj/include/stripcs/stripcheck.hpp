#pragma once

#include "stripcs/ensembles.hpp"
#include "stripcs/signal.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stripcs {

enum class CertifyMode { Exhaustive, Sampled };

struct CertifyOptions {
    CertifyMode mode = CertifyMode::Exhaustive;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::size_t row_pair_samples = 512;  // sampled mode
    std::size_t product_samples = 4096;  // sampled mode
    unsigned threads = 1;
};

struct StripCertificate {
    std::size_t N = 0;
    std::uint64_t C = 0;
    CertifyMode mode = CertifyMode::Exhaustive;
    double tol = 0.0;

    bool unimodular_pass = false;
    double max_modulus_deviation = 0.0;

    // Deviations are reported relative to C.
    bool st1_row_orthogonality_pass = false;
    double st1_max_row_inner = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> st1_row_pair_witness;
    bool st1_row_sum_pass = false;
    double st1_max_row_sum = 0.0;
    std::optional<std::size_t> st1_row_sum_witness;

    bool st2_pass = false;
    std::uint64_t st2_products_checked = 0;
    std::string st2_failure;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> st2_witness;

    bool st3_pass = false;
    double st3_eta = 0.0;
    double max_column_sum_sq = 0.0;
    std::uint64_t st3_witness = 0;
    /// Distinct non-identity |column sum|^2 values (rounded) with their counts.
    std::vector<std::pair<double, std::uint64_t>> column_sum_sq_values;

    bool all_pass() const {
        return unimodular_pass && st1_row_orthogonality_pass && st1_row_sum_pass && st2_pass && st3_pass;
    }
    nlohmann::json to_json() const;
};

/// Checks (St1) rows orthogonal with zero sums, (St2) columns closed under pointwise
/// product, (St3) non-identity column sums, and reports the measured eta.
/// Exhaustive mode requires C <= 2^16.
StripCertificate certify(const SensingMatrix& matrix, const CertifyOptions& options = {});

/// The (St3) exponent alone: min(2, 2 - log max|S|^2 / log N) over non-identity column sums.
double column_sum_eta(const SensingMatrix& matrix, double tol = 1e-9);

/// Predicted product index versus the entrywise product, over all column pairs.
struct ClosureReport {
    std::uint64_t pairs = 0;
    std::uint64_t mismatches = 0;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
};
ClosureReport closure_prediction_check(const SensingMatrix& matrix, double tol = 1e-9, unsigned threads = 1);

struct BoundValue {
    double value = 2.0;
    bool vacuous = true;
};

/// 2 exp(-[eps - (k-1)/(C-1)]^2 N^eta / (8k)); vacuous (value 2) unless eps > (k-1)/(C-1).
BoundValue strip_delta(double N, double C, double k, double eps, double eta);

/// Sharpened bound for a signal with rho = ||alpha||_1 / ||alpha||_2, 1 <= rho <= sqrt(k).
BoundValue strip_delta_sharpened(double N, double C, double eta, double eps, double rho, double k);

/// (k/N)(C-N)/(C-1), the mean coherence of k random columns with a fixed other column.
double coherence_mean(double N, double C, double k);
/// coherence_mean + sqrt(2k ln(C/delta)) / N^eta.
double coherence_threshold(double N, double C, double k, double eta, double delta);

struct BoundReport {
    double N = 0, C = 0, k = 0, epsilon = 0, eta = 0;
    BoundValue delta;
    double coherence_mean = 0.0;
    double coherence_tail = 0.0;  // threshold; only meaningful when delta is not vacuous
    BoundValue sharpened(double rho) const { return strip_delta_sharpened(N, C, eta, epsilon, rho, k); }
    nlohmann::json to_json() const;
};
BoundReport bound_report(double N, double C, double k, double eps, double eta);

/// E over supports of ||f||^2 / ||alpha||^2 closed form: 1 - (|sum a|^2 - ||a||^2) / ((C-1)||a||^2).
double expected_energy_closed_form(std::span<const Complex> values, double C);

enum class EnergyMode { Exact, MonteCarlo };
struct EnergyEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t samples = 0;
};
/// Mean of ||N^{-1/2} Phi alpha||^2 over support placements of the given values.
/// Exact mode enumerates every ordered placement (at most 2*10^7 of them).
EnergyEstimate expected_energy(const SensingMatrix& matrix, std::span<const Complex> values, EnergyMode mode,
                               std::size_t trials = 0, std::uint64_t seed = 0, unsigned threads = 1);

struct StripTrial {
    double distortion = 0.0;  // ||f||^2 / ||alpha||^2 - 1
    bool violated = false;
};
struct StripMonteCarlo {
    double failure_rate = 0.0;
    std::vector<StripTrial> trials;
};
StripMonteCarlo strip_montecarlo(const SensingMatrix& matrix, std::size_t k, double eps, ValueModel model,
                                 std::size_t trials, std::uint64_t seed, unsigned threads = 1);

enum class WPolicy { Fixed, All };
struct CoherenceOptions {
    WPolicy policy = WPolicy::Fixed;
    std::uint64_t w = 1;  // fixed policy
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    double threshold = std::numeric_limits<double>::infinity();
    unsigned threads = 1;
};
struct CoherenceStats {
    double mean = 0.0;
    double standard_error = 0.0;
    double max = 0.0;
    double tail_estimate = 0.0;  // fraction of trials at or above the threshold
    std::vector<double> samples;
};
/// ||N^{-1/2} Phi_kappa^dag N^{-1/2} phi_w||^2 for random k-sets kappa. With WPolicy::All
/// each sample is the maximum over every w outside kappa.
CoherenceStats coherence_stats(const SensingMatrix& matrix, std::size_t k, const CoherenceOptions& options);
/// Average over every k-subset of the columns other than w, by enumeration.
double coherence_exact_mean(const SensingMatrix& matrix, std::size_t k, std::uint64_t w);

struct ConditionRow {
    std::size_t k = 0;
    std::size_t trial = 0;
    double cond = 0.0;
};
struct ConditionSummary {
    std::size_t k = 0;
    double mean = 0.0;
    double std = 0.0;
    std::size_t infinite = 0;
};
struct ConditionResult {
    std::vector<ConditionRow> rows;
    std::vector<ConditionSummary> summary;
};
/// sqrt(lambda_max / lambda_min) of (1/N) Phi_lambda^dag Phi_lambda for random k-sets;
/// +inf when lambda_min <= 1e-14.
ConditionResult condition_experiment(const SensingMatrix& matrix, std::span<const std::size_t> ks,
                                     std::size_t trials, std::uint64_t seed, unsigned threads = 1);
double gram_condition_number(const SensingMatrix& matrix, std::span<const std::uint64_t> support);

/// True iff no other vector with at most k nonzeros has the same image as alpha.
/// Requires C <= 64 and k <= 3.
bool uniqueness_bruteforce(const SensingMatrix& matrix, const SparseSignal& alpha, double tol = 1e-9);

std::string certify_mode_name(CertifyMode mode);

} // namespace stripcs
