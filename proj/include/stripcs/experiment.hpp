#pragma once

// Experiment configuration, dispatch and on-disk reports.

#include "stripcs/ensembles.hpp"
#include "stripcs/recon.hpp"
#include "stripcs/signal.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace stripcs {

/// Invalid configuration; what() starts with the offending field path.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class ExperimentKind { Certify, Strip, Coherence, Condition, Recon, ReconSweep, McDiarmid, Noise, Bounds };

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Certify;
    MatrixSpec matrix;
    std::vector<std::size_t> ks{1};
    double epsilon = 0.3;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out = "out";
    std::string format = "csv";  // csv | json
    ValueModel values = ValueModel::RandomPhase;
    NoiseModel noise;
    double sigma_tail = 0.0;  // recon: dense Gaussian tail added to the signal
    double gamma = 0.1;       // noise: slack on the noise term
    std::string certify_mode = "exhaustive";
    std::string w_policy = "fixed";
    bool baseline = false;    // condition: also run a Gaussian matrix of equal size
    std::string mcdiarmid_fn = "coordinate_sum";  // coordinate_sum | energy | coherence
    ReconOptions recon;

    nlohmann::json to_json() const;
    /// Throws ConfigError naming the offending field.
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// Cross-field checks, including family/parameter agreement.
    void validate() const;
    /// FNV-1a over the canonical JSON, ignoring out, threads and format.
    std::string hash() const;
};

/// "3", "1..48", "2..16:2" or comma-separated combinations of these.
std::vector<std::size_t> parse_k_range(const std::string& text);

struct ExperimentRecord {
    std::string config_hash;
    nlohmann::json summary;
    std::vector<std::string> files;
    double wall_time = 0.0;
    std::string display;  // the main table as aligned text
    bool pass = true;  // false when a checked property failed
};

std::string tool_version();

/// Runs the experiment, writes summary.json and the kind-specific tables into
/// config.out. Output files are removed again if the run throws.
ExperimentRecord run_experiment(const ExperimentConfig& config);

} // namespace stripcs
