#include "stripcs/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

using nlohmann::json;

namespace {

struct Flags {
    std::string config, family, k, out, format, values, noise, mode, w_policy, fn, offsets, association, refit;
    int m = 0, r = 0, p = 0, t = 0;
    std::uint64_t C = 0, N = 0, subsample = 0, seed = 0, matrix_seed = 0;
    std::size_t trials = 0, search_width = 0, max_iterations = 0;
    unsigned threads = 1;
    double epsilon = 0, sigma = 0, sigma_tail = 0, gamma = 0;
    bool baseline = false;
};

// Registers the shared flags on one subcommand and remembers the options.
std::map<std::string, CLI::Option*> add_flags(CLI::App* app, Flags& f) {
    std::map<std::string, CLI::Option*> o;
    o["config"] = app->add_option("--config", f.config, "JSON config file; flags override its fields")->check(CLI::ExistingFile);
    o["family"] = app->add_option("--family", f.family, "chirp, dg, rm2, bch, partial_fourier, gaussian");
    o["m"] = app->add_option("--m", f.m, "Binary dimension (dg, rm2, bch)");
    o["r"] = app->add_option("--r", f.r, "Delsarte-Goethals order");
    o["p"] = app->add_option("--p", f.p, "Prime (chirp)");
    o["t"] = app->add_option("--t", f.t, "Designed distance parameter (bch)");
    o["C"] = app->add_option("--C", f.C, "Columns (partial_fourier, gaussian)");
    o["N"] = app->add_option("--N", f.N, "Rows (partial_fourier, gaussian)");
    o["subsample"] = app->add_option("--subsample", f.subsample, "Keep a random subset of this many columns");
    o["matrix_seed"] = app->add_option("--matrix-seed", f.matrix_seed, "Seed of a random matrix (default: --seed)");
    o["seed"] = app->add_option("--seed", f.seed, "Master seed");
    o["k"] = app->add_option("--k", f.k, "Sparsity: 5, 1..48, 2..16:2 or a comma list");
    o["epsilon"] = app->add_option("--epsilon", f.epsilon, "Isometry tolerance");
    o["trials"] = app->add_option("--trials", f.trials, "Monte-Carlo trials");
    o["threads"] = app->add_option("--threads", f.threads, "Worker threads (0: all cores)");
    o["out"] = app->add_option("--out", f.out, "Output directory");
    o["format"] = app->add_option("--format", f.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    o["values"] = app->add_option("--values", f.values, "unit_sphere, gaussian or random_phase");
    o["noise"] = app->add_option("--noise", f.noise, "none, measurement_gaussian or signal_gaussian");
    o["sigma"] = app->add_option("--sigma", f.sigma, "Noise standard deviation per real coordinate");
    o["sigma_tail"] = app->add_option("--sigma-tail", f.sigma_tail, "Dense Gaussian tail added to the signal (recon)");
    o["gamma"] = app->add_option("--gamma", f.gamma, "Noise slack (noise)");
    o["certify_mode"] = app->add_option("--mode", f.mode, "exhaustive or sampled (certify)");
    o["w_policy"] = app->add_option("--w-policy", f.w_policy, "fixed or all (coherence)");
    o["baseline"] = app->add_flag("--baseline", f.baseline, "Also run a Gaussian matrix of equal size (condition)");
    o["mcdiarmid_fn"] = app->add_option("--fn", f.fn, "coordinate_sum, energy or coherence (mcdiarmid)");
    o["offsets"] = app->add_option("--offsets", f.offsets, "unit or all (recon)");
    o["association"] = app->add_option("--association", f.association, "score or peaks (recon)");
    o["refit"] = app->add_option("--refit", f.refit, "none, final or every (recon)");
    o["search_width"] = app->add_option("--search-width", f.search_width, "Peaks per offset (recon, peaks)");
    o["max_iterations"] = app->add_option("--max-iterations", f.max_iterations, "Iteration cap (recon)");
    return o;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw stripcs::ConfigError("config", std::string("cannot parse ") + path + ": " + e.what());
    }
}

json merge(const std::string& kind, const Flags& f, const std::map<std::string, CLI::Option*>& o) {
    json j = o.at("config")->count() ? load_config(f.config) : json::object();
    auto given = [&](const char* name) { return o.at(name)->count() > 0; };
    j["kind"] = kind;
    json& mat = j["matrix"];
    if (!mat.is_object()) mat = json::object();
    if (given("family")) {
        if (mat.value("family", "") != f.family) mat["params"] = json::object();
        mat["family"] = f.family;
    }
    json& params = mat["params"];
    if (!params.is_object()) params = json::object();
    if (given("m")) params["m"] = f.m;
    if (given("r")) params["r"] = f.r;
    if (given("p")) params["p"] = f.p;
    if (given("t")) params["t"] = f.t;
    if (given("C")) params["C"] = f.C;
    if (given("N")) params["N"] = f.N;
    if (given("subsample")) params["subsample"] = f.subsample;
    if (given("matrix_seed")) mat["seed"] = f.matrix_seed;
    else if (given("seed") && !mat.contains("seed")) mat["seed"] = f.seed;
    if (given("seed")) j["seed"] = f.seed;
    if (given("k")) j["k"] = f.k;
    if (given("epsilon")) j["epsilon"] = f.epsilon;
    if (given("trials")) j["trials"] = f.trials;
    if (given("threads")) j["threads"] = f.threads;
    if (given("out")) j["out"] = f.out;
    if (given("format")) j["format"] = f.format;
    if (given("values")) j["values"] = f.values;
    if (given("noise") || given("sigma")) {
        json& n = j["noise"];
        if (!n.is_object()) n = json::object();
        if (given("noise")) n["kind"] = f.noise;
        if (given("sigma")) n["sigma"] = f.sigma;
    }
    if (given("sigma_tail")) j["sigma_tail"] = f.sigma_tail;
    if (given("gamma")) j["gamma"] = f.gamma;
    if (given("certify_mode")) j["certify_mode"] = f.mode;
    if (given("w_policy")) j["w_policy"] = f.w_policy;
    if (given("baseline")) j["baseline"] = f.baseline;
    if (given("mcdiarmid_fn")) j["mcdiarmid_fn"] = f.fn;
    json recon = j.contains("recon") && j["recon"].is_object() ? j["recon"] : json::object();
    if (given("offsets")) recon["offsets"] = f.offsets;
    if (given("association")) recon["association"] = f.association;
    if (given("refit")) recon["refit"] = f.refit;
    if (given("search_width")) recon["search_width"] = f.search_width;
    if (given("max_iterations")) recon["max_iterations"] = f.max_iterations;
    if (!recon.empty()) j["recon"] = recon;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensing-matrix certification, bounds and reconstruction experiments"};
    app.set_version_flag("--version", stripcs::tool_version());
    app.require_subcommand(1);
    Flags flags;
    std::map<CLI::App*, std::map<std::string, CLI::Option*>> options;
    const std::pair<const char*, const char*> commands[] = {
        {"certify", "Check the row, group and column-sum conditions and report eta"},
        {"strip", "Monte-Carlo isometry failure rate against the analytic delta"},
        {"coherence", "Coherence of random column subsets against the tail threshold"},
        {"condition", "Condition numbers of random column submatrices"},
        {"recon", "One reconstruction with its iteration log"},
        {"recon-sweep", "Reconstruction success rate versus k"},
        {"mcdiarmid", "Empirical tails of a bounded-difference function over distinct tuples"},
        {"noise", "Violation rate of the noisy energy bracket"},
        {"bounds", "Evaluate delta and the coherence threshold"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        options[sub] = add_flags(sub, flags);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        const json j = merge(sub->get_name(), flags, options.at(sub));
        const auto config = stripcs::ExperimentConfig::from_json(j);
        const auto rec = stripcs::run_experiment(config);
        std::cout << sub->get_name() << "  " << config.matrix.describe() << "  N=" << rec.summary["N"]
                  << " C=" << rec.summary["C"] << "  config_hash=" << rec.config_hash << '\n'
                  << rec.display << "wrote";
        for (const auto& f : rec.files) std::cout << ' ' << f;
        std::cout << " to " << config.out << " in " << rec.wall_time << " s\n"
                  << (rec.pass ? "PASS" : "FAIL") << '\n';
        return rec.pass ? 0 : 1;
    } catch (const stripcs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
