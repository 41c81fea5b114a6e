#include "stripcs/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stripcs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("stripcs_unit_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig dg_config(ExperimentKind kind, int m, const std::string& out) {
    ExperimentConfig c;
    c.kind = kind;
    c.matrix.family = Family::DelsarteGoethals;
    c.matrix.params = {{"m", m}, {"r", 0}};
    c.out = out;
    return c;
}

}

TEST_SUITE("cli") {

TEST_CASE("k ranges") {
    CHECK(parse_k_range("5") == std::vector<std::size_t>{5});
    CHECK(parse_k_range("1..4") == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(parse_k_range("2..9:3,20") == std::vector<std::size_t>{2, 5, 8, 20});
    CHECK_THROWS_AS(parse_k_range("4..2"), ConfigError);
    CHECK_THROWS_AS(parse_k_range("x"), ConfigError);
    CHECK_THROWS_AS(parse_k_range("-3"), ConfigError);
}

TEST_CASE("config round trip is lossless") {
    auto c = dg_config(ExperimentKind::ReconSweep, 9, "o");
    c.ks = {1, 5, 9};
    c.noise = {NoiseKind::MeasurementGaussian, 0.25};
    c.sigma_tail = 0.01;
    c.recon.association = Association::Peaks;
    const auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.hash() == c.hash());
    auto d = c;
    d.out = "elsewhere";
    d.threads = 8;
    CHECK(d.hash() == c.hash());
    d.seed = 1;
    CHECK(d.hash() != c.hash());
}

TEST_CASE("validation names the offending field") {
    auto expect_path = [](const nlohmann::json& j, const std::string& path) {
        try {
            ExperimentConfig::from_json(j);
            FAIL("accepted an invalid config");
        } catch (const ConfigError& e) {
            CHECK(e.path() == path);
        }
    };
    const nlohmann::json good = dg_config(ExperimentKind::Strip, 5, "o").to_json();
    auto j = good;
    j["matrix"]["params"]["p"] = 7;
    expect_path(j, "matrix.params.p");
    j = good;
    j["matrix"]["params"].erase("m");
    expect_path(j, "matrix.params.m");
    j = good;
    j["epsilon"] = 1.5;
    expect_path(j, "epsilon");
    j = good;
    j["trials"] = "many";
    expect_path(j, "trials");
    j = good;
    j["colour"] = "red";
    expect_path(j, "colour");
    j = good;
    j["noise"] = {{"kind", "pink"}};
    expect_path(j, "noise.kind");
    j = good;
    j["k"] = {1, 0};
    expect_path(j, "k[1]");
    j = good;
    j["kind"] = "recon";
    j["matrix"] = {{"family", "chirp"}, {"params", {{"p", 5}}}};
    expect_path(j, "matrix.family");
}

TEST_CASE("certify writes tables and a certificate") {
    const auto dir = scratch("certify");
    const auto rec = run_experiment(dg_config(ExperimentKind::Certify, 5, dir.string()));
    CHECK(rec.pass);
    CHECK(rec.summary["results"]["certificate"]["st3_eta"].get<double>() == doctest::Approx(1.0));
    for (const char* f : {"certify.csv", "column_sums.csv", "certificate.json", "summary.json"}) CHECK(fs::exists(dir / f));
    const auto csv = slurp(dir / "certify.csv");
    CHECK(csv.rfind("# stripcs certify matrix=", 0) == 0);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind("config_hash,", 0) == 0);
    while (std::getline(in, line)) CHECK(line.rfind(rec.config_hash + ",", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical tables") {
    const auto d1 = scratch("det1"), d2 = scratch("det2");
    auto c = dg_config(ExperimentKind::ReconSweep, 7, d1.string());
    c.ks = {2, 6};
    c.trials = 4;
    c.seed = 7;
    run_experiment(c);
    c.out = d2.string();
    c.threads = 3;
    run_experiment(c);
    for (const char* f : {"recon_sweep.csv", "recon_summary.csv", "recon_sweep.dat"}) CHECK(slurp(d1 / f) == slurp(d2 / f));
    CHECK(slurp(d1 / "recon_sweep.csv").find("wall_time") == std::string::npos);
    CHECK(fs::exists(d1 / "recon_timing.csv"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("json format") {
    const auto dir = scratch("json");
    auto c = dg_config(ExperimentKind::Bounds, 9, dir.string());
    c.format = "json";
    c.ks = {4, 8};
    c.epsilon = 0.5;
    run_experiment(c);
    const auto j = nlohmann::json::parse(slurp(dir / "bounds.json"));
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][0]["config_hash"] == c.hash());
    fs::remove_all(dir);
}

TEST_CASE("failed runs leave no partial output") {
    const auto dir = scratch("fail");
    auto c = dg_config(ExperimentKind::Noise, 5, dir.string());
    c.trials = 10;  // no noise configured: the experiment rejects it after setup
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("every experiment kind runs on a small instance") {
    for (auto kind : {ExperimentKind::Strip, ExperimentKind::Coherence, ExperimentKind::Condition, ExperimentKind::Recon,
                      ExperimentKind::McDiarmid, ExperimentKind::Noise}) {
        const auto dir = scratch("kind");
        auto c = dg_config(kind, 5, dir.string());
        c.ks = {3};
        c.trials = 200;
        c.epsilon = 0.5;
        c.noise = kind == ExperimentKind::Noise ? NoiseModel{NoiseKind::MeasurementGaussian, 0.01} : NoiseModel{};
        const auto rec = run_experiment(c);
        CHECK(fs::exists(dir / "summary.json"));
        CHECK(rec.files.size() >= 2);
        fs::remove_all(dir);
    }
}

}
