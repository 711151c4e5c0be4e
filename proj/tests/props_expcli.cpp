#include "core/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace odeident;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    return std::string(ODEIDENT_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("odeident_props_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE_BEGIN("properties");

TEST_CASE("re-running a seeded config reproduces its files byte for byte") {
    ExperimentConfig cfg = load_config(fixture("sec5_eta_i.json"));
    ConfigOverrides ov;
    ov.reps = 2;
    apply_overrides(cfg, ov);
    cfg.task["n"] = 5;
    cfg.task["solver"] = {{"max_iterations", 40}};

    const auto dir_a = fresh_dir("rerun_a");
    const auto dir_b = fresh_dir("rerun_b");
    const ResultRecord rec_a = run_task(cfg);
    emit_results(rec_a, "csv", dir_a.string());
    const ResultRecord rec_b = run_task(cfg);
    emit_results(rec_b, "csv", dir_b.string());

    CHECK(rec_a.config_digest == rec_b.config_digest);
    CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));
    CHECK(slurp(dir_a / "replications.csv") == slurp(dir_b / "replications.csv"));

    // result.json may differ only in the timestamp field.
    json ja = json::parse(slurp(dir_a / "result.json"));
    json jb = json::parse(slurp(dir_b / "result.json"));
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja == jb);
}

TEST_CASE("every bundled fixture validates and runs") {
    const std::vector<std::string> fixtures = {
        "sec2_example.json",    "sec5_identifiable.json", "sec5_unidentifiable.json",
        "sec5_eta_i.json",      "appendixG_d5p5.json",    "appendixG_d10p5.json",
        "appendixB_oscillator.json", "appendixB_population.json"};
    for (const std::string& name : fixtures) {
        CAPTURE(name);
        ExperimentConfig cfg = load_config(fixture(name));
        REQUIRE(!cfg.task_type.empty());
        // Shrink the estimation fixtures so the whole sweep stays fast; the
        // paper-scale defaults remain in the files.
        if (cfg.task_type == "estimate") {
            ConfigOverrides ov;
            ov.reps = 1;
            apply_overrides(cfg, ov);
            cfg.task["n"] = 5;
            cfg.task["solver"] = {{"max_iterations", 8}};
        }
        const ResultRecord record = run_task(cfg);
        CHECK(!record.config_digest.empty());
        CHECK(!record.outputs.empty());
    }
}

TEST_SUITE_END();
