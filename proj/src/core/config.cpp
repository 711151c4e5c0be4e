#include "core/config.hpp"

#include "core/linalg.hpp"
#include "core/rng.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef ODEIDENT_VERSION
#define ODEIDENT_VERSION "0.0.0"
#endif

namespace odeident {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    fail(errc::parse_error, "config field '" + path + "': " + what);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) config_fail(path + "." + key, "missing");
    return j.at(key);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) config_fail(path, "expected a number");
    return j.get<double>();
}

Vector parse_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) config_fail(path, "expected a nonempty array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = as_number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

Matrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) config_fail(path, "expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) config_fail(path, "rows must be nonempty arrays");
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.size() != cols)
            config_fail(path + "[" + std::to_string(r) + "]",
                        "expected " + std::to_string(cols) + " columns");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) =
                as_number(row[c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

Driver parse_driver(const json& j, const std::string& path) {
    const std::string kind = need(j, "kind", path).get<std::string>();
    if (kind == "polynomial") {
        const json& coeffs = need(j, "coefficients", path);
        if (!coeffs.is_array() || coeffs.empty())
            config_fail(path + ".coefficients", "expected at least one coefficient vector");
        PolynomialDriver poly;
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            poly.coefficients.push_back(
                parse_vector(coeffs[k], path + ".coefficients[" + std::to_string(k) + "]"));
        return poly;
    }
    if (kind == "exponential") return ExponentialDriver{parse_vector(need(j, "v", path), path + ".v")};
    if (kind == "trigonometric")
        return TrigonometricDriver{parse_vector(need(j, "v1", path), path + ".v1"),
                                   parse_vector(need(j, "v2", path), path + ".v2")};
    config_fail(path + ".kind", "unknown driver kind '" + kind + "'");
}

std::vector<Vector> standard_basis(int p) {
    std::vector<Vector> basis;
    for (int i = 0; i < p; ++i) {
        Vector e = Vector::Zero(p);
        e(i) = 1.0;
        basis.push_back(e);
    }
    return basis;
}

struct TaskParams {
    int n = 10;
    double t_start = 0.0;
    double t_end = 1.0;
    std::optional<std::vector<double>> explicit_times;
    std::vector<Vector> z0_stars;
    SingleNodeInterventions interventions;
    int clamp_index = 1;
    double clamp_value = 1.0;
    std::string arm = "identifiable";
    std::string mode = "eta";
    std::vector<int> n_values;
    int reps = 20;
    double delta = 0.1;
    bool delta_given = false;
    std::uint64_t seed = 0;
    Tolerance tolerance;
    SolverOptions solver;
};

TaskParams parse_task_params(const ExperimentConfig& cfg) {
    const json& t = cfg.task;
    TaskParams p;
    if (t.contains("n")) p.n = t.at("n").get<int>();
    if (t.contains("t_start")) p.t_start = as_number(t.at("t_start"), "task.t_start");
    if (t.contains("t_end")) p.t_end = as_number(t.at("t_end"), "task.t_end");
    if (t.contains("times")) {
        std::vector<double> times;
        for (std::size_t i = 0; i < t.at("times").size(); ++i)
            times.push_back(as_number(t.at("times")[i], "task.times[" + std::to_string(i) + "]"));
        p.explicit_times = std::move(times);
    }
    if (t.contains("z0_stars")) {
        const json& zs = t.at("z0_stars");
        for (std::size_t i = 0; i < zs.size(); ++i)
            p.z0_stars.push_back(parse_vector(zs[i], "task.z0_stars[" + std::to_string(i) + "]"));
    } else {
        p.z0_stars = standard_basis(cfg.p());
    }
    if (t.contains("interventions")) {
        const json& iv = t.at("interventions");
        for (std::size_t i = 0; i < iv.size(); ++i) {
            const std::string path = "task.interventions[" + std::to_string(i) + "]";
            if (!iv[i].is_array() || iv[i].size() != 2) config_fail(path, "expected [v1, v2]");
            p.interventions.values.emplace_back(as_number(iv[i][0], path),
                                                as_number(iv[i][1], path));
        }
    } else {
        p.interventions.values.assign(static_cast<std::size_t>(cfg.p()), {0.0, 1.0});
    }
    if (t.contains("clamp_index")) p.clamp_index = t.at("clamp_index").get<int>();
    if (t.contains("clamp_value")) p.clamp_value = as_number(t.at("clamp_value"), "task.clamp_value");
    if (t.contains("arm")) p.arm = t.at("arm").get<std::string>();
    if (t.contains("mode")) p.mode = t.at("mode").get<std::string>();
    if (t.contains("n_values"))
        for (const auto& v : t.at("n_values")) p.n_values.push_back(v.get<int>());
    if (t.contains("reps")) p.reps = t.at("reps").get<int>();
    if (t.contains("delta")) {
        p.delta = as_number(t.at("delta"), "task.delta");
        p.delta_given = true;
    }
    if (t.contains("seed")) p.seed = t.at("seed").get<std::uint64_t>();
    if (t.contains("tolerance") && !t.at("tolerance").is_null())
        p.tolerance = as_number(t.at("tolerance"), "task.tolerance");
    if (t.contains("solver")) {
        const json& s = t.at("solver");
        if (s.contains("step_tolerance")) p.solver.step_tolerance = s.at("step_tolerance").get<double>();
        if (s.contains("residual_tolerance"))
            p.solver.residual_tolerance = s.at("residual_tolerance").get<double>();
        if (s.contains("gradient_tolerance"))
            p.solver.gradient_tolerance = s.at("gradient_tolerance").get<double>();
        if (s.contains("max_iterations")) p.solver.max_iterations = s.at("max_iterations").get<int>();
    }
    return p;
}

std::vector<double> task_grid(const TaskParams& p) {
    if (p.explicit_times) return *p.explicit_times;
    return equally_spaced(p.n, p.t_start, p.t_end);
}

LatentDagSystem arm_system(const ExperimentConfig& cfg, const std::string& arm) {
    require(cfg.is_dag(), errc::invalid_argument, "task requires a latent_dag system");
    if (arm == "identifiable" || arm.empty()) return *cfg.dag;
    require(arm == "unidentifiable", errc::parse_error, "task.arm must be identifiable|unidentifiable");
    require(cfg.a_unidentifiable.has_value(), errc::parse_error,
            "system.A_unidentifiable is required for the unidentifiable arm");
    return LatentDagSystem(cfg.dag->x0, cfg.dag->z0, *cfg.a_unidentifiable, cfg.dag->B, cfg.dag->G);
}

json grid_to_json(const TrajectoryGrid& grid) {
    json out;
    out["times"] = grid.times;
    json rows = json::array();
    for (Index r = 0; r < grid.states.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < grid.states.cols(); ++c) row.push_back(grid.states(r, c));
        rows.push_back(std::move(row));
    }
    out["states"] = std::move(rows);
    out["source"] = grid.source_label;
    out["grid"] = "inclusive";
    return out;
}

std::vector<Vector> grid_rows(const TrajectoryGrid& grid) {
    std::vector<Vector> rows;
    rows.reserve(static_cast<std::size_t>(grid.states.rows()));
    for (Index r = 0; r < grid.states.rows(); ++r) rows.push_back(grid.states.row(r).transpose());
    return rows;
}

IdentifiabilityReport run_condition(const ExperimentConfig& cfg, const std::string& id,
                                    const TaskParams& p) {
    if (id == "A0") {
        if (cfg.is_dag()) return check_A0(cfg.dag->x0, cfg.dag->A, p.tolerance);
        return check_A0(cfg.driver->x0, cfg.driver->A, p.tolerance);
    }
    if (id == "A1") {
        require(!cfg.is_dag(), errc::unknown_condition, "A1 applies to latent_driver systems");
        return check_A1(*cfg.driver, p.tolerance);
    }
    if (id == "AUG_A0" || id == "D1" || id == "E1") {
        AugmentedSystem aug = cfg.is_dag() ? augment_dag(arm_system(cfg, p.arm))
                                           : augment_driver(*cfg.driver);
        IdentifiabilityReport report = check_aug_A0(aug, p.tolerance);
        require(id == "AUG_A0" || report.condition_id == id, errc::unknown_condition,
                "condition " + id + " does not match the system's driver");
        return report;
    }

    const LatentDagSystem sys = arm_system(cfg, p.arm);
    if (id == "B1") return check_B1(sys, p.tolerance);
    if (id == "C1") {
        const TrajectoryGrid grid = sample_trajectory(sys, task_grid(p));
        return check_C1(grid.times, grid_rows(grid), sys.p(), p.tolerance);
    }
    if (id == "B2_B3_B4") return check_B2_B3_B4(sys, p.z0_stars, p.tolerance);
    if (id == "C2") {
        std::vector<ObservationSet> trajectories;
        for (const Vector& z0s : p.z0_stars) {
            LatentDagSystem controlled(sys.x0, z0s, sys.A, sys.B, sys.G);
            const TrajectoryGrid grid = sample_trajectory(controlled, task_grid(p));
            trajectories.push_back({grid.times, grid_rows(grid)});
        }
        return check_C2(trajectories, p.z0_stars, sys.B, sys.G, p.tolerance);
    }
    if (id == "B5") return check_B5(sys, p.interventions, p.tolerance);
    if (id == "C3") {
        std::vector<ObservationSet> sets;
        for (int j = 0; j < sys.p(); ++j) {
            const auto [v1, v2] = p.interventions.values.at(static_cast<std::size_t>(j));
            for (double value : {v1, v2}) {
                Vector z = sys.z0;
                z(j) = value;
                LatentDagSystem intervened(sys.x0, z, sys.A, sys.B, sys.G);
                const TrajectoryGrid grid = sample_trajectory(intervened, task_grid(p));
                sets.push_back({grid.times, grid_rows(grid)});
            }
        }
        return check_C3(sets, sys.d(), sys.p(), sys.B, sys.G, p.tolerance);
    }
    fail(errc::unknown_condition, "unknown condition id '" + id + "'");
}

json run_check(const ExperimentConfig& cfg, const TaskParams& p) {
    std::vector<std::string> ids;
    if (cfg.task.contains("conditions"))
        for (const auto& c : cfg.task.at("conditions")) ids.push_back(c.get<std::string>());
    else
        ids = cfg.is_dag() ? std::vector<std::string>{"B1", "C1"}
                           : std::vector<std::string>{"A0", "AUG_A0"};
    json reports = json::array();
    for (const std::string& id : ids) reports.push_back(report_to_json(run_condition(cfg, id, p)));
    return json{{"reports", std::move(reports)}};
}

json run_simulate(const ExperimentConfig& cfg, const TaskParams& p) {
    const std::vector<double> times = task_grid(p);
    TrajectoryGrid grid = cfg.is_dag() ? sample_trajectory(arm_system(cfg, p.arm), times)
                                       : sample_trajectory(*cfg.driver, times);
    return json{{"trajectory", grid_to_json(grid)}};
}

json run_intervene(const ExperimentConfig& cfg, const TaskParams& p) {
    const LatentDagSystem sys = arm_system(cfg, p.arm);
    const InterventionSpec spec{p.clamp_index, p.clamp_value};
    const auto flow = intervene_clamp(sys, spec);
    const std::vector<double> times = task_grid(p);
    TrajectoryGrid grid;
    grid.times = times;
    grid.states.resize(static_cast<Index>(times.size()), sys.d());
    for (std::size_t j = 0; j < times.size(); ++j)
        grid.states.row(static_cast<Index>(j)) = flow(times[j]).transpose();
    grid.source_label = "intervened";
    json out;
    out["trajectory"] = grid_to_json(grid);
    out["clamp_index"] = p.clamp_index;
    out["clamp_value"] = p.clamp_value;
    out["arm"] = p.arm;
    return out;
}

json summary_to_json(const ReplicationSummary& summary) {
    json blocks = json::array();
    for (std::size_t b = 0; b < summary.blocks.size(); ++b)
        blocks.push_back(json{{"block", summary.blocks[b]},
                              {"mse_mean", summary.mse_mean[b]},
                              {"mse_var", summary.mse_var[b]}});
    return json{{"blocks", std::move(blocks)},
                {"replications", summary.replications},
                {"n_observations", summary.n_observations},
                {"failed_fits", summary.failed_fits}};
}

json rows_to_json(const std::string& case_name, int n, const ReplicationSummary& summary) {
    json rows = json::array();
    for (int rep = 0; rep < summary.replications; ++rep)
        for (std::size_t b = 0; b < summary.blocks.size(); ++b)
            rows.push_back(json{{"case", case_name},
                                {"n", n},
                                {"replication", rep},
                                {"block", summary.blocks[b]},
                                {"squared_error",
                                 summary.per_replication[static_cast<std::size_t>(rep)][b]}});
    return rows;
}

EstimationProblem build_problem(const ExperimentConfig& cfg, const TaskParams& p,
                                const std::string& arm, int n, double delta) {
    const LatentDagSystem sys = arm_system(cfg, arm);
    EstimationProblem problem{
        p.mode == "eta_i" ? EstimationMode::multi_trajectory_eta_family
                          : EstimationMode::single_trajectory_eta,
        sys};
    const std::vector<double> times = equally_spaced(n, p.t_start, p.t_end);
    if (problem.mode == EstimationMode::single_trajectory_eta) {
        problem.observations.push_back(sample_trajectory(sys, times));
    } else {
        require(static_cast<int>(p.z0_stars.size()) == sys.p(), errc::parse_error,
                "task.z0_stars must contain p vectors");
        for (const Vector& z0s : p.z0_stars) {
            LatentDagSystem controlled(sys.x0, z0s, sys.A, sys.B, sys.G);
            problem.observations.push_back(sample_trajectory(controlled, times));
            problem.z0_stars.push_back(z0s);
        }
    }
    problem.init_delta = delta;
    problem.solver = p.solver;
    problem.seed = p.seed;
    return problem;
}

double default_delta(const TaskParams& p) {
    if (p.delta_given) return p.delta;
    return p.mode == "eta_i" ? 0.3 : 0.1;
}

json run_estimate(const ExperimentConfig& cfg, const TaskParams& p) {
    const EstimationProblem problem = build_problem(cfg, p, p.arm, p.n, default_delta(p));
    const ReplicationSummary summary = run_replications(problem, p.reps);
    const std::string case_name = cfg.name + "/" + p.arm;
    json out;
    out["mode"] = p.mode;
    out["seed"] = p.seed;
    out["delta"] = default_delta(p);
    out["cases"] = json::array(
        {json{{"case", case_name}, {"n", p.n}, {"summary", summary_to_json(summary)}}});
    out["rows"] = rows_to_json(case_name, p.n, summary);
    return out;
}

json run_reproduce(const ExperimentConfig& cfg, const TaskParams& p) {
    int table = cfg.task.value("table", p.mode == "eta_i" ? 2 : 1);
    TaskParams params = p;
    if (table == 2) params.mode = "eta_i";
    std::vector<int> n_values = params.n_values;
    if (n_values.empty()) n_values = table == 1 ? std::vector<int>{10, 100, 500}
                                                : std::vector<int>{10, 30, 50};
    json cases = json::array();
    json rows = json::array();
    for (const std::string arm : {"identifiable", "unidentifiable"}) {
        for (int n : n_values) {
            const EstimationProblem problem =
                build_problem(cfg, params, arm, n, default_delta(params));
            const ReplicationSummary summary = run_replications(problem, params.reps);
            cases.push_back(json{{"case", arm}, {"n", n}, {"summary", summary_to_json(summary)}});
            for (auto& row : rows_to_json(arm, n, summary)) rows.push_back(std::move(row));
        }
    }
    json out;
    out["table"] = table;
    out["mode"] = params.mode;
    out["seed"] = params.seed;
    out["delta"] = default_delta(params);
    out["replications"] = params.reps;
    out["cases"] = std::move(cases);
    out["rows"] = std::move(rows);
    return out;
}

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), errc::io_error, "cannot write " + tmp.string());
        out << content;
        require(out.good(), errc::io_error, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void flatten_report_csv(const json& report, std::ostringstream& out, const std::string& prefix) {
    const std::string id = prefix.empty() ? report.at("condition_id").get<std::string>()
                                          : prefix + "/" + report.at("condition_id").get<std::string>();
    out << id << ',' << (report.at("holds").get<bool>() ? "true" : "false") << ','
        << report.at("computed_rank").get<int>() << ',' << report.at("required_rank").get<int>()
        << ',' << format_double(report.at("margin").get<double>()) << ','
        << format_double(report.at("tolerance_used").get<double>()) << '\n';
    if (report.contains("sub_reports"))
        for (const auto& sub : report.at("sub_reports")) flatten_report_csv(sub, out, id);
}

}  // namespace

nlohmann::json report_to_json(const IdentifiabilityReport& report) {
    json j;
    j["condition_id"] = report.condition_id;
    j["holds"] = report.holds;
    j["tested_matrix_shape"] = json::array({report.tested_rows, report.tested_cols});
    j["computed_rank"] = report.computed_rank;
    j["required_rank"] = report.required_rank;
    j["margin"] = report.margin;
    j["largest_discarded_sv"] = report.largest_discarded_sv;
    j["tolerance_used"] = report.tolerance_used;
    if (!report.sub_reports.empty()) {
        json subs = json::array();
        for (const auto& sub : report.sub_reports) subs.push_back(report_to_json(sub));
        j["sub_reports"] = std::move(subs);
    }
    return j;
}

std::string config_digest(const nlohmann::json& j) {
    // nlohmann objects are key-sorted, so dump() is already canonical.
    const std::string canon = j.dump();
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (const unsigned char c : canon) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.name = j.value("name", "unnamed");

    const json& sys = need(j, "system", "");
    const std::string kind = need(sys, "kind", "system").get<std::string>();
    const Vector x0 = parse_vector(need(sys, "x0", "system"), "system.x0");
    const Vector z0 = parse_vector(need(sys, "z0", "system"), "system.z0");
    const Matrix a = parse_matrix(need(sys, "A", "system"), "system.A");
    const Matrix b = parse_matrix(need(sys, "B", "system"), "system.B");
    try {
        if (kind == "latent_dag") {
            const Matrix g = parse_matrix(need(sys, "G", "system"), "system.G");
            cfg.dag.emplace(x0, z0, a, b, g);
        } else if (kind == "latent_driver") {
            cfg.driver.emplace(x0, z0, a, b, parse_driver(need(sys, "driver", "system"), "system.driver"));
        } else {
            config_fail("system.kind", "unknown system kind '" + kind + "'");
        }
    } catch (const Error& e) {
        if (e.code() == errc::dimension_mismatch)
            config_fail("system", e.what());
        throw;
    }
    if (sys.contains("A_unidentifiable")) {
        Matrix alt = parse_matrix(sys.at("A_unidentifiable"), "system.A_unidentifiable");
        if (alt.rows() != x0.size() || alt.cols() != x0.size())
            config_fail("system.A_unidentifiable", "must be d x d");
        cfg.a_unidentifiable = std::move(alt);
    }

    if (j.contains("task")) {
        cfg.task = j.at("task");
        cfg.task_type = cfg.task.value("type", "");
    }
    if (j.contains("output")) {
        cfg.out_dir = j.at("output").value("dir", cfg.out_dir);
        cfg.format = j.at("output").value("format", cfg.format);
    }
    require(cfg.format == "csv" || cfg.format == "json", errc::parse_error,
            "output.format must be csv or json");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::io_error, "cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail(errc::parse_error, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides) {
    if (overrides.task_type) {
        cfg.task_type = *overrides.task_type;
        cfg.task["type"] = *overrides.task_type;
        cfg.raw["task"]["type"] = *overrides.task_type;
    }
    if (overrides.seed) {
        cfg.task["seed"] = *overrides.seed;
        cfg.raw["task"]["seed"] = *overrides.seed;
    }
    if (overrides.reps) {
        cfg.task["reps"] = *overrides.reps;
        cfg.raw["task"]["reps"] = *overrides.reps;
    }
    if (overrides.tolerance) {
        cfg.task["tolerance"] = *overrides.tolerance;
        cfg.raw["task"]["tolerance"] = *overrides.tolerance;
    }
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.format) {
        require(*overrides.format == "csv" || *overrides.format == "json", errc::parse_error,
                "format must be csv or json");
        cfg.format = *overrides.format;
    }
}

ResultRecord run_task(const ExperimentConfig& cfg) {
    const TaskParams params = parse_task_params(cfg);
    ResultRecord record;
    record.config_digest = config_digest(cfg.raw);
    record.config_name = cfg.name;
    record.task_type = cfg.task_type;
    record.tool_version = ODEIDENT_VERSION;
    record.timestamp = iso_timestamp();

    if (cfg.task_type == "check")
        record.outputs = run_check(cfg, params);
    else if (cfg.task_type == "simulate")
        record.outputs = run_simulate(cfg, params);
    else if (cfg.task_type == "intervene")
        record.outputs = run_intervene(cfg, params);
    else if (cfg.task_type == "estimate")
        record.outputs = run_estimate(cfg, params);
    else if (cfg.task_type == "reproduce")
        record.outputs = run_reproduce(cfg, params);
    else
        fail(errc::parse_error, "task.type must be one of check|simulate|intervene|estimate|reproduce"
                                 " (got '" + cfg.task_type + "')");
    return record;
}

std::vector<std::string> emit_results(const ResultRecord& record, const std::string& format,
                                      const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    require(!ec, errc::io_error, "cannot create output directory '" + out_dir + "'");

    std::vector<std::string> written;
    json result;
    result["config_digest"] = record.config_digest;
    result["config_name"] = record.config_name;
    result["task"] = record.task_type;
    result["tool_version"] = record.tool_version;
    result["timestamp"] = record.timestamp;
    result["outputs"] = record.outputs;
    const fs::path result_path = fs::path(out_dir) / "result.json";
    atomic_write(result_path, result.dump(2) + "\n");
    written.push_back(result_path.string());

    if (format != "csv") return written;

    if (record.task_type == "check") {
        std::ostringstream csv;
        csv << "condition_id,holds,computed_rank,required_rank,margin,tolerance\n";
        for (const auto& report : record.outputs.at("reports"))
            flatten_report_csv(report, csv, "");
        const fs::path path = fs::path(out_dir) / "reports.csv";
        atomic_write(path, csv.str());
        written.push_back(path.string());
    } else if (record.task_type == "simulate" || record.task_type == "intervene") {
        const json& grid = record.outputs.at("trajectory");
        std::ostringstream csv;
        const std::size_t d = grid.at("states")[0].size();
        csv << "t";
        for (std::size_t c = 0; c < d; ++c) csv << ",x" << c + 1;
        csv << '\n';
        for (std::size_t r = 0; r < grid.at("times").size(); ++r) {
            csv << format_double(grid.at("times")[r].get<double>());
            for (std::size_t c = 0; c < d; ++c)
                csv << ',' << format_double(grid.at("states")[r][c].get<double>());
            csv << '\n';
        }
        const fs::path path = fs::path(out_dir) / "trajectory.csv";
        atomic_write(path, csv.str());
        written.push_back(path.string());
    } else if (record.task_type == "estimate" || record.task_type == "reproduce") {
        std::ostringstream rows;
        rows << "case,n,replication,block,squared_error\n";
        for (const auto& row : record.outputs.at("rows"))
            rows << row.at("case").get<std::string>() << ',' << row.at("n").get<int>() << ','
                 << row.at("replication").get<int>() << ',' << row.at("block").get<std::string>()
                 << ',' << format_double(row.at("squared_error").get<double>()) << '\n';
        const fs::path rows_path = fs::path(out_dir) / "replications.csv";
        atomic_write(rows_path, rows.str());
        written.push_back(rows_path.string());

        std::ostringstream summary;
        summary << "case,n,block,mse_mean,mse_var\n";
        for (const auto& c : record.outputs.at("cases"))
            for (const auto& block : c.at("summary").at("blocks"))
                summary << c.at("case").get<std::string>() << ',' << c.at("n").get<int>() << ','
                        << block.at("block").get<std::string>() << ','
                        << format_double(block.at("mse_mean").get<double>()) << ','
                        << format_double(block.at("mse_var").get<double>()) << '\n';
        const fs::path summary_path = fs::path(out_dir) / "summary.csv";
        atomic_write(summary_path, summary.str());
        written.push_back(summary_path.string());
    }
    return written;
}

}  // namespace odeident
