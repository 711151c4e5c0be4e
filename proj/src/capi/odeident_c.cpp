#include "odeident/odeident.h"

#include "core/config.hpp"

#include <cstring>
#include <new>
#include <string>

#ifndef ODEIDENT_VERSION
#define ODEIDENT_VERSION "0.0.0"
#endif

using nlohmann::json;

struct oi_system {
    std::optional<odeident::LatentDagSystem> dag;
    std::optional<odeident::LatentDriverSystem> driver;
    int d() const { return dag ? dag->d() : driver->d(); }
    int p() const { return dag ? dag->p() : driver->p(); }
};

namespace {

thread_local std::string g_last_error;

oi_status status_of(odeident::errc code) {
    using odeident::errc;
    switch (code) {
        case errc::invalid_argument: return OI_ERR_INVALID_ARGUMENT;
        case errc::dimension_mismatch: return OI_ERR_DIMENSION;
        case errc::not_a_dag: return OI_ERR_NOT_A_DAG;
        case errc::singular_matrix: return OI_ERR_SINGULAR;
        case errc::numerical_failure: return OI_ERR_NUMERIC;
        case errc::unknown_condition: return OI_ERR_UNKNOWN_CONDITION;
        case errc::parse_error: return OI_ERR_PARSE;
        case errc::io_error: return OI_ERR_IO;
    }
    return OI_ERR_INTERNAL;
}

template <typename Fn>
oi_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const odeident::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const json::exception& e) {
        g_last_error = e.what();
        return OI_ERR_PARSE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OI_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

oi_status require_args(bool ok) {
    if (!ok) {
        g_last_error = "null argument";
        return OI_ERR_INVALID_ARGUMENT;
    }
    return OI_OK;
}

// Wraps a bare system object into a minimal config so the check machinery and
// its defaults can be reused directly.
odeident::ExperimentConfig config_for(const oi_system& sys, const json& task) {
    json cfg_json;
    cfg_json["name"] = "capi";
    if (sys.dag) {
        const auto& s = *sys.dag;
        json sj;
        sj["kind"] = "latent_dag";
        sj["x0"] = std::vector<double>(s.x0.data(), s.x0.data() + s.x0.size());
        sj["z0"] = std::vector<double>(s.z0.data(), s.z0.data() + s.z0.size());
        auto mat = [](const odeident::Matrix& m) {
            json rows = json::array();
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
                rows.push_back(std::move(row));
            }
            return rows;
        };
        sj["A"] = mat(s.A);
        sj["B"] = mat(s.B);
        sj["G"] = mat(s.G);
        cfg_json["system"] = std::move(sj);
    }
    odeident::ExperimentConfig cfg;
    if (sys.dag) {
        cfg = odeident::parse_config(cfg_json);
    } else {
        cfg.name = "capi";
        cfg.driver = sys.driver;
        cfg.raw = cfg_json;
    }
    cfg.task = task;
    cfg.task_type = "check";
    return cfg;
}

}  // namespace

extern "C" {

const char* oi_version(void) { return ODEIDENT_VERSION; }

const char* oi_status_message(oi_status status) {
    switch (status) {
        case OI_OK: return "ok";
        case OI_ERR_INVALID_ARGUMENT: return "invalid argument";
        case OI_ERR_DIMENSION: return "dimension mismatch";
        case OI_ERR_NOT_A_DAG: return "latent coupling is not a DAG";
        case OI_ERR_SINGULAR: return "singular matrix";
        case OI_ERR_NUMERIC: return "numerical failure";
        case OI_ERR_UNKNOWN_CONDITION: return "unknown condition id";
        case OI_ERR_PARSE: return "parse or validation error";
        case OI_ERR_IO: return "i/o error";
        case OI_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* oi_last_error(void) { return g_last_error.c_str(); }

void oi_string_free(char* s) { delete[] s; }

oi_status oi_system_create_json(const char* system_json, oi_system** out) {
    if (oi_status s = require_args(system_json && out); s != OI_OK) return s;
    return guarded([&] {
        json sj = json::parse(system_json);
        json cfg_json;
        cfg_json["name"] = "capi";
        cfg_json["system"] = std::move(sj);
        odeident::ExperimentConfig cfg = odeident::parse_config(cfg_json);
        auto* sys = new oi_system{std::move(cfg.dag), std::move(cfg.driver)};
        *out = sys;
        return OI_OK;
    });
}

void oi_system_destroy(oi_system* sys) { delete sys; }

oi_status oi_system_dims(const oi_system* sys, int* d, int* p) {
    if (oi_status s = require_args(sys && d && p); s != OI_OK) return s;
    *d = sys->d();
    *p = sys->p();
    return OI_OK;
}

oi_status oi_system_observed_state(const oi_system* sys, double t, double* out_x) {
    if (oi_status s = require_args(sys && out_x); s != OI_OK) return s;
    return guarded([&] {
        const odeident::Vector x = sys->dag ? odeident::observed_state(*sys->dag, t)
                                            : odeident::observed_state(*sys->driver, t);
        std::memcpy(out_x, x.data(), sizeof(double) * static_cast<std::size_t>(x.size()));
        return OI_OK;
    });
}

oi_status oi_system_sample(const oi_system* sys, const double* times, int n, double* out) {
    if (oi_status s = require_args(sys && times && out && n > 0); s != OI_OK) return s;
    return guarded([&] {
        const std::vector<double> grid(times, times + n);
        const odeident::TrajectoryGrid traj = sys->dag
                                                  ? odeident::sample_trajectory(*sys->dag, grid)
                                                  : odeident::sample_trajectory(*sys->driver, grid);
        for (Eigen::Index r = 0; r < traj.states.rows(); ++r)
            for (Eigen::Index c = 0; c < traj.states.cols(); ++c)
                out[r * traj.states.cols() + c] = traj.states(r, c);
        return OI_OK;
    });
}

oi_status oi_system_intervene(const oi_system* sys, int clamp_index, double value,
                              const double* times, int n, double* out) {
    if (oi_status s = require_args(sys && times && out && n > 0); s != OI_OK) return s;
    return guarded([&] {
        odeident::require(sys->dag.has_value(), odeident::errc::invalid_argument,
                          "interventions require a latent_dag system");
        const auto flow = odeident::intervene_clamp(*sys->dag, {clamp_index, value});
        const int d = sys->d();
        for (int j = 0; j < n; ++j) {
            const odeident::Vector x = flow(times[j]);
            std::memcpy(out + static_cast<std::size_t>(j) * d, x.data(),
                        sizeof(double) * static_cast<std::size_t>(d));
        }
        return OI_OK;
    });
}

oi_status oi_system_check(const oi_system* sys, const char* condition_json, char** report_json) {
    if (oi_status s = require_args(sys && condition_json && report_json); s != OI_OK) return s;
    return guarded([&] {
        json cj = json::parse(condition_json);
        const std::string id = cj.value("id", "");
        odeident::require(!id.empty(), odeident::errc::unknown_condition,
                          "condition_json needs an \"id\" field");
        json task = cj;
        task.erase("id");
        task["type"] = "check";
        task["conditions"] = json::array({id});
        odeident::ExperimentConfig cfg = config_for(*sys, task);
        const odeident::ResultRecord record = odeident::run_task(cfg);
        *report_json = copy_string(record.outputs.at("reports").at(0).dump());
        return *report_json ? OI_OK : OI_ERR_INTERNAL;
    });
}

oi_status oi_run_config_json(const char* config_json, const char* overrides_json,
                             const char* out_dir, char** record_json) {
    if (oi_status s = require_args(config_json != nullptr); s != OI_OK) return s;
    return guarded([&] {
        odeident::ExperimentConfig cfg = odeident::parse_config(json::parse(config_json));
        if (overrides_json && *overrides_json) {
            const json ov = json::parse(overrides_json);
            odeident::ConfigOverrides overrides;
            if (ov.contains("task_type")) overrides.task_type = ov.at("task_type").get<std::string>();
            if (ov.contains("seed")) overrides.seed = ov.at("seed").get<std::uint64_t>();
            if (ov.contains("reps")) overrides.reps = ov.at("reps").get<int>();
            if (ov.contains("tolerance")) overrides.tolerance = ov.at("tolerance").get<double>();
            if (ov.contains("format")) overrides.format = ov.at("format").get<std::string>();
            odeident::apply_overrides(cfg, overrides);
        }
        const odeident::ResultRecord record = odeident::run_task(cfg);
        if (out_dir && *out_dir) odeident::emit_results(record, cfg.format, out_dir);
        if (record_json) {
            json out;
            out["config_digest"] = record.config_digest;
            out["config_name"] = record.config_name;
            out["task"] = record.task_type;
            out["tool_version"] = record.tool_version;
            out["timestamp"] = record.timestamp;
            out["outputs"] = record.outputs;
            *record_json = copy_string(out.dump());
            if (!*record_json) return OI_ERR_INTERNAL;
        }
        return OI_OK;
    });
}

oi_status oi_run_config_file(const char* path, const char* overrides_json, const char* out_dir,
                             char** record_json) {
    if (oi_status s = require_args(path != nullptr); s != OI_OK) return s;
    std::string content;
    {
        FILE* f = std::fopen(path, "rb");
        if (!f) {
            g_last_error = std::string("cannot open config file '") + path + "'";
            return OI_ERR_IO;
        }
        char buf[4096];
        std::size_t got;
        while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) content.append(buf, got);
        std::fclose(f);
    }
    return oi_run_config_json(content.c_str(), overrides_json, out_dir, record_json);
}

}  // extern "C"
