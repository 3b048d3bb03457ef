#include "flock/flock.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "flock/bounds.hpp"
#include "flock/error.hpp"
#include "flock/io.hpp"
#include "flock/spectral.hpp"

struct flock_config {
    nlohmann::json doc;
    std::vector<flock::ExperimentConfig> cells;
    std::string described;
};

struct flock_trajectory {
    flock::ExperimentConfig config;
    flock::TrajectoryRecord record;
};

struct flock_sweep {
    std::vector<flock::ExperimentConfig> grid;
    std::uint64_t n_runs = 0;
    flock::SweepSummary summary;
};

struct flock_bound_report {
    flock::BoundReport report;
    std::string text;
};

namespace {

thread_local std::string last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
flock_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return FLOCK_OK;
    } catch (const flock::ConfigError& e) {
        last_error = e.what();
        return FLOCK_ERR_CONFIG;
    } catch (const flock::InvalidArgument& e) {
        last_error = e.what();
        return FLOCK_ERR_INVALID_ARGUMENT;
    } catch (const flock::NumericError& e) {
        last_error = e.what();
        return FLOCK_ERR_NUMERIC;
    } catch (const flock::IoError& e) {
        last_error = e.what();
        return FLOCK_ERR_IO;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return FLOCK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return FLOCK_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return FLOCK_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) throw flock::InvalidArgument(std::string(what) + " must not be NULL");
}

void reparse(flock_config& c) {
    c.cells = flock::parse_grid(c.doc);
    c.described.clear();
}

const flock::ExperimentConfig& single_cell(const flock_config& c) {
    if (c.cells.size() != 1)
        throw flock::ConfigError("", "config describes " + std::to_string(c.cells.size()) +
                                         " cells; this command needs a single (k, alpha, lambda)");
    return c.cells.front();
}

flock_config* adopt(nlohmann::json doc) {
    auto c = std::make_unique<flock_config>();
    c->doc = std::move(doc);
    reparse(*c);
    return c.release();
}

}  // namespace

extern "C" {

const char* flock_version(void) { return flock::kVersion; }

const char* flock_rng_algorithm(void) { return flock::kRngAlgorithm; }

const char* flock_last_error(void) { return last_error.c_str(); }

flock_status flock_config_parse(const char* json_text, flock_config** out) {
    return guarded([&] {
        require(json_text, "json_text");
        require(out, "out");
        auto doc = nlohmann::json::parse(json_text, nullptr, false);
        if (doc.is_discarded()) throw flock::ConfigError("", "config is not valid JSON");
        *out = adopt(std::move(doc));
    });
}

flock_status flock_config_load(const char* path, flock_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = adopt(flock::load_document(path));
    });
}

flock_status flock_config_set(flock_config* config, const char* assignment) {
    return guarded([&] {
        require(config, "config");
        require(assignment, "assignment");
        nlohmann::json doc = config->doc;
        flock::apply_overrides(doc, {assignment});
        auto cells = flock::parse_grid(doc);
        config->doc = std::move(doc);
        config->cells = std::move(cells);
        config->described.clear();
    });
}

flock_status flock_config_set_seed(flock_config* config, uint64_t seed) {
    return guarded([&] {
        require(config, "config");
        config->doc["seed"] = seed;
        reparse(*config);
    });
}

flock_status flock_config_cells(const flock_config* config, size_t* out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        *out = config->cells.size();
    });
}

flock_status flock_config_describe(const flock_config* config, size_t cell, const char** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        if (cell >= config->cells.size()) throw flock::InvalidArgument("cell index out of range");
        auto* mut = const_cast<flock_config*>(config);
        mut->described = flock::config_to_json(config->cells[cell]).dump();
        *out = mut->described.c_str();
    });
}

void flock_config_free(flock_config* config) { delete config; }

flock_status flock_simulate(const flock_config* config, flock_trajectory** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        auto t = std::make_unique<flock_trajectory>();
        t->config = single_cell(*config);
        t->record = flock::run_trajectory(t->config);
        *out = t.release();
    });
}

size_t flock_trajectory_rows(const flock_trajectory* trajectory) {
    return trajectory ? trajectory->record.rows.size() : 0;
}

flock_status flock_trajectory_row(const flock_trajectory* trajectory, size_t index, flock_row* out) {
    return guarded([&] {
        require(trajectory, "trajectory");
        require(out, "out");
        if (index >= trajectory->record.rows.size()) throw flock::InvalidArgument("row index out of range");
        const auto& r = trajectory->record.rows[index];
        *out = flock_row{r.t,
                         r.v_norm,
                         r.log_v_norm.value_or(kNaN),
                         r.fiedler_colored,
                         r.fiedler_plain,
                         r.connected ? 1 : 0,
                         r.mu.value_or(kNaN),
                         r.s_partial};
    });
}

int64_t flock_trajectory_flocking_step(const flock_trajectory* trajectory, double epsilon) {
    if (!trajectory || !(epsilon > 0.0)) return -1;
    const auto t = flock::detect_flocking(trajectory->record, epsilon);
    return t ? static_cast<int64_t>(*t) : -1;
}

flock_status flock_trajectory_fit_decay(const flock_trajectory* trajectory, uint64_t first, uint64_t last,
                                        double* slope, double* r_squared) {
    return guarded([&] {
        require(trajectory, "trajectory");
        require(slope, "slope");
        require(r_squared, "r_squared");
        const auto fit = flock::fit_decay_rate(trajectory->record, {first, last});
        *slope = fit.slope;
        *r_squared = fit.r_squared;
    });
}

flock_status flock_trajectory_write(const flock_trajectory* trajectory, const char* path) {
    return guarded([&] {
        require(trajectory, "trajectory");
        require(path, "path");
        flock::write_trajectory(trajectory->record, trajectory->config, path);
    });
}

void flock_trajectory_free(flock_trajectory* trajectory) { delete trajectory; }

flock_status flock_sweep_run(const flock_config* config, uint64_t n_runs, unsigned threads, flock_sweep** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        auto s = std::make_unique<flock_sweep>();
        s->grid = config->cells;
        s->n_runs = n_runs;
        s->summary = flock::monte_carlo_sweep(s->grid, n_runs, threads);
        *out = s.release();
    });
}

size_t flock_sweep_cells(const flock_sweep* sweep) { return sweep ? sweep->summary.cells.size() : 0; }

flock_status flock_sweep_flocking_fraction(const flock_sweep* sweep, size_t cell, double* out) {
    return guarded([&] {
        require(sweep, "sweep");
        require(out, "out");
        if (cell >= sweep->summary.cells.size()) throw flock::InvalidArgument("cell index out of range");
        *out = sweep->summary.cells[cell].flocking_fraction;
    });
}

flock_status flock_sweep_write(const flock_sweep* sweep, const char* path) {
    return guarded([&] {
        require(sweep, "sweep");
        require(path, "path");
        flock::write_sweep(sweep->summary, sweep->grid, sweep->n_runs, path);
    });
}

void flock_sweep_free(flock_sweep* sweep) { delete sweep; }

flock_status flock_critical_velocity_estimate(size_t k, double lambda, uint64_t n_samples, uint64_t seed,
                                              flock_estimate* out) {
    return guarded([&] {
        require(out, "out");
        flock::validate_timestep({k, 0.0, lambda, 1.0 / static_cast<double>(k)});
        flock::Rng rng(seed);
        const auto e = flock::critical_velocity_estimate(k, lambda, n_samples, rng);
        *out = flock_estimate{e.value, e.std_error};
    });
}

flock_status flock_critical_velocity_exact(size_t k, double lambda, double* out) {
    return guarded([&] {
        require(out, "out");
        flock::validate_timestep({k, 0.0, lambda, 1.0 / static_cast<double>(k)});
        *out = flock::critical_velocity_exact(k, lambda);
    });
}

flock_status flock_critical_velocity_write(const flock_config* config, uint64_t n_samples, const char* path) {
    return guarded([&] {
        require(config, "config");
        require(path, "path");
        std::vector<flock::CriticalVelocityRow> rows;
        std::uint64_t seed = 0;
        for (std::size_t c = 0; c < config->cells.size(); ++c) {
            const auto& cell = config->cells[c];
            seed = cell.master_seed;
            flock::Rng rng(flock::critical_velocity_seed(cell.master_seed, c));
            flock::CriticalVelocityRow row;
            row.k = cell.k;
            row.lambda = cell.lambda;
            row.n_samples = n_samples;
            row.estimate = flock::critical_velocity_estimate(cell.k, cell.lambda, n_samples, rng);
            if (cell.k <= 5) row.exact = flock::critical_velocity_exact(cell.k, cell.lambda);
            rows.push_back(row);
        }
        flock::write_critical_velocity(rows, seed, path);
    });
}

flock_status flock_verify_bounds(const flock_config* config, flock_bound_report** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        auto r = std::make_unique<flock_bound_report>();
        r->report = flock::verify_bounds(single_cell(*config));
        r->text = flock::format_report(r->report);
        *out = r.release();
    });
}

int flock_bound_report_passed(const flock_bound_report* report) { return report && report->report.passed(); }

size_t flock_bound_report_checks(const flock_bound_report* report) {
    return report ? report->report.checks.size() : 0;
}

flock_status flock_bound_report_check(const flock_bound_report* report, size_t index, flock_check* out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        if (index >= report->report.checks.size()) throw flock::InvalidArgument("check index out of range");
        const auto& c = report->report.checks[index];
        *out = flock_check{c.name.c_str(),   c.passed ? 1 : 0, c.informational ? 1 : 0,
                           c.checked,        c.failed,         c.worst_margin.value_or(kNaN)};
    });
}

const char* flock_bound_report_text(const flock_bound_report* report) { return report ? report->text.c_str() : ""; }

flock_status flock_bound_report_write(const flock_bound_report* report, const char* path) {
    return guarded([&] {
        require(report, "report");
        require(path, "path");
        flock::write_text(path, report->text);
    });
}

void flock_bound_report_free(flock_bound_report* report) { delete report; }

flock_status flock_fiedler(const double* weights, size_t k, double* out) {
    return guarded([&] {
        require(weights, "weights");
        require(out, "out");
        flock::SquareMatrix m(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) m(i, j) = weights[i * k + j];
        *out = flock::fiedler(flock::WeightMatrix(std::move(m)));
    });
}

}  // extern "C"
