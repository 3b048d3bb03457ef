#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flock/core.hpp"
#include "flock/rng.hpp"

namespace flock {

/// One run (or one sweep cell) of the failure-perturbed model.
struct ExperimentConfig {
    std::size_t k = 10;
    double alpha = 0.0;
    double lambda = 0.0;
    /// 0 means "use 1/k".
    double h = 0.0;
    std::uint64_t horizon = 10000;
    std::uint64_t master_seed = 0;
    /// Explicit initial condition; standard-normal sampling when empty.
    std::optional<FlockState> initial;
    std::uint64_t record_stride = 1;
    double epsilon = 1e-6;
    bool stop_on_flocking = true;
    /// Lag used for the position-settling increment |x[T] - x[T - lag]|.
    std::uint64_t tail_lag = 100;

    ModelParams params() const { return {k, alpha, lambda, h}; }
};

/// Fills h = 1/k when unset and checks every field. Throws ConfigError.
ExperimentConfig validated(ExperimentConfig config);

/// Per-trajectory random streams. Initial conditions and link masks draw
/// from separate streams so that the mask sequence does not depend on how
/// the initial state was produced.
enum class Stream : std::uint64_t { InitialState = 0, Masks = 1, FiedlerMean = 2 };

inline std::uint64_t stream_seed(std::uint64_t master_seed, Stream s) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(s));
}

struct TrajectoryRow {
    std::uint64_t t = 0;
    double v_norm = 0.0;                // flock norm of V - V_bar(0)
    std::optional<double> log_v_norm;   // empty once v_norm < 1e-300
    double fiedler_colored = 0.0;       // phi[t] for the step t -> t+1
    double fiedler_plain = 0.0;         // Fiedler number of the step's 0-1 graph
    bool connected = false;
    std::optional<double> mu;           // smallest positive weight, empty without edges
    double s_partial = 0.0;             // S[t]
    // Kept in memory for the bound audit; not serialized.
    double x_norm = 0.0;
    double min_degree = 0.0;
};

struct TrajectoryRecord {
    std::vector<TrajectoryRow> rows;
    FlockState initial;
    FlockState final;
    /// |x[T] - x[T - tail_lag]| in the center-of-mass frame; empty if T < tail_lag.
    std::optional<double> tail_position_increment;
};

struct SweepCell {
    std::size_t cell = 0;
    std::size_t k = 0;
    double alpha = 0.0;
    double lambda = 0.0;
    double h = 0.0;
    std::uint64_t n_runs = 0;
    std::uint64_t n_flocked = 0;
    double flocking_fraction = 0.0;
    std::optional<double> median_flocking_time;
    std::uint64_t n_slopes = 0;
    std::optional<double> mean_slope;
    std::optional<double> slope_std;

    friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepSummary {
    std::vector<SweepCell> cells;

    friend bool operator==(const SweepSummary&, const SweepSummary&) = default;
};

/// 3k positions, then 3k velocities, agent-major, each N(0, 1) from rng.normal().
/// With an explicit initial state, validates and returns it (dimension
/// mismatch with config.k throws ConfigError).
FlockState sample_initial_state(const ExperimentConfig& config, Rng& rng);

/// Steps for `horizon` steps, or until |v[t]| < epsilon when stop_on_flocking.
/// Row t holds the state at step t and the graph drawn for the step t -> t+1.
/// Throws NumericError naming the step if the state stops being finite.
TrajectoryRecord run_trajectory(const ExperimentConfig& config);

/// First recorded t with v_norm < epsilon.
std::optional<std::uint64_t> detect_flocking(const TrajectoryRecord& record, double epsilon);

struct StepWindow {
    std::uint64_t first = 0;
    std::uint64_t last = UINT64_MAX;
};

struct DecayFit {
    double slope = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (t, log v_norm) over rows in the window.
/// Throws InvalidArgument with fewer than 10 usable points.
DecayFit fit_decay_rate(const TrajectoryRecord& record, StepWindow window = {});

/// Seed of run `run` in sweep cell `cell`.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t cell, std::uint64_t run);

/// Seed of the Fiedler-mean sampler for grid cell `cell`.
std::uint64_t critical_velocity_seed(std::uint64_t master_seed, std::size_t cell);

/// Runs every cell n_runs times, independent runs spread over `threads`
/// workers (0 = hardware concurrency). Aggregation happens in cell/run order
/// after all runs finish, so the result does not depend on scheduling.
SweepSummary monte_carlo_sweep(const std::vector<ExperimentConfig>& grid, std::uint64_t n_runs,
                               unsigned threads = 0);

}  // namespace flock
