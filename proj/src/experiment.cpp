#include "flock/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <sstream>
#include <thread>

#include "flock/analysis.hpp"
#include "flock/error.hpp"
#include "flock/spectral.hpp"

namespace flock {

namespace {

constexpr double kLogFloor = 1e-300;
constexpr std::size_t kMinFitPoints = 10;
constexpr std::uint64_t kSweepDomain = 0x5357454550ULL;  // "SWEEP"
constexpr std::uint64_t kCriticalVelocityDomain = 0x43524954ULL;  // "CRIT"

bool finite_state(const FlockState& s) {
    for (std::size_t i = 0; i < s.agents(); ++i)
        for (int c = 0; c < 3; ++c)
            if (!std::isfinite(s.positions[i][c]) || !std::isfinite(s.velocities[i][c])) return false;
    return true;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct RunOutcome {
    std::optional<std::uint64_t> flocking_time;
    std::optional<double> slope;
};

RunOutcome summarize_run(const TrajectoryRecord& record, double epsilon) {
    RunOutcome out;
    out.flocking_time = detect_flocking(record, epsilon);
    std::size_t usable = 0;
    for (const auto& row : record.rows) usable += row.log_v_norm.has_value();
    if (usable >= kMinFitPoints) out.slope = fit_decay_rate(record).slope;
    return out;
}

std::string describe(std::size_t cell, const ExperimentConfig& c) {
    std::ostringstream s;
    s << "cell " << cell << " (k=" << c.k << ", alpha=" << c.alpha << ", lambda=" << c.lambda << ")";
    return s.str();
}

}  // namespace

ExperimentConfig validated(ExperimentConfig config) {
    if (config.k < 2) throw ConfigError("k", "need at least 2 agents");
    if (config.h == 0.0) config.h = 1.0 / static_cast<double>(config.k);
    validate_timestep(config.params());
    if (config.horizon < 1) throw ConfigError("horizon", "must be at least 1");
    if (config.record_stride < 1) throw ConfigError("record_stride", "must be at least 1");
    if (!(config.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
    if (config.initial) {
        if (config.initial->agents() != config.k || config.initial->velocities.size() != config.k)
            throw ConfigError("initial", "explicit initial state must hold exactly k = " + std::to_string(config.k) +
                                             " positions and velocities");
        try {
            config.initial->validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError("initial", e.what());
        }
    }
    return config;
}

FlockState sample_initial_state(const ExperimentConfig& config, Rng& rng) {
    if (config.initial) {
        if (config.initial->agents() != config.k || config.initial->velocities.size() != config.k)
            throw ConfigError("initial", "explicit initial state does not match k = " + std::to_string(config.k));
        FlockState s = *config.initial;
        s.validate();
        return s;
    }
    FlockState s;
    s.positions.resize(config.k);
    s.velocities.resize(config.k);
    for (auto& p : s.positions)
        for (auto& c : p) c = rng.normal();
    for (auto& v : s.velocities)
        for (auto& c : v) c = rng.normal();
    return s;
}

TrajectoryRecord run_trajectory(const ExperimentConfig& raw) {
    const ExperimentConfig config = validated(raw);
    const ModelParams params = config.params();

    Rng ic_rng(stream_seed(config.master_seed, Stream::InitialState));
    Rng mask_rng(stream_seed(config.master_seed, Stream::Masks));

    TrajectoryRecord record;
    FlockState state = sample_initial_state(config, ic_rng);
    state.t = 0;
    record.initial = state;
    const Vec3 v_bar_0 = mean_position_velocity(state).second;

    std::deque<std::vector<Vec3>> tail;
    SeriesState series{1, 0.0, 1.0};  // S[1] = 0
    double phi_lag1 = 0.0;  // phi[t-1]
    double phi_lag2 = 0.0;  // phi[t-2]

    for (std::uint64_t t = 0;; ++t) {
        // S[t]: S[0] = S[1] = 0, then one factor per completed step.
        if (t >= 2) series = series_advance(series, params.h, phi_lag2);

        const RelativeState rel = to_relative(state, v_bar_0);
        const double v_norm = flock_norm(rel.rel_velocities);

        tail.push_back(rel.rel_positions);
        if (tail.size() > config.tail_lag + 1) tail.pop_front();

        const FailureMask mask = sample_failure_mask(params, mask_rng);
        const WeightMatrix weights = weight_matrix(state, mask, params);
        const double phi = fiedler(weights);

        if (t % config.record_stride == 0) {
            TrajectoryRow row;
            row.t = t;
            row.v_norm = v_norm;
            if (v_norm >= kLogFloor) row.log_v_norm = std::log(v_norm);
            row.fiedler_colored = phi;
            row.fiedler_plain = fiedler_noncolored(mask);
            row.connected = is_connected(mask);
            row.mu = min_positive_weight(weights);
            row.s_partial = t >= 1 ? series.partial_sum : 0.0;
            row.x_norm = flock_norm(rel.rel_positions);
            row.min_degree = min_degree(weights.entries());
            record.rows.push_back(row);
        }

        const bool flocked = config.stop_on_flocking && v_norm < config.epsilon;
        if (flocked || t == config.horizon) break;

        state = step(state, weights, params);
        if (!finite_state(state))
            throw NumericError("run_trajectory: non-finite state after step " + std::to_string(t) + " -> " +
                               std::to_string(t + 1));
        phi_lag2 = phi_lag1;
        phi_lag1 = phi;
    }

    record.final = state;
    if (tail.size() == config.tail_lag + 1) {
        std::vector<Vec3> diff(config.k);
        for (std::size_t i = 0; i < config.k; ++i) diff[i] = tail.back()[i] - tail.front()[i];
        record.tail_position_increment = flock_norm(diff);
    }
    return record;
}

std::optional<std::uint64_t> detect_flocking(const TrajectoryRecord& record, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("detect_flocking: epsilon must be positive");
    for (const auto& row : record.rows)
        if (row.v_norm < epsilon) return row.t;
    return std::nullopt;
}

DecayFit fit_decay_rate(const TrajectoryRecord& record, StepWindow window) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : record.rows)
        if (row.t >= window.first && row.t <= window.last && row.log_v_norm)
            pts.emplace_back(static_cast<double>(row.t), *row.log_v_norm);
    if (pts.size() < kMinFitPoints)
        throw InvalidArgument("fit_decay_rate: " + std::to_string(pts.size()) +
                              " positive-norm points in window, need " + std::to_string(kMinFitPoints));

    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    DecayFit fit;
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (auto [x, y] : pts) {
        const double r = y - (intercept + fit.slope * x);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t cell, std::uint64_t run) {
    return derive_seed(master_seed ^ kSweepDomain, cell, run);
}

std::uint64_t critical_velocity_seed(std::uint64_t master_seed, std::size_t cell) {
    return derive_seed(master_seed ^ kCriticalVelocityDomain, cell);
}

SweepSummary monte_carlo_sweep(const std::vector<ExperimentConfig>& grid, std::uint64_t n_runs, unsigned threads) {
    if (n_runs < 1) throw ConfigError("runs", "need at least one run per cell");
    std::vector<ExperimentConfig> cells;
    cells.reserve(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        try {
            cells.push_back(validated(grid[c]));
        } catch (const ConfigError& e) {
            throw ConfigError(e.field(), describe(c, grid[c]) + ": " + e.what());
        }
    }

    const std::size_t jobs = cells.size() * n_runs;
    std::vector<RunOutcome> outcomes(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t c = job / n_runs;
            const std::uint64_t r = job % n_runs;
            try {
                ExperimentConfig cfg = cells[c];
                cfg.master_seed = run_seed(cells[c].master_seed, c, r);
                outcomes[job] = summarize_run(run_trajectory(cfg), cfg.epsilon);
            } catch (...) {
                errors[job] = std::current_exception();
            }
        }
    };

    unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, jobs));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
        worker();
    }

    for (std::size_t job = 0; job < jobs; ++job) {
        if (!errors[job]) continue;
        const std::size_t c = job / n_runs;
        try {
            std::rethrow_exception(errors[job]);
        } catch (const std::exception& e) {
            throw NumericError(describe(c, cells[c]) + ", run " + std::to_string(job % n_runs) + ": " + e.what());
        }
    }

    SweepSummary summary;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        SweepCell out;
        out.cell = c;
        out.k = cells[c].k;
        out.alpha = cells[c].alpha;
        out.lambda = cells[c].lambda;
        out.h = cells[c].h;
        out.n_runs = n_runs;
        std::vector<double> times, slopes;
        for (std::uint64_t r = 0; r < n_runs; ++r) {
            const RunOutcome& o = outcomes[c * n_runs + r];
            if (o.flocking_time) times.push_back(static_cast<double>(*o.flocking_time));
            if (o.slope) slopes.push_back(*o.slope);
        }
        out.n_flocked = times.size();
        out.flocking_fraction = static_cast<double>(times.size()) / static_cast<double>(n_runs);
        if (!times.empty()) out.median_flocking_time = median(times);
        out.n_slopes = slopes.size();
        if (!slopes.empty()) {
            double mean = 0.0;
            for (double s : slopes) mean += s;
            mean /= static_cast<double>(slopes.size());
            out.mean_slope = mean;
            if (slopes.size() > 1) {
                double ss = 0.0;
                for (double s : slopes) ss += (s - mean) * (s - mean);
                out.slope_std = std::sqrt(ss / static_cast<double>(slopes.size() - 1));
            }
        }
        summary.cells.push_back(out);
    }
    return summary;
}

}  // namespace flock
