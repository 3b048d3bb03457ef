#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "flock/analysis.hpp"
#include "flock/experiment.hpp"

namespace flock {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr const char* kTrajectoryHeader = "t,v_norm,log_v_norm,fiedler_colored,fiedler_plain,connected,mu,S_partial";
inline constexpr const char* kSweepHeader =
    "cell,k,alpha,lambda,h,n_runs,n_flocked,flocking_fraction,median_flocking_time,n_slopes,mean_decay_slope,slope_std";

/// Applies "key=value" overrides to a config document. The value is read as
/// JSON when it parses, as a plain string otherwise.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

/// Parses a single-run config. Required keys: k, alpha, lambda. Defaults:
/// h = 1/k, horizon = 10000, seed = 0, epsilon = 1e-6, record_stride = 1,
/// stop_on_flocking = true, tail_lag = 100, initial = "normal".
/// Unknown keys, missing keys and constraint violations throw ConfigError
/// naming the field.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Same, from JSON text.
ExperimentConfig parse_config_text(std::string_view text);

/// Like parse_config, but k, alpha and lambda may be arrays; returns their
/// Cartesian product in k-major, then alpha, then lambda order.
std::vector<ExperimentConfig> parse_grid(const nlohmann::json& doc);

/// Reads a JSON document from disk. Throws IoError / ConfigError.
nlohmann::json load_document(const std::filesystem::path& path);

/// Normalized config as written into metadata.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 17 significant digits, enough for a lossless double round trip.
std::string format_double(double x);

/// CSV table plus `<path>.meta.json`. Throws IoError naming the path.
void write_trajectory(const TrajectoryRecord& record, const ExperimentConfig& config,
                      const std::filesystem::path& path);

/// Parses a file produced by write_trajectory (serialized columns only).
TrajectoryRecord read_trajectory(const std::filesystem::path& path);

void write_sweep(const SweepSummary& summary, const std::vector<ExperimentConfig>& grid, std::uint64_t n_runs,
                 const std::filesystem::path& path);

struct CriticalVelocityRow {
    std::size_t k = 0;
    double lambda = 0.0;
    std::uint64_t n_samples = 0;
    Estimate estimate;
    std::optional<double> exact;
};

void write_critical_velocity(const std::vector<CriticalVelocityRow>& rows, std::uint64_t seed,
                             const std::filesystem::path& path);

/// Writes `text` verbatim. Throws IoError naming the path.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace flock
