#pragma once

// Numerical audit of the inequality chain behind the flocking argument,
// evaluated along one recorded trajectory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flock/analysis.hpp"
#include "flock/experiment.hpp"

namespace flock {

/// Absolute slack added to the right-hand side of every inequality.
inline constexpr double kBoundSlack = 1e-9;

struct CheckResult {
    std::string name;
    bool passed = true;
    /// Informational checks are reported but do not affect BoundReport::passed().
    bool informational = false;
    std::uint64_t checked = 0;
    std::uint64_t failed = 0;
    std::optional<std::uint64_t> first_failure;
    /// Smallest (rhs + slack - lhs) seen; negative means violated.
    std::optional<double> worst_margin;
    std::string detail;
};

struct BoundReport {
    std::vector<CheckResult> checks;
    std::optional<BoundConstants> constants;
    double phi_bar = 0.0;

    bool passed() const;
    const CheckResult* find(const std::string& name) const;
};

/// sum_{j<tau} |v[j]| <= |v[0]| (1 + S[tau]) + slack at every recorded tau.
/// Needs record_stride = 1.
bool velocity_series_bound_check(const TrajectoryRecord& record);

/// Evaluates every check on an existing record. `config` supplies h, alpha
/// and k; `phi_bar` is the expected non-colored Fiedler number used for the
/// informational critical-velocity line. The record must be unstrided.
BoundReport audit_bounds(const TrajectoryRecord& record, const ExperimentConfig& config, double phi_bar);

/// Expected non-colored Fiedler number for the config: exact for k <= 5,
/// otherwise a Monte Carlo estimate over `samples` masks drawn from the
/// config's FiedlerMean stream.
double expected_fiedler(const ExperimentConfig& config, std::uint64_t samples = 2000);

/// Runs the config with record_stride forced to 1 and audits the result.
BoundReport verify_bounds(const ExperimentConfig& config);

/// One "PASS name ..." / "FAIL name ..." line per check, then an overall line.
std::string format_report(const BoundReport& report);

}  // namespace flock
