#pragma once

// Conserved quantities, center-of-mass coordinates and the series/term bounds
// that drive the almost-sure flocking argument.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flock/core.hpp"
#include "flock/rng.hpp"

namespace flock {

/// Coordinates in the frame of the center of mass moving with V_bar(0).
struct RelativeState {
    std::vector<Vec3> rel_positions;   // X_i - X_bar(t)
    std::vector<Vec3> rel_velocities;  // V_i - V_bar(0)
};

struct BoundConstants {
    double A = 0.0;
    double B = 0.0;
    double alpha = 0.0;
    /// phi_bar * h * A / (1 - alpha); only meaningful for alpha < 1.
    std::optional<double> gamma;
    /// phi_bar * h * A, the exponent of the alpha = 1 term bound.
    double exponent_phi_h_A = 0.0;
};

struct SeriesState {
    std::uint64_t tau = 0;
    double partial_sum = 0.0;
    double running_product = 1.0;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Agent-averaged position and velocity.
std::pair<Vec3, Vec3> mean_position_velocity(const FlockState& state);

RelativeState to_relative(const FlockState& state, const Vec3& v_bar_0);

/// Euclidean norm of the stacked 3k-vector.
double flock_norm(std::span<const Vec3> vectors);

/// Smallest strictly positive off-diagonal weight; nullopt for the zero matrix.
std::optional<double> min_positive_weight(const WeightMatrix& weights);

/// A = (h |v0|)^-alpha, B = ((1 + |x0|) / (h |v0|))^alpha from the initial
/// relative state. Throws InvalidArgument when |v0| = 0: the flock is
/// already at consensus and no bound is needed.
BoundConstants bound_constants(const RelativeState& initial, const ModelParams& params, double phi_bar);

/// A / (B + t^alpha), lower bound on the smallest positive weight at step t.
double mu_lower_bound(std::uint64_t t, const BoundConstants& c);

/// S[tau] = sum_{j=1}^{tau-1} prod_{i=0}^{j-1} (1 - h phi[i]), accumulated
/// with a running product. Throws InvalidArgument if a factor leaves [0, 1]
/// or phi_history holds fewer than tau - 1 entries.
SeriesState series_partial(std::span<const double> phi_history, double h, std::uint64_t tau);

/// Adds one more product factor (1 - h phi) to a series state: tau -> tau + 1.
SeriesState series_advance(const SeriesState& s, double h, double phi);

/// exp(-gamma j^(1 - alpha)). Throws InvalidArgument for alpha = 1.
double term_bound_sublinear(std::uint64_t j, const BoundConstants& c);

/// ((B + 1) / (B + j + 1))^(phi_bar h A). Throws InvalidArgument unless alpha = 1.
double term_bound_linear(std::uint64_t j, const BoundConstants& c);

enum class SeriesVerdict { Converges, Diverges };

struct ProbeResult {
    SeriesVerdict verdict = SeriesVerdict::Converges;
    std::uint64_t iterations = 0;
    double partial_sum = 0.0;
};

/// Convergence probe for a series with positive nonincreasing terms given in
/// log form, log_term(j) for j >= 0. Runs on the Cauchy-condensed series
/// sum_n 2^n term(2^n): divergent once the condensed partial sum exceeds
/// 1e6 before an increment has dropped below 1e-12, convergent once an
/// increment drops below 1e-12.
ProbeResult probe_series(const std::function<double(double)>& log_term);

/// Probe applied to term_bound_linear.
ProbeResult probe_linear_term_series(const BoundConstants& c);

/// Monte Carlo mean of the non-colored Fiedler number over independent masks.
Estimate critical_velocity_estimate(std::size_t k, double lambda, std::uint64_t n_samples, Rng& rng);

/// Exhaustive expectation over all 2^(k(k-1)/2) masks. Throws InvalidArgument for k > 5.
double critical_velocity_exact(std::size_t k, double lambda);

}  // namespace flock
