#pragma once

// Discrete-time Cucker-Smale dynamics with independent per-pair link failures.

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "flock/matrix.hpp"
#include "flock/rng.hpp"

namespace flock {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double norm(const Vec3& v);

/// Positions and velocities of k agents in R^3 at step index t.
struct FlockState {
    std::uint64_t t = 0;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;

    std::size_t agents() const { return positions.size(); }

    /// Throws InvalidArgument unless k >= 2, sizes agree and every coordinate is finite.
    void validate() const;

    friend bool operator==(const FlockState&, const FlockState&) = default;
};

/// Model parameters. Construct through validate_timestep() before stepping.
struct ModelParams {
    std::size_t k = 0;
    double alpha = 0.0;
    double lambda = 0.0;
    double h = 0.0;
};

/// Returns `params` unchanged when k >= 2, alpha and lambda lie in [0, 1] and
/// 0 < h <= 1/k; throws ConfigError naming the offending field otherwise.
/// The step-size bound keeps every coefficient 1 - h * sum_j a_ij nonnegative.
ModelParams validate_timestep(const ModelParams& params);

/// (1 + distance)^(-alpha). Throws InvalidArgument for negative or NaN distance.
double cs_weight(double distance, double alpha);

/// Symmetric 0-1 link outcomes for one step; diagonal is always zero.
class FailureMask {
  public:
    FailureMask() = default;
    explicit FailureMask(std::size_t k) : k_(k), bits_(k * k, 0) {}

    static FailureMask all_connected(std::size_t k);
    /// Builds from an explicit edge list of (i, j) pairs, i != j.
    static FailureMask from_edges(std::size_t k, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

    std::size_t size() const { return k_; }
    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * k_ + j] != 0; }

    /// Sets the unordered pair {i, j}; i == j is ignored.
    void set(std::size_t i, std::size_t j, bool on);

    std::size_t edge_count() const;

    friend bool operator==(const FailureMask&, const FailureMask&) = default;

  private:
    std::size_t k_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// One Bernoulli(1 - lambda) draw per unordered pair, in row-major order of
/// the upper triangle, mirrored into the lower triangle.
FailureMask sample_failure_mask(const ModelParams& params, Rng& rng);

/// Colored-graph coefficients a_ij = mask_ij * (1 + |X_i - X_j|)^(-alpha).
class WeightMatrix {
  public:
    WeightMatrix() = default;
    explicit WeightMatrix(SquareMatrix entries);

    std::size_t size() const { return entries_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const SquareMatrix& entries() const { return entries_; }

  private:
    SquareMatrix entries_;
};

WeightMatrix weight_matrix(const FlockState& state, const FailureMask& mask, const ModelParams& params);

/// Simultaneous componentwise update:
///   X_i <- X_i + h V_i,   V_i <- V_i + h sum_j a_ij (V_j - V_i),
/// both evaluated from the time-t state. Increments t.
FlockState step(const FlockState& state, const WeightMatrix& weights, const ModelParams& params);

/// Builds the weights from `mask` and the current positions, then steps.
FlockState step(const FlockState& state, const FailureMask& mask, const ModelParams& params);

class LaplacianMatrix;

/// V <- (Id - h L) V applied per coordinate axis; positions as in step().
/// Throws InvalidArgument when the Laplacian and the state disagree on k.
FlockState step_matrix_form(const FlockState& state, const LaplacianMatrix& laplacian,
                            const ModelParams& params);

/// Row i of the convex-combination form of the velocity update:
/// coefficient 1 - h sum_j a_ij on the diagonal, h a_ij off it.
SquareMatrix convex_coefficients(const WeightMatrix& weights, double h);

}  // namespace flock
