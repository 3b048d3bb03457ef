#include "flock/core.hpp"

#include <cmath>
#include <string>

#include "flock/error.hpp"
#include "flock/spectral.hpp"

namespace flock {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

void FlockState::validate() const {
    if (positions.size() != velocities.size())
        throw InvalidArgument("flock state: " + std::to_string(positions.size()) + " positions but " +
                              std::to_string(velocities.size()) + " velocities");
    if (positions.size() < 2) throw InvalidArgument("flock state: need at least 2 agents");
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (int c = 0; c < 3; ++c)
            if (!std::isfinite(positions[i][c]) || !std::isfinite(velocities[i][c]))
                throw InvalidArgument("flock state: non-finite coordinate for agent " + std::to_string(i));
}

ModelParams validate_timestep(const ModelParams& params) {
    if (params.k < 2) throw ConfigError("k", "need at least 2 agents, got " + std::to_string(params.k));
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
        throw ConfigError("alpha", "must lie in [0, 1], got " + std::to_string(params.alpha));
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
        throw ConfigError("lambda", "must lie in [0, 1], got " + std::to_string(params.lambda));
    if (!(params.h > 0.0)) throw ConfigError("h", "time step must be positive, got " + std::to_string(params.h));
    // h <= 1/k, compared as h*k <= 1 so that h = 1/k computed in floating point passes.
    if (params.h * static_cast<double>(params.k) > 1.0)
        throw ConfigError("h", "time step " + std::to_string(params.h) + " exceeds 1/k = " +
                                   std::to_string(1.0 / static_cast<double>(params.k)));
    return params;
}

double cs_weight(double distance, double alpha) {
    if (!(distance >= 0.0)) throw InvalidArgument("cs_weight: distance must be nonnegative");
    if (alpha == 0.0) return 1.0;
    return std::pow(1.0 + distance, -alpha);
}

FailureMask FailureMask::all_connected(std::size_t k) {
    FailureMask m(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) m.set(i, j, true);
    return m;
}

FailureMask FailureMask::from_edges(std::size_t k,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    FailureMask m(k);
    for (auto [i, j] : edges) {
        if (i >= k || j >= k || i == j) throw InvalidArgument("failure mask: bad edge");
        m.set(i, j, true);
    }
    return m;
}

void FailureMask::set(std::size_t i, std::size_t j, bool on) {
    if (i == j) return;
    bits_[i * k_ + j] = on;
    bits_[j * k_ + i] = on;
}

std::size_t FailureMask::edge_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = i + 1; j < k_; ++j) n += (*this)(i, j);
    return n;
}

FailureMask sample_failure_mask(const ModelParams& params, Rng& rng) {
    FailureMask m(params.k);
    const double p_link = 1.0 - params.lambda;
    for (std::size_t i = 0; i < params.k; ++i)
        for (std::size_t j = i + 1; j < params.k; ++j) m.set(i, j, rng.bernoulli(p_link));
    return m;
}

WeightMatrix::WeightMatrix(SquareMatrix entries) : entries_(std::move(entries)) {
    if (!entries_.is_symmetric(0.0)) throw InvalidArgument("weight matrix must be symmetric");
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_(i, i) != 0.0) throw InvalidArgument("weight matrix must have a zero diagonal");
}

WeightMatrix weight_matrix(const FlockState& state, const FailureMask& mask, const ModelParams& params) {
    const std::size_t k = state.agents();
    if (mask.size() != k) throw InvalidArgument("weight_matrix: mask and state disagree on k");
    SquareMatrix a(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            if (!mask(i, j)) continue;
            const double w = cs_weight(norm(state.positions[i] - state.positions[j]), params.alpha);
            a(i, j) = w;
            a(j, i) = w;
        }
    return WeightMatrix(std::move(a));
}

FlockState step(const FlockState& state, const WeightMatrix& weights, const ModelParams& params) {
    const std::size_t k = state.agents();
    if (weights.size() != k) throw InvalidArgument("step: weights and state disagree on k");
    const double h = params.h;

    FlockState next;
    next.t = state.t + 1;
    next.positions.resize(k);
    next.velocities.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        next.positions[i] = state.positions[i] + h * state.velocities[i];
        Vec3 pull{0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < k; ++j) {
            const double a = weights(i, j);
            if (a == 0.0) continue;
            pull = pull + a * (state.velocities[j] - state.velocities[i]);
        }
        next.velocities[i] = state.velocities[i] + h * pull;
    }
    return next;
}

FlockState step(const FlockState& state, const FailureMask& mask, const ModelParams& params) {
    return step(state, weight_matrix(state, mask, params), params);
}

FlockState step_matrix_form(const FlockState& state, const LaplacianMatrix& laplacian,
                            const ModelParams& params) {
    const std::size_t k = state.agents();
    if (laplacian.size() != k)
        throw InvalidArgument("step_matrix_form: Laplacian is " + std::to_string(laplacian.size()) + "x" +
                              std::to_string(laplacian.size()) + " but the flock has " + std::to_string(k) +
                              " agents");
    const double h = params.h;

    FlockState next;
    next.t = state.t + 1;
    next.positions.resize(k);
    next.velocities.resize(k);
    for (std::size_t i = 0; i < k; ++i) next.positions[i] = state.positions[i] + h * state.velocities[i];
    for (int c = 0; c < 3; ++c) {
        std::vector<double> axis(k);
        for (std::size_t i = 0; i < k; ++i) axis[i] = state.velocities[i][c];
        const std::vector<double> lv = laplacian.apply(axis);
        for (std::size_t i = 0; i < k; ++i) next.velocities[i][c] = axis[i] - h * lv[i];
    }
    return next;
}

SquareMatrix convex_coefficients(const WeightMatrix& weights, double h) {
    const std::size_t k = weights.size();
    SquareMatrix c(k);
    for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            c(i, j) = h * weights(i, j);
            row += weights(i, j);
        }
        c(i, i) = 1.0 - h * row;
    }
    return c;
}

}  // namespace flock
