#include "flock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flock/error.hpp"
#include "flock/spectral.hpp"

namespace flock {

namespace {

constexpr double kFactorSlack = 1e-9;

double checked_factor(double h, double phi) {
    const double f = 1.0 - h * phi;
    if (!(f >= -kFactorSlack && f <= 1.0 + kFactorSlack))
        throw InvalidArgument("series factor 1 - h*phi = " + std::to_string(f) + " outside [0, 1] (phi = " +
                              std::to_string(phi) + ", h = " + std::to_string(h) + ")");
    return std::clamp(f, 0.0, 1.0);
}

// log(exp(a) + exp(b))
double log_add(double a, double b) {
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

std::pair<Vec3, Vec3> mean_position_velocity(const FlockState& state) {
    Vec3 x{0, 0, 0}, v{0, 0, 0};
    for (std::size_t i = 0; i < state.agents(); ++i) {
        x = x + state.positions[i];
        v = v + state.velocities[i];
    }
    const double inv = 1.0 / static_cast<double>(state.agents());
    return {inv * x, inv * v};
}

RelativeState to_relative(const FlockState& state, const Vec3& v_bar_0) {
    const auto [x_bar, v_bar] = mean_position_velocity(state);
    RelativeState r;
    r.rel_positions.reserve(state.agents());
    r.rel_velocities.reserve(state.agents());
    for (std::size_t i = 0; i < state.agents(); ++i) {
        r.rel_positions.push_back(state.positions[i] - x_bar);
        r.rel_velocities.push_back(state.velocities[i] - v_bar_0);
    }
    return r;
}

double flock_norm(std::span<const Vec3> vectors) {
    double s = 0.0;
    for (const auto& v : vectors) s += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return std::sqrt(s);
}

std::optional<double> min_positive_weight(const WeightMatrix& weights) {
    std::optional<double> best;
    for (std::size_t i = 0; i < weights.size(); ++i)
        for (std::size_t j = i + 1; j < weights.size(); ++j) {
            const double w = weights(i, j);
            if (w > 0.0 && (!best || w < *best)) best = w;
        }
    return best;
}

BoundConstants bound_constants(const RelativeState& initial, const ModelParams& params, double phi_bar) {
    const double x0 = flock_norm(initial.rel_positions);
    const double v0 = flock_norm(initial.rel_velocities);
    if (!(v0 > 0.0))
        throw InvalidArgument("bound_constants: initial relative velocity is zero, the flock is already at consensus");
    const double scale = params.h * v0;
    BoundConstants c;
    c.alpha = params.alpha;
    c.A = std::pow(scale, -params.alpha);
    c.B = std::pow((1.0 + x0) / scale, params.alpha);
    c.exponent_phi_h_A = phi_bar * params.h * c.A;
    if (params.alpha < 1.0) c.gamma = c.exponent_phi_h_A / (1.0 - params.alpha);
    return c;
}

double mu_lower_bound(std::uint64_t t, const BoundConstants& c) {
    // t^alpha with the t = 0 term taken as 0 (it stands for (h |v0| t)^alpha).
    const double growth = t == 0 ? 0.0 : std::pow(static_cast<double>(t), c.alpha);
    return c.A / (c.B + growth);
}

SeriesState series_advance(const SeriesState& s, double h, double phi) {
    if (s.tau == 0) throw InvalidArgument("series_advance: start from tau = 1");
    SeriesState next = s;
    next.running_product = s.running_product * checked_factor(h, phi);
    next.partial_sum = s.partial_sum + next.running_product;
    next.tau = s.tau + 1;
    return next;
}

SeriesState series_partial(std::span<const double> phi_history, double h, std::uint64_t tau) {
    if (tau == 0) return {};
    if (phi_history.size() + 1 < tau)
        throw InvalidArgument("series_partial: need " + std::to_string(tau - 1) + " Fiedler numbers, got " +
                              std::to_string(phi_history.size()));
    SeriesState s{1, 0.0, 1.0};
    while (s.tau < tau) s = series_advance(s, h, phi_history[s.tau - 1]);
    return s;
}

double term_bound_sublinear(std::uint64_t j, const BoundConstants& c) {
    if (!(c.alpha < 1.0) || !c.gamma) throw InvalidArgument("term_bound_sublinear: requires alpha < 1");
    return std::exp(-*c.gamma * std::pow(static_cast<double>(j), 1.0 - c.alpha));
}

double term_bound_linear(std::uint64_t j, const BoundConstants& c) {
    if (c.alpha != 1.0) throw InvalidArgument("term_bound_linear: requires alpha = 1");
    return std::pow((c.B + 1.0) / (c.B + static_cast<double>(j) + 1.0), c.exponent_phi_h_A);
}

ProbeResult probe_series(const std::function<double(double)>& log_term) {
    constexpr double kDivergent = 1e6;
    constexpr double kNegligible = 1e-12;
    const double ln2 = std::log(2.0);

    ProbeResult r;
    for (std::uint64_t n = 0;; ++n) {
        const double log_j = static_cast<double>(n) * ln2;
        const double increment = std::exp(log_j + log_term(log_j));
        r.partial_sum += increment;
        r.iterations = n + 1;
        if (increment < kNegligible) {
            r.verdict = SeriesVerdict::Converges;
            return r;
        }
        if (r.partial_sum > kDivergent) {
            r.verdict = SeriesVerdict::Diverges;
            return r;
        }
    }
}

ProbeResult probe_linear_term_series(const BoundConstants& c) {
    if (c.alpha != 1.0) throw InvalidArgument("probe_linear_term_series: requires alpha = 1");
    const double log_b1 = std::log(c.B + 1.0);
    const double p = c.exponent_phi_h_A;
    return probe_series([=](double log_j) { return p * (log_b1 - log_add(log_b1, log_j)); });
}

Estimate critical_velocity_estimate(std::size_t k, double lambda, std::uint64_t n_samples, Rng& rng) {
    if (n_samples == 0) throw InvalidArgument("critical_velocity_estimate: need at least one sample");
    const ModelParams params{k, 0.0, lambda, 1.0 / static_cast<double>(k)};
    // Welford running mean and variance.
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t n = 1; n <= n_samples; ++n) {
        const double phi = fiedler_noncolored(sample_failure_mask(params, rng));
        const double delta = phi - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (phi - mean);
    }
    Estimate e;
    e.value = mean;
    if (n_samples > 1) {
        const double var = m2 / static_cast<double>(n_samples - 1);
        e.std_error = std::sqrt(var / static_cast<double>(n_samples));
    }
    return e;
}

double critical_velocity_exact(std::size_t k, double lambda) {
    if (k < 2 || k > 5) throw InvalidArgument("critical_velocity_exact: k must be in [2, 5], got " + std::to_string(k));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    const std::size_t m = pairs.size();

    double expectation = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
        FailureMask mask(k);
        std::size_t edges = 0;
        for (std::size_t e = 0; e < m; ++e)
            if (bits >> e & 1) {
                mask.set(pairs[e].first, pairs[e].second, true);
                ++edges;
            }
        const double p = std::pow(1.0 - lambda, static_cast<double>(edges)) *
                         std::pow(lambda, static_cast<double>(m - edges));
        if (p == 0.0) continue;
        expectation += p * fiedler_noncolored(mask);
    }
    return expectation;
}

}  // namespace flock
