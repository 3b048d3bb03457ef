#include "flock/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "flock/error.hpp"

namespace flock {

namespace {

// Accumulates lhs <= rhs + slack over many instances.
class Tally {
  public:
    Tally(std::string name, bool informational = false) {
        r_.name = std::move(name);
        r_.informational = informational;
    }

    void le(double lhs, double rhs, std::uint64_t t) {
        const double margin = rhs + kBoundSlack - lhs;
        ++r_.checked;
        if (!r_.worst_margin || margin < *r_.worst_margin) r_.worst_margin = margin;
        if (!(margin >= 0.0)) {
            ++r_.failed;
            if (!r_.first_failure) r_.first_failure = t;
        }
    }

    CheckResult done(std::string detail = {}) {
        r_.passed = r_.failed == 0;
        r_.detail = std::move(detail);
        return std::move(r_);
    }

  private:
    CheckResult r_;
};

void require_unstrided(const TrajectoryRecord& record) {
    for (std::size_t i = 0; i < record.rows.size(); ++i)
        if (record.rows[i].t != i) throw InvalidArgument("bound audit needs a record with record_stride = 1");
}

}  // namespace

bool BoundReport::passed() const {
    for (const auto& c : checks)
        if (!c.informational && !c.passed) return false;
    return true;
}

const CheckResult* BoundReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

bool velocity_series_bound_check(const TrajectoryRecord& record) {
    require_unstrided(record);
    if (record.rows.empty()) return true;
    const double v0 = record.rows.front().v_norm;
    double sum = 0.0;  // sum_{j < tau} |v[j]|
    for (const auto& row : record.rows) {
        // At row tau the sum still excludes |v[tau]|.
        if (row.t >= 1 && sum > v0 * (1.0 + row.s_partial) + kBoundSlack) return false;
        sum += row.v_norm;
    }
    return true;
}

BoundReport audit_bounds(const TrajectoryRecord& record, const ExperimentConfig& raw, double phi_bar) {
    const ExperimentConfig config = validated(raw);
    require_unstrided(record);
    const auto& rows = record.rows;
    const double h = config.h;
    const double k = static_cast<double>(config.k);

    BoundReport report;
    report.phi_bar = phi_bar;
    if (rows.empty()) return report;

    const double v0 = rows.front().v_norm;
    const double x0 = rows.front().x_norm;

    Tally contraction("contraction");
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        contraction.le(rows[i + 1].v_norm, (1.0 - h * rows[i].fiedler_colored) * rows[i].v_norm, rows[i + 1].t);
    report.checks.push_back(contraction.done("|v[t+1]| <= (1 - h phi[t]) |v[t]|"));

    Tally mu("mu_lower_bound");
    Tally mu_pairwise("mu_lower_bound_pairwise", true);
    std::string mu_detail = "mu[t] >= A / (B + t^alpha) on steps with an edge";
    if (v0 > 0.0) {
        const RelativeState rel0 = to_relative(record.initial, mean_position_velocity(record.initial).second);
        report.constants = bound_constants(rel0, config.params(), phi_bar);
        // Pairwise distances are bounded by sqrt(2) |x[t]|, not |x[t]|.
        BoundConstants pairwise = *report.constants;
        const double scale = std::numbers::sqrt2 * h * v0;
        pairwise.A = std::pow(scale, -config.alpha);
        pairwise.B = std::pow((1.0 + std::numbers::sqrt2 * x0) / scale, config.alpha);
        for (const auto& row : rows) {
            if (!row.mu) continue;
            mu.le(mu_lower_bound(row.t, *report.constants), *row.mu, row.t);
            mu_pairwise.le(mu_lower_bound(row.t, pairwise), *row.mu, row.t);
        }
    } else {
        mu_detail += " (skipped: consensus at t = 0)";
    }
    report.checks.push_back(mu.done(mu_detail));

    Tally weighted("weighted_fiedler_bound");
    for (const auto& row : rows) {
        const double rhs = row.mu ? row.fiedler_plain * *row.mu : 0.0;
        weighted.le(rhs, row.fiedler_colored, row.t);
    }
    report.checks.push_back(weighted.done("phi[t] >= phi_plain[t] mu[t]"));

    Tally degree("degree_bound");
    for (const auto& row : rows) degree.le(row.fiedler_colored, k / (k - 1.0) * row.min_degree, row.t);
    report.checks.push_back(degree.done("phi[t] <= k/(k-1) min degree"));

    Tally series("velocity_series");
    double sum = 0.0;
    for (const auto& row : rows) {
        if (row.t >= 1) series.le(sum, v0 * (1.0 + row.s_partial), row.t);
        sum += row.v_norm;
    }
    report.checks.push_back(series.done("sum_{j<tau} |v[j]| <= |v[0]| (1 + S[tau])"));

    Tally growth("position_growth");
    for (const auto& row : rows) growth.le(row.x_norm, x0 + static_cast<double>(row.t) * h * v0, row.t);
    report.checks.push_back(growth.done("|x[t]| <= |x[0]| + t h |v[0]|"));

    report.checks.push_back(mu_pairwise.done("mu[t] >= A'/(B' + t^alpha) with sqrt(2)-scaled pairwise constants"));

    if (config.alpha == 1.0 && report.constants) {
        Tally critical("critical_velocity", true);
        critical.le(v0, phi_bar, 0);
        std::ostringstream d;
        d << "|v[0]| = " << v0 << " vs expected plain Fiedler " << phi_bar
          << ", phi_bar h A = " << report.constants->exponent_phi_h_A;
        report.checks.push_back(critical.done(d.str()));
    }
    return report;
}

double expected_fiedler(const ExperimentConfig& config, std::uint64_t samples) {
    if (config.k <= 5) return critical_velocity_exact(config.k, config.lambda);
    Rng rng(stream_seed(config.master_seed, Stream::FiedlerMean));
    return critical_velocity_estimate(config.k, config.lambda, samples, rng).value;
}

BoundReport verify_bounds(const ExperimentConfig& raw) {
    ExperimentConfig config = validated(raw);
    config.record_stride = 1;
    const TrajectoryRecord record = run_trajectory(config);
    return audit_bounds(record, config, expected_fiedler(config));
}

std::string format_report(const BoundReport& report) {
    std::ostringstream out;
    char buf[64];
    for (const auto& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (c.informational) out << " [info]";
        out << " checked=" << c.checked << " failed=" << c.failed;
        if (c.worst_margin) {
            std::snprintf(buf, sizeof buf, "%.6e", *c.worst_margin);
            out << " worst_margin=" << buf;
        }
        if (c.first_failure) out << " first_failure_t=" << *c.first_failure;
        if (!c.detail.empty()) out << "  # " << c.detail;
        out << '\n';
    }
    out << (report.passed() ? "OVERALL PASS" : "OVERALL FAIL") << '\n';
    return out.str();
}

}  // namespace flock
