#pragma once

// Test-only reference computations, kept independent of the library's
// numerical paths (Eigen's solver instead of the Jacobi sweeps, exact
// integer traces, explicit enumeration).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "flock/core.hpp"
#include "flock/matrix.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const flock::SquareMatrix& m) {
    Eigen::MatrixXd e(m.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) e(i, j) = m(i, j);
    return e;
}

inline std::vector<double> eigenvalues(const flock::SquareMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + m.size());
    std::sort(out.begin(), out.end());
    return out;
}

/// Laplacian of a weight matrix, built directly from the definition.
inline Eigen::MatrixXd laplacian(const flock::SquareMatrix& w) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                l(i, j) = -w(i, j);
                l(i, i) += w(i, j);
            }
    return l;
}

inline double fiedler(const flock::SquareMatrix& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(oracle::laplacian(w), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(1);
}

inline flock::SquareMatrix mask_weights(const flock::FailureMask& m) {
    flock::SquareMatrix w(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) w(i, j) = m(i, j) ? 1.0 : 0.0;
    return w;
}

/// tr(L^p) for p = 1..k, in exact integer arithmetic, for a 0-1 graph.
/// Newton's identities tie these to the characteristic polynomial, so
/// matching power sums pin down the whole spectrum.
inline std::vector<std::int64_t> laplacian_power_traces(const flock::FailureMask& m) {
    const std::size_t k = m.size();
    std::vector<std::int64_t> l(k * k, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && m(i, j)) {
                l[i * k + j] = -1;
                l[i * k + i] += 1;
            }
    std::vector<std::int64_t> power = l, traces;
    for (std::size_t p = 1; p <= k; ++p) {
        std::int64_t tr = 0;
        for (std::size_t i = 0; i < k; ++i) tr += power[i * k + i];
        traces.push_back(tr);
        std::vector<std::int64_t> next(k * k, 0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t r = 0; r < k; ++r) next[i * k + j] += power[i * k + r] * l[r * k + j];
        power = std::move(next);
    }
    return traces;
}

/// Characteristic polynomial det(x I - M) coefficients (monic, highest first)
/// via Faddeev-LeVerrier, evaluated at x.
inline double charpoly_at(const flock::SquareMatrix& m, double x) {
    const Eigen::MatrixXd a = to_eigen(m);
    const auto n = a.rows();
    Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = 1.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        mk = a * mk + c[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
        c[static_cast<std::size_t>(k)] = -(a * mk).trace() / static_cast<double>(k);
    }
    double v = 0.0;
    for (double coef : c) v = v * x + coef;
    return v;
}

/// Every edge subset of K_k as a mask, with its edge count.
template <class F>
void for_each_graph(std::size_t k, F&& visit) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pairs.size()); ++bits) {
        flock::FailureMask m(k);
        std::size_t edges = 0;
        for (std::size_t e = 0; e < pairs.size(); ++e)
            if (bits >> e & 1) {
                m.set(pairs[e].first, pairs[e].second, true);
                ++edges;
            }
        visit(m, edges, pairs.size());
    }
}

/// Exact expected plain Fiedler number, with Eigen as the eigensolver.
inline double expected_fiedler(std::size_t k, double lambda) {
    double e = 0.0;
    for_each_graph(k, [&](const flock::FailureMask& m, std::size_t edges, std::size_t pairs) {
        const double p = std::pow(1.0 - lambda, static_cast<double>(edges)) *
                         std::pow(lambda, static_cast<double>(pairs - edges));
        double phi = fiedler(mask_weights(m));
        if (phi < 1e-9) phi = 0.0;
        e += p * phi;
    });
    return e;
}

}  // namespace oracle
