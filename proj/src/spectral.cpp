#include "flock/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "flock/analysis.hpp"
#include "flock/error.hpp"

namespace flock {

namespace {

double offdiagonal_norm(const SquareMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

SquareMatrix mask_as_weights(const FailureMask& mask) {
    SquareMatrix a(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        for (std::size_t j = 0; j < mask.size(); ++j) a(i, j) = mask(i, j) ? 1.0 : 0.0;
    return a;
}

bool degree_bound_holds(const SquareMatrix& weights, double phi) {
    const std::size_t k = weights.size();
    if (k < 2) return true;
    const double bound = static_cast<double>(k) / static_cast<double>(k - 1) * min_degree(weights);
    return phi <= bound + 1e-9;
}

}  // namespace

std::vector<double> LaplacianMatrix::apply(const std::vector<double>& x) const {
    const std::size_t k = size();
    if (x.size() != k) throw InvalidArgument("Laplacian apply: dimension mismatch");
    std::vector<double> y(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += entries_(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

LaplacianMatrix laplacian(const SquareMatrix& weights) {
    const std::size_t k = weights.size();
    if (!weights.is_symmetric(1e-12)) throw InvalidArgument("laplacian: weight matrix is not symmetric");
    LaplacianMatrix l;
    l.entries_ = SquareMatrix(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (weights(i, i) != 0.0) throw InvalidArgument("laplacian: weight matrix has a nonzero diagonal");
        double degree = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            degree += weights(i, j);
            l.entries_(i, j) = -weights(i, j);
        }
        l.entries_(i, i) = degree;
    }
    return l;
}

LaplacianMatrix laplacian(const WeightMatrix& weights) { return laplacian(weights.entries()); }

LaplacianMatrix laplacian(const FailureMask& mask) { return laplacian(mask_as_weights(mask)); }

std::vector<double> symmetric_eigenvalues(const SquareMatrix& matrix, double tol) {
    if (!matrix.is_symmetric(1e-12)) throw InvalidArgument("symmetric_eigenvalues: matrix is not symmetric");
    const std::size_t n = matrix.size();
    SquareMatrix a = matrix;

    int sweep = 0;
    for (double off = offdiagonal_norm(a); off >= tol; off = offdiagonal_norm(a)) {
        if (sweep++ == kEigenSweepBudget) {
            std::ostringstream msg;
            msg << "symmetric_eigenvalues: no convergence after " << kEigenSweepBudget
                << " sweeps, residual off-diagonal norm " << off;
            throw NumericError(msg.str());
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle that annihilates a(p,q), smaller root for stability.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = arp - s * (arq + tau * arp);
                    a(r, q) = arq + s * (arp - tau * arq);
                    a(p, r) = a(r, p);
                    a(q, r) = a(r, q);
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

SpectralResult laplacian_spectrum(const LaplacianMatrix& l, double tol) {
    SpectralResult r;
    r.eigenvalues = symmetric_eigenvalues(l.entries(), tol);
    r.fiedler = r.eigenvalues.size() >= 2 ? r.eigenvalues[1] : 0.0;
    return r;
}

double fiedler(const LaplacianMatrix& l, double tol) {
    if (l.size() < 2) return 0.0;
    double phi = laplacian_spectrum(l, tol).fiedler;
    if (phi < kZeroClamp) phi = 0.0;
    return phi;
}

double fiedler(const WeightMatrix& weights, double tol) { return fiedler(laplacian(weights), tol); }

double fiedler_noncolored(const FailureMask& mask, double tol) { return fiedler(laplacian(mask), tol); }

bool is_connected(const FailureMask& mask) {
    const std::size_t k = mask.size();
    if (k == 0) return false;
    std::vector<bool> seen(k, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < k; ++v)
            if (!seen[v] && mask(u, v)) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
    }
    return reached == k;
}

double min_degree(const SquareMatrix& weights) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j)
            if (j != i) d += weights(i, j);
        best = std::min(best, d);
    }
    return weights.size() == 0 ? 0.0 : best;
}

bool degree_bound_check(const WeightMatrix& weights) {
    return degree_bound_holds(weights.entries(), fiedler(weights));
}

bool degree_bound_check(const FailureMask& mask) {
    return degree_bound_holds(mask_as_weights(mask), fiedler_noncolored(mask));
}

bool weighted_fiedler_bound_check(const WeightMatrix& weights, const FailureMask& mask) {
    const std::size_t k = weights.size();
    if (mask.size() != k) throw InvalidArgument("weighted_fiedler_bound_check: weights and mask disagree on k");
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j && (weights(i, j) > 0.0) != mask(i, j))
                throw InvalidArgument("weighted_fiedler_bound_check: weights and mask have different zero patterns");

    const auto mu = min_positive_weight(weights);
    if (!mu) return true;  // no edges: 0 >= 0
    return fiedler(weights) >= fiedler_noncolored(mask) * *mu - 1e-9;
}

}  // namespace flock
