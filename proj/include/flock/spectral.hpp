#pragma once

#include <cstddef>
#include <vector>

#include "flock/core.hpp"
#include "flock/matrix.hpp"

namespace flock {

/// Off-diagonal mass threshold for the eigensolver.
inline constexpr double kEigenTolerance = 1e-10;
/// Sweeps before symmetric_eigenvalues() gives up.
inline constexpr int kEigenSweepBudget = 100;
/// Eigenvalues this close to zero are reported as exactly zero by fiedler().
inline constexpr double kZeroClamp = 1e-9;

/// L = D - A for a weighted graph.
class LaplacianMatrix {
  public:
    LaplacianMatrix() = default;

    std::size_t size() const { return entries_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const SquareMatrix& entries() const { return entries_; }

    /// y = L x for a scalar field over the agents.
    std::vector<double> apply(const std::vector<double>& x) const;

  private:
    friend LaplacianMatrix laplacian(const SquareMatrix& weights);
    SquareMatrix entries_;
};

/// Throws InvalidArgument if `weights` is asymmetric (beyond 1e-12) or has a
/// nonzero diagonal.
LaplacianMatrix laplacian(const SquareMatrix& weights);
LaplacianMatrix laplacian(const WeightMatrix& weights);
/// Laplacian of the non-colored 0-1 graph.
LaplacianMatrix laplacian(const FailureMask& mask);

struct SpectralResult {
    std::vector<double> eigenvalues;  // ascending
    double fiedler = 0.0;             // eigenvalues[1]
};

/// All eigenvalues of a real symmetric matrix, ascending.
///
/// Cyclic Jacobi: each sweep visits every (p, q) above the diagonal and
/// zeroes it with one plane rotation. Stops once the Frobenius norm of the
/// off-diagonal part drops below `tol`. Throws NumericError carrying the
/// residual off-diagonal norm if `kEigenSweepBudget` sweeps are not enough,
/// and InvalidArgument for asymmetric input.
std::vector<double> symmetric_eigenvalues(const SquareMatrix& matrix, double tol = kEigenTolerance);

SpectralResult laplacian_spectrum(const LaplacianMatrix& l, double tol = kEigenTolerance);

/// Algebraic connectivity of the colored graph, clamped to 0 within kZeroClamp.
double fiedler(const WeightMatrix& weights, double tol = kEigenTolerance);
double fiedler(const LaplacianMatrix& l, double tol = kEigenTolerance);

/// Algebraic connectivity of the 0-1 graph carried by the mask.
double fiedler_noncolored(const FailureMask& mask, double tol = kEigenTolerance);

/// Breadth-first connectivity of the 0-1 graph. Needs no floating point.
bool is_connected(const FailureMask& mask);

/// phi <= k/(k-1) * min weighted degree, with slack 1e-9. Trivially true for k < 2.
bool degree_bound_check(const WeightMatrix& weights);
bool degree_bound_check(const FailureMask& mask);

/// Smallest weighted vertex degree.
double min_degree(const SquareMatrix& weights);

/// phi >= phi_bar * mu, phi on the colored graph, phi_bar on the mask, mu the
/// smallest positive weight (both sides 0 when there is no edge). Throws
/// InvalidArgument when weights and mask differ in their zero pattern.
bool weighted_fiedler_bound_check(const WeightMatrix& weights, const FailureMask& mask);

}  // namespace flock
