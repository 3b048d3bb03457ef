#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flock {

/// Dense row-major k x k matrix of doubles.
class SquareMatrix {
  public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    std::span<const double> data() const { return data_; }

    bool is_symmetric(double tol) const;

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline bool SquareMatrix::is_symmetric(double tol) const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d = (*this)(i, j) - (*this)(j, i);
            if (!(d <= tol && -d <= tol)) return false;
        }
    return true;
}

}  // namespace flock
