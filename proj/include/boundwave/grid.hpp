#pragma once

#include <cstddef>
#include <vector>

namespace boundwave {

/// Periodic center-of-mass grid x_j = -L/2 + j dx with FFT-ordered
/// wavenumbers. j = N/2 sits exactly on the mirror at x = 0.
class SpatialGrid {
public:
    SpatialGrid(double length, std::size_t n_points);

    [[nodiscard]] double length() const { return length_; }
    [[nodiscard]] std::size_t size() const { return x_.size(); }
    [[nodiscard]] double dx() const { return dx_; }
    [[nodiscard]] const std::vector<double>& x() const { return x_; }
    [[nodiscard]] const std::vector<double>& k() const { return k_; }
    [[nodiscard]] double k_max() const;

private:
    double length_;
    double dx_;
    std::vector<double> x_;
    std::vector<double> k_;
};

}  // namespace boundwave
