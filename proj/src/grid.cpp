#include "boundwave/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "boundwave/errors.hpp"

namespace boundwave {

SpatialGrid::SpatialGrid(double length, std::size_t n_points) : length_(length), dx_(0.0)
{
    if (!std::isfinite(length) || length <= 0.0)
        throw DomainError("evolution", "grid length must be positive");
    if (n_points < 4 || !std::has_single_bit(n_points))
        throw DomainError("evolution", "N_grid must be a power of two >= 4, got " + std::to_string(n_points));
    dx_ = length / static_cast<double>(n_points);
    x_.resize(n_points);
    k_.resize(n_points);
    const auto n = static_cast<long>(n_points);
    const double dk = 2.0 * std::numbers::pi / length;
    for (long j = 0; j < n; ++j) {
        x_[j] = (j - n / 2) * dx_;
        k_[j] = (j < n / 2 ? j : j - n) * dk;
    }
}

double SpatialGrid::k_max() const { return std::numbers::pi / dx_; }

}  // namespace boundwave
