#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nisakns/error.hpp"
#include "nisakns/matrix.hpp"

namespace nisakns {

/// Uniform x-grid plus the discrete t samples a field is known at.
class Grid {
public:
    static constexpr std::size_t min_points = 8;

    Grid(double x_min, double x_max, std::size_t nx, std::vector<double> t_samples = {0.0})
        : x_min_(x_min), x_max_(x_max), nx_(nx), t_(std::move(t_samples)) {
        if (nx_ < min_points) {
            throw Error(ErrorKind::grid, "nx = " + std::to_string(nx_) + " is below the stencil minimum of " +
                                             std::to_string(min_points));
        }
        if (!(x_min_ < x_max_)) throw Error(ErrorKind::grid, "x_min must be less than x_max");
        if (t_.empty()) throw Error(ErrorKind::grid, "at least one t sample is required");
        for (std::size_t k = 1; k < t_.size(); ++k)
            if (!(t_[k] > t_[k - 1])) throw Error(ErrorKind::grid, "t samples must be strictly increasing");
    }

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t nx() const noexcept { return nx_; }
    double h() const noexcept { return (x_max_ - x_min_) / static_cast<double>(nx_ - 1); }
    double x(std::size_t i) const noexcept {
        return i + 1 == nx_ ? x_max_ : x_min_ + static_cast<double>(i) * h();
    }
    std::span<const double> t() const noexcept { return t_; }
    std::size_t nt() const noexcept { return t_.size(); }

    /// Uniform spacing of the t samples (throws when they are not uniform).
    double dt() const {
        if (t_.size() < 2) throw Error(ErrorKind::stencil, "a time stencil needs at least two t samples");
        const double d = t_[1] - t_[0];
        for (std::size_t k = 2; k < t_.size(); ++k)
            if (std::abs((t_[k] - t_[k - 1]) - d) > 1e-9 * std::max(1.0, std::abs(d))) {
                throw Error(ErrorKind::stencil, "t samples are not uniformly spaced");
            }
        return d;
    }

    Grid with_times(std::vector<double> t) const { return Grid(x_min_, x_max_, nx_, std::move(t)); }

private:
    double x_min_;
    double x_max_;
    std::size_t nx_;
    std::vector<double> t_;
};

/// Matrix-valued samples along x at one time.
using Profile = std::vector<SquareMatrix>;

/// Matrix field sampled on grid.nt() x grid.nx(), stored t-major.
class FieldGrid {
public:
    FieldGrid(Grid grid, std::size_t dim)
        : grid_(std::move(grid)), dim_(dim), values_(grid_.nt() * grid_.nx(), SquareMatrix(dim)) {}

    /// Samples f(x, t) at every grid point.
    static FieldGrid sample(Grid grid, std::size_t dim, const std::function<SquareMatrix(double, double)>& f) {
        FieldGrid out(std::move(grid), dim);
        for (std::size_t ti = 0; ti < out.grid_.nt(); ++ti)
            for (std::size_t xi = 0; xi < out.grid_.nx(); ++xi) out.set(ti, xi, f(out.grid_.x(xi), out.grid_.t()[ti]));
        return out;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return dim_; }

    const SquareMatrix& at(std::size_t ti, std::size_t xi) const { return values_[ti * grid_.nx() + xi]; }
    void set(std::size_t ti, std::size_t xi, SquareMatrix m) {
        if (m.dim() != dim_) throw Error(ErrorKind::shape, "sample dimension differs from field dimension");
        values_[ti * grid_.nx() + xi] = std::move(m);
    }

    std::span<const SquareMatrix> slice(std::size_t ti) const {
        return std::span<const SquareMatrix>(values_).subspan(ti * grid_.nx(), grid_.nx());
    }
    void set_slice(std::size_t ti, const Profile& p) {
        if (p.size() != grid_.nx()) throw Error(ErrorKind::shape, "profile length differs from nx");
        for (std::size_t xi = 0; xi < p.size(); ++xi) set(ti, xi, p[xi]);
    }

private:
    Grid grid_;
    std::size_t dim_;
    std::vector<SquareMatrix> values_;
};

/// Largest entry magnitude at either edge of the profile.
inline double edge_magnitude(std::span<const SquareMatrix> p) {
    return std::max(p.front().max_abs(), p.back().max_abs());
}

/// Finite-grid stand-in for Schwartz-class decay: both edges below threshold.
inline void require_decay(std::span<const SquareMatrix> p, double threshold) {
    const double edge = edge_magnitude(p);
    if (edge > threshold) {
        throw Error(ErrorKind::decay, "field does not decay at the grid edges: edge magnitude " +
                                          std::to_string(edge) + " > " + std::to_string(threshold),
                    edge);
    }
}

/// Potentials live in the off-diagonal complement: zero diagonal everywhere.
inline void require_off_diagonal(std::span<const SquareMatrix> p, double tol) {
    for (std::size_t xi = 0; xi < p.size(); ++xi)
        for (std::size_t i = 0; i < p[xi].dim(); ++i)
            if (std::abs(p[xi](i, i)) > tol) {
                throw Error(ErrorKind::domain, "potential has a nonzero diagonal entry at sample " +
                                                   std::to_string(xi),
                            std::abs(p[xi](i, i)));
            }
}

}  // namespace nisakns
