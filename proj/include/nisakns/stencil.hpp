#pragma once

// Finite-difference and quadrature kernels over uniformly sampled values.
// Works for any T with T + T, T - T and T * double (double, complex,
// SquareMatrix).
//
// Derivatives are 4th order in the interior and 2nd order at the points a
// centered 5- or 7-point stencil cannot reach. Residual norms skip
// `edge_margin` points on each side so edge order does not pollute them.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nisakns/error.hpp"

namespace nisakns {

inline constexpr std::size_t edge_margin = 3;

namespace detail {
inline void require_points(std::size_t n, std::size_t need, const char* what) {
    if (n < need) {
        throw Error(ErrorKind::stencil, std::string(what) + " needs at least " + std::to_string(need) +
                                            " samples, got " + std::to_string(n));
    }
}
}  // namespace detail

template <typename T>
std::vector<T> derivative(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    detail::require_points(n, 5, "first derivative");
    std::vector<T> d;
    d.reserve(n);
    const double c2 = 1.0 / (2.0 * h);
    const double c4 = 1.0 / (12.0 * h);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            d.push_back((f[1] * 4.0 - f[0] * 3.0 - f[2]) * c2);
        } else if (i + 1 == n) {
            d.push_back((f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * c2);
        } else if (i == 1 || i + 2 == n) {
            d.push_back((f[i + 1] - f[i - 1]) * c2);
        } else {
            d.push_back((f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) * c4);
        }
    }
    return d;
}

template <typename T>
std::vector<T> second_derivative(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    detail::require_points(n, 5, "second derivative");
    std::vector<T> d;
    d.reserve(n);
    const double c2 = 1.0 / (h * h);
    const double c4 = 1.0 / (12.0 * h * h);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            d.push_back((f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) * c2);
        } else if (i + 1 == n) {
            d.push_back((f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) * c2);
        } else if (i == 1 || i + 2 == n) {
            d.push_back((f[i - 1] - f[i] * 2.0 + f[i + 1]) * c2);
        } else {
            d.push_back((f[i - 1] * 16.0 + f[i + 1] * 16.0 - f[i] * 30.0 - f[i - 2] - f[i + 2]) * c4);
        }
    }
    return d;
}

template <typename T>
std::vector<T> third_derivative(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    detail::require_points(n, 7, "third derivative");
    std::vector<T> d;
    d.reserve(n);
    const double h3 = h * h * h;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < 2) {
            d.push_back((f[i + 1] * 18.0 - f[i] * 5.0 - f[i + 2] * 24.0 + f[i + 3] * 14.0 - f[i + 4] * 3.0) *
                        (1.0 / (2.0 * h3)));
        } else if (i + 2 >= n) {
            d.push_back((f[i] * 5.0 - f[i - 1] * 18.0 + f[i - 2] * 24.0 - f[i - 3] * 14.0 + f[i - 4] * 3.0) *
                        (1.0 / (2.0 * h3)));
        } else if (i == 2 || i + 3 == n) {
            d.push_back((f[i - 1] * 2.0 - f[i - 2] - f[i + 1] * 2.0 + f[i + 2]) * (1.0 / (2.0 * h3)));
        } else {
            d.push_back((f[i - 3] - f[i - 2] * 8.0 + f[i - 1] * 13.0 - f[i + 1] * 13.0 + f[i + 2] * 8.0 -
                         f[i + 3]) *
                        (1.0 / (8.0 * h3)));
        }
    }
    return d;
}

/// Running trapezoid integral from the first sample; out[0] = zero.
template <typename T>
std::vector<T> cumulative_trapezoid(std::span<const T> f, double h, const T& zero) {
    std::vector<T> out;
    out.reserve(f.size());
    out.push_back(zero);
    for (std::size_t i = 1; i < f.size(); ++i) out.push_back(out.back() + (f[i - 1] + f[i]) * (0.5 * h));
    return out;
}

/// d/dt at sample k of uniformly spaced time samples: 5-point central where
/// it fits, 3-point central otherwise, one-sided at the ends.
template <typename T>
T time_derivative(std::span<const T> s, std::size_t k, double dt) {
    const std::size_t n = s.size();
    detail::require_points(n, 2, "time derivative");
    if (k >= n) throw Error(ErrorKind::stencil, "time index out of range");
    if (n >= 5 && k >= 2 && k + 2 < n) {
        return (s[k - 2] - s[k - 1] * 8.0 + s[k + 1] * 8.0 - s[k + 2]) * (1.0 / (12.0 * dt));
    }
    if (k >= 1 && k + 1 < n) return (s[k + 1] - s[k - 1]) * (1.0 / (2.0 * dt));
    if (n == 2) return (s[1] - s[0]) * (1.0 / dt);
    if (k == 0) return (s[1] * 4.0 - s[0] * 3.0 - s[2]) * (1.0 / (2.0 * dt));
    return (s[n - 1] * 3.0 - s[n - 2] * 4.0 + s[n - 3]) * (1.0 / (2.0 * dt));
}

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
        const double pi = std::acos(-1.0);
        for (std::size_t i = 0; i < n; ++i) {
            double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = z;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            nodes[i] = z;
            weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }

    /// Composite rule over `panels` equal panels of [a, b].
    template <typename F>
    auto integrate(F&& f, double a, double b, std::size_t panels = 8) const -> decltype(f(a)) {
        using R = decltype(f(a));
        R sum{};
        const double w = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double lo = a + w * static_cast<double>(p);
            for (std::size_t i = 0; i < nodes.size(); ++i)
                sum += f(lo + 0.5 * w * (nodes[i] + 1.0)) * (0.5 * w * weights[i]);
        }
        return sum;
    }
};

/// Least-squares slope of log(err) against log(h): the observed order.
inline double observed_order(std::span<const double> hs, std::span<const double> errs) {
    if (hs.size() != errs.size() || hs.size() < 2) {
        throw Error(ErrorKind::shape, "order fit needs at least two (h, error) pairs");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double x = std::log(hs[i]);
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Least-squares slope of log(values) against xs over the samples whose
/// value exceeds `floor`; nullopt with fewer than three usable samples.
inline std::optional<double> fit_log_slope(std::span<const double> xs, std::span<const double> values,
                                           double floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(values[i] > floor)) continue;
        const double y = std::log(values[i]);
        sx += xs[i];
        sy += y;
        sxx += xs[i] * xs[i];
        sxy += xs[i] * y;
        n += 1;
    }
    if (n < 3) return std::nullopt;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nisakns
