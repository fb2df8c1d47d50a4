#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qlm/errors.hpp"

namespace qlm {

enum class GridSpacing { Uniform, LogUniform, Mapped };

std::string to_string(GridSpacing spacing);
GridSpacing parse_spacing(const std::string& name);

/// Ordered radii r_0 < ... < r_{M-1} generated from a uniform parameter x.
///
/// Uniform: r = x. LogUniform: x = ln r. Mapped: x = ln r + beta r, which is
/// logarithmic near the origin and linear in the tail. Integrals are taken
/// in x with sixth-order Lagrange panel weights, so any smooth integrand
/// converges as dx^6.
class RadialGrid {
public:
    static RadialGrid uniform(double r_min, double r_max, std::size_t points);
    static RadialGrid log_uniform(double r_min, double r_max, std::size_t points);
    static RadialGrid mapped(double r_min, double r_max, std::size_t points, double beta);

    std::span<const double> points() const { return r_; }
    std::span<const double> jacobian() const { return jac_; }
    std::size_t size() const { return r_.size(); }
    double r_min() const { return r_.front(); }
    double r_max() const { return r_.back(); }
    double dx() const { return dx_; }
    GridSpacing spacing() const { return spacing_; }
    double beta() const { return beta_; }

    /// Prefix integrals P_i = int_0^{r_i} f dr.
    ///
    /// The head piece [0, r_0] assumes f(s) ~ s^head_power (c0 + c1 s),
    /// with c0 and c1 fitted to the first two samples.
    std::vector<double> cumulative(std::span<const double> f, int head_power) const;

    /// Suffix integrals S_i = int_{r_i}^{r_max} f dr.
    std::vector<double> suffix(std::span<const double> f) const;

    /// int_0^{r_max} f dr, with the same head model as cumulative().
    double integrate(std::span<const double> f, int head_power) const;

private:
    RadialGrid(std::vector<double> r, std::vector<double> jac, double dx, GridSpacing spacing,
               double beta);

    std::vector<double> panel_integrals(std::span<const double> f) const;
    double head_integral(std::span<const double> f, int head_power) const;

    std::vector<double> r_;
    std::vector<double> jac_;
    double dx_;
    GridSpacing spacing_;
    double beta_;
};

/// A sampled radial function (y, u, chi, ln chi or a deviation curve).
struct RadialFunction {
    std::vector<double> r;
    std::vector<double> values;
    GridSpacing spacing = GridSpacing::Mapped;
    std::string quantity;

    std::size_t size() const { return r.size(); }

    /// Monotone (Fritsch-Butland) cubic Hermite interpolation.
    /// Throws ExtrapolationError outside [r.front(), r.back()].
    double operator()(double x) const;
};

}  // namespace qlm
