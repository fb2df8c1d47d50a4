#pragma once

#include <cstddef>
#include <functional>

#include "qlm/errors.hpp"

namespace qlm::numerics {

using RealFunction = std::function<double(double)>;

inline constexpr double kDefaultQuadTol = 1e-11;
inline constexpr double kDefaultRootTol = 1e-12;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // absolute
    std::size_t evaluations = 0;
};

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    double bracket_width = 0.0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
///
/// Intervals with the largest local error estimate are bisected until the
/// summed estimate falls below max(tol, tol*|value|). Throws NonConvergence
/// when the subdivision budget runs out and NonFiniteSample when f returns
/// NaN or infinity.
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    double tol = kDefaultQuadTol);

/// Integral over [a, inf) for integrands decaying at least like exp(-decay_scale*x).
///
/// The range is truncated at a + 40/decay_scale; if the tail bound
/// |f(r_max)|/decay_scale is not below tol the cut is pushed outwards.
QuadratureResult integrate_semi_infinite(const RealFunction& f, double a, double tol,
                                         double decay_scale);

/// Bracketed root of f on [lo, hi] (TOMS 748: bisection safeguarded
/// inverse-cubic interpolation). tol is the bracket width to reach;
/// tol = 0 asks for full double precision.
RootResult find_root_bracketed(const RealFunction& f, double lo, double hi,
                               double tol = kDefaultRootTol);

/// Exponential integral Ei(x) = -int_{-x}^inf e^{-t}/t dt for x < 0.
///
/// Power series gamma + ln|x| + sum x^k/(k k!) for |x| <= 1, Lentz continued
/// fraction for E1(-x) beyond. Throws DomainError for x >= 0.
double expint_ei(double x);

/// e^x E1(x) for x > 0. Finite for all positive x, ~1/x for large x.
double expint_e1_scaled(double x);

/// Ein(x) = int_0^x (1 - e^{-t})/t dt, the entire part of E1.
double expint_ein(double x);

/// coth(x) without overflow for large |x| and without cancellation near 0.
double coth_stable(double x);

/// coth(x) - 1/x, smooth and odd through x = 0.
double coth_minus_inverse(double x);

}  // namespace qlm::numerics
