#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qlm/numerics.hpp"
#include "qlm/potential.hpp"
#include "qlm/zeroth_iteration.hpp"

namespace qlm {

struct FirstIterResult {
    double E1 = 0.0;
    std::function<double(double)> y1_fn;
    /// ln chi1 up to an additive constant.
    std::function<double(double)> chi1_log_fn;
    /// ln sqrt(int chi1^2): exp(chi1_log_fn(r) - log_norm) is unit-normalised.
    double log_norm = 0.0;
    numerics::QuadratureResult numerator;
    numerics::QuadratureResult denominator;
};

/// Closed-form first quasilinearization step for the Yukawa ground state.
///
/// With chi0, y0 from the zeroth iteration the linearised Riccati equation
///   y1' + 2 y0 y1 = y0^2 + k0^2
/// integrates to y1 = y0 + Phi/chi0^2, where Phi is a combination of
/// exponentials and exponential integrals. Phi is paired here with the
/// normalised chi0 (amplitude N included), i.e. phi() returns N^2 times the
/// bare bracket. The correction Phi/chi0^2 itself is independent of N.
///
/// Near the origin Phi and chi0^2 vanish together. Below
/// r = 1/max(2eta+lambda, 2mu+lambda, 2a+lambda) the bracket is summed as a
/// Taylor series, which stays exact to rounding down to r -> 0.
///
/// The correction, y1 and chi1 assume eta solves the zeroth-order energy
/// condition; phi() is the bare formula and is valid for any eta.
class FirstIteration {
public:
    FirstIteration(const GuessParams& params, const PotentialSpec& spec,
                   double tol = numerics::kDefaultQuadTol);

    const GuessParams& params() const;
    const PotentialSpec& spec() const;

    double phi(double r) const;
    /// Phi(r)/chi0(r)^2 = y1(r) - y0(r).
    double correction(double r) const;
    double y1(double r) const;
    /// y1(r) - 1/r.
    double u1(double r) const;
    /// ln chi0(r) + int_0^r correction. Normalised so that chi1 ~ chi0 at the origin.
    double chi1_log(double r) const;

    FirstIterResult energy() const;

private:
    struct Impl;
    FirstIteration(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    friend double phi(const GuessParams&, const PotentialSpec&, double);
    friend double y1(const GuessParams&, const PotentialSpec&, double);
    friend double chi1_log(const GuessParams&, const PotentialSpec&, double);

    std::shared_ptr<const Impl> impl_;
};

/// Phi(r) of the first iteration, paired with the normalised chi0.
double phi(const GuessParams& p, const PotentialSpec& spec, double r);
double y1(const GuessParams& p, const PotentialSpec& spec, double r);
double chi1_log(const GuessParams& p, const PotentialSpec& spec, double r);
FirstIterResult energy_first(const GuessParams& p, const PotentialSpec& spec,
                             double tol = numerics::kDefaultQuadTol);

}  // namespace qlm
