#pragma once

#include "qlm/potential.hpp"

namespace qlm {

/// Parameters of the analytic zeroth-order ground state
///   chi0(r) = N [exp(-eta r) - exp(-a r)],  a = 2 mu - eta,
/// built from the exponential tail exp(-eta r) and the cusp condition at
/// the origin. In the Coulomb limit eta == mu the amplitude N diverges
/// (stored as +inf) while chi0 itself tends to 2 mu^{3/2} r exp(-mu r).
struct GuessParams {
    double eta = 0.0;
    double mu = 0.0;
    double a = 0.0;
    double N = 0.0;
    double E0 = 0.0;
    double m = 1.0;

    bool coulomb_limit() const;
};

/// Below this |mu - eta| the closed forms switch to their eta -> mu limits.
inline constexpr double kCoulombLimitGap = 1e-7;

/// Rayleigh quotient of chi0 for a Yukawa potential as a function of eta:
///   (mu eta a / m) [1/(2mu) + mu/(mu-eta)^2 ln((4mu-2eta+lambda)(2eta+lambda)/(2mu+lambda)^2)]
/// The logarithm is evaluated as log1p(-4(mu-eta)^2/(2mu+lambda)^2), which is
/// the same quantity without cancellation near eta = mu.
double zeroth_energy_functional(double eta, const PotentialSpec& spec);

/// The functional at eta = mu; equals -mu^2/(2m) when lambda = 0.
double coulomb_limit_energy(const PotentialSpec& spec);

/// GuessParams for an arbitrary decay rate (not necessarily self-consistent).
GuessParams make_guess_params(double eta, const PotentialSpec& spec);

/// Solves zeroth_energy_functional(eta) = -eta^2/(2m) for the largest root in
/// (0, mu). Throws NoBoundState when no sign change exists.
GuessParams solve_eta(const PotentialSpec& spec, double tol = 1e-12);

double chi0(const GuessParams& p, double r);

/// ln chi0(r) for r > 0, accurate where chi0 itself under- or overflows.
double log_chi0(const GuessParams& p, double r);

/// y0 = chi0'/chi0 = -mu + (mu - eta) coth((mu - eta) r). DomainError at r <= 0.
double y0(const GuessParams& p, double r);

/// y0(r) - 1/r, finite at the origin where it tends to -mu.
double u0(const GuessParams& p, double r);

}  // namespace qlm
