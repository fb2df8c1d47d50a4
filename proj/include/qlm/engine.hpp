#pragma once

#include <cstddef>
#include <vector>

#include "qlm/errors.hpp"
#include "qlm/potential.hpp"
#include "qlm/radial.hpp"
#include "qlm/zeroth_iteration.hpp"

namespace qlm {

/// How k_n^2 = 2m(U - E_n) picks its energy.
enum class EnergyUpdate {
    /// E_n is the Rayleigh quotient of the current iterate (default).
    Rayleigh,
    /// E stays at the guess energy for every step.
    Frozen,
};

struct EngineOptions {
    int max_iter = 20;
    double tol_energy = 1e-10;
    EnergyUpdate update = EnergyUpdate::Rayleigh;
};

struct IterationRecord {
    int n = 0;
    double energy = 0.0;
    /// y_n(r) - 1/r on the grid.
    RadialFunction u;
    /// |E_n - E_{n-1}|; zero for n = 0.
    double delta_energy = 0.0;
    /// max over the grid of |y_n' + y_n^2 - k^2(E_n)|.
    double residual_norm = 0.0;
};

/// Thrown by solve() when max_iter steps do not meet tol_energy.
class MaxIterExceeded : public NonConvergence {
public:
    MaxIterExceeded(const std::string& what, std::vector<IterationRecord> history)
        : NonConvergence(what), history_(std::move(history)) {}
    const std::vector<IterationRecord>& history() const { return history_; }

private:
    std::vector<IterationRecord> history_;
};

/// Starting point of an iteration: u_0 sampled on the grid plus its energy.
struct EngineGuess {
    RadialFunction u;
    double energy = 0.0;
};

inline constexpr std::size_t kDefaultGridPoints = 2000;
inline constexpr double kDefaultGridRmin = 1e-6;
/// r_max = kDefaultGridReach / eta.
inline constexpr double kDefaultGridReach = 40.0;

/// Grid used by the engine when the caller does not supply one.
/// Mapped spacing (x = ln r + beta r, beta = eta) unless asked otherwise.
RadialGrid default_grid(double eta_estimate, std::size_t points = kDefaultGridPoints,
                        GridSpacing spacing = GridSpacing::Mapped, double r_max = 0.0);

/// u_0 and E_0 of the analytic Yukawa guess sampled on a grid.
EngineGuess yukawa_guess(const GuessParams& p, const RadialGrid& grid);

/// The exact hydrogen-like solution u = -mu, E = -mu^2/(2m).
EngineGuess coulomb_exact_guess(const PotentialSpec& spec, const RadialGrid& grid);

/// One quasilinearization step.
///
/// With chi_n^2 = r^2 exp(2 int_0^r u_n) the linear equation for y_{n+1}
/// becomes, in terms of u = y - 1/r,
///   u_{n+1}(r) = chi_n^{-2}(r) int_0^r chi_n^2 (u_n^2 + k_n^2) ds.
/// When E_n is the Rayleigh quotient of u_n the integral over (0, inf)
/// vanishes, so beyond the maximum of chi_n the same value is obtained as
/// -chi_n^{-2} int_r^inf, which keeps the tail free of cancellation. The
/// piece beyond r_max uses the local balance y = (y_n^2 + k_n^2)/(2 y_n).
RadialFunction qlm_step(const RadialFunction& u_n, double energy, const PotentialSpec& spec,
                        const RadialGrid& grid);

/// int chi^2 [y^2/(2m) + U] / int chi^2 for chi^2 = r^2 exp(2 int u).
/// NonConvergence when chi^2 has not decayed by r_max (non-normalisable).
double energy_rayleigh(const RadialFunction& u, const PotentialSpec& spec, const RadialGrid& grid);

/// Unit-normalised, positive chi sampled on the grid.
RadialFunction normalized_chi(const RadialFunction& u, const RadialGrid& grid);

/// Riccati residual y' + y^2 - k^2(E) of a sampled iterate, with y' from
/// finite differences in the grid coordinate.
double riccati_residual_norm(const RadialFunction& u, double energy, const PotentialSpec& spec,
                             const RadialGrid& grid);

/// Iterates qlm_step/energy_rayleigh until |E_{n+1} - E_n| <= tol_energy.
/// history[0] is the guess. Throws MaxIterExceeded with the partial history.
std::vector<IterationRecord> solve(const PotentialSpec& spec, const EngineGuess& guess,
                                   const RadialGrid& grid, const EngineOptions& options = {});

}  // namespace qlm
