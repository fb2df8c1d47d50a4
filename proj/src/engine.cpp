#include "qlm/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace qlm {

namespace {

void require_on_grid(const RadialFunction& u, const RadialGrid& grid) {
    const auto pts = grid.points();
    if (u.r.size() != pts.size() || u.values.size() != pts.size()) {
        throw DomainError("engine: function is not sampled on the grid");
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (u.r[i] != pts[i]) throw DomainError("engine: function is not sampled on the grid");
        if (!std::isfinite(u.values[i])) {
            throw NonFiniteSample("engine: u is not finite at r = " + std::to_string(pts[i]));
        }
    }
}

// ln chi^2 = 2 ln r + 2 int_0^r u, shifted so that its maximum is zero.
std::vector<double> log_chi_sq(const RadialFunction& u, const RadialGrid& grid) {
    const auto pts = grid.points();
    const auto w = grid.cumulative(u.values, 0);
    std::vector<double> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = 2.0 * std::log(pts[i]) + 2.0 * w[i];
    const double top = *std::max_element(out.begin(), out.end());
    if (!std::isfinite(top)) throw NonFiniteSample("engine: cumulative exponent overflowed");
    for (auto& v : out) v -= top;
    return out;
}

RadialFunction like(const RadialGrid& grid, std::vector<double> values, const char* quantity) {
    RadialFunction f;
    f.r.assign(grid.points().begin(), grid.points().end());
    f.values = std::move(values);
    f.spacing = grid.spacing();
    f.quantity = quantity;
    return f;
}

// First derivative in r from a 5-point stencil in the grid coordinate.
std::vector<double> derivative(std::span<const double> f, const RadialGrid& grid) {
    const std::size_t n = f.size();
    const double h = grid.dx();
    const auto jac = grid.jacobian();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dfdx;
        if (i >= 2 && i + 2 < n) {
            dfdx = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
        } else if (i < 2) {
            dfdx = (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]) /
                   (12.0 * h);
        } else {
            dfdx = (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]) /
                   (12.0 * h);
        }
        out[i] = dfdx / jac[i];
    }
    return out;
}

}  // namespace

RadialGrid default_grid(double eta_estimate, std::size_t points, GridSpacing spacing, double r_max) {
    if (!(eta_estimate > 0.0)) throw DomainError("default_grid: eta estimate must be positive");
    const double reach = r_max > 0.0 ? r_max : kDefaultGridReach / eta_estimate;
    switch (spacing) {
        case GridSpacing::Uniform: return RadialGrid::uniform(kDefaultGridRmin, reach, points);
        case GridSpacing::LogUniform: return RadialGrid::log_uniform(kDefaultGridRmin, reach, points);
        case GridSpacing::Mapped: break;
    }
    return RadialGrid::mapped(kDefaultGridRmin, reach, points, eta_estimate);
}

EngineGuess yukawa_guess(const GuessParams& p, const RadialGrid& grid) {
    std::vector<double> v(grid.size());
    const auto pts = grid.points();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u0(p, pts[i]);
    return {like(grid, std::move(v), "u"), p.E0};
}

EngineGuess coulomb_exact_guess(const PotentialSpec& spec, const RadialGrid& grid) {
    spec.validate();
    const double mu = spec.m * spec.origin_strength();
    return {like(grid, std::vector<double>(grid.size(), -mu), "u"), -mu * mu / (2.0 * spec.m)};
}

RadialFunction qlm_step(const RadialFunction& u_n, double energy, const PotentialSpec& spec,
                        const RadialGrid& grid) {
    require_on_grid(u_n, grid);
    const auto pts = grid.points();
    const std::size_t m = pts.size();
    const auto lchi = log_chi_sq(u_n, grid);

    std::vector<double> chi_sq(m), g(m);
    for (std::size_t i = 0; i < m; ++i) {
        chi_sq[i] = std::exp(lchi[i]);
        const double u = u_n.values[i];
        g[i] = chi_sq[i] * (u * u + local_wavenumber_sq(spec, energy, pts[i]));
    }
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(lchi.begin(), lchi.end()) - lchi.begin());

    // chi^2 (u^2 + k^2) ~ -2 m Z s near the origin.
    const auto forward = grid.cumulative(g, 1);
    const auto backward = grid.suffix(g);

    // Beyond r_max, y_{n+1} follows the slowly varying particular solution
    // of y' + 2 y_n y = y_n^2 + k^2, expanded to second order:
    //   y = V - W + W'/(2 y_n),  V = (y_n^2 + k^2)/(2 y_n),  W = V'/(2 y_n).
    const double rmax = pts[m - 1];
    const double y_end = 1.0 / rmax + u_n.values[m - 1];
    double tail = 0.0;
    if (y_end < 0.0) {
        const auto back_diff = [&](const double* f, std::size_t j) {
            // f[j] sits at grid index m-1-j; one-sided stencil toward the origin.
            const double dfdx =
                (25.0 * f[j] - 48.0 * f[j + 1] + 36.0 * f[j + 2] - 16.0 * f[j + 3] + 3.0 * f[j + 4]) /
                (12.0 * grid.dx());
            return dfdx / grid.jacobian()[m - 1 - j];
        };
        std::array<double, 9> v{}, y{};
        for (std::size_t j = 0; j < v.size(); ++j) {
            const std::size_t i = m - 1 - j;
            y[j] = 1.0 / pts[i] + u_n.values[i];
            v[j] = (y[j] * y[j] + local_wavenumber_sq(spec, energy, pts[i])) / (2.0 * y[j]);
        }
        std::array<double, 5> w{};
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = back_diff(v.data(), j) / (2.0 * y[j]);
        const double u_end = v[0] - w[0] + back_diff(w.data(), 0) / (2.0 * y_end) - 1.0 / rmax;
        tail = -chi_sq[m - 1] * u_end;
    }

    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i) {
        next[i] = i <= peak ? forward[i] / chi_sq[i] : -(backward[i] + tail) / chi_sq[i];
        if (!std::isfinite(next[i])) {
            throw NonFiniteSample("qlm_step: u_{n+1} is not finite at r = " + std::to_string(pts[i]));
        }
    }
    return like(grid, std::move(next), "u");
}

double energy_rayleigh(const RadialFunction& u, const PotentialSpec& spec, const RadialGrid& grid) {
    require_on_grid(u, grid);
    const auto pts = grid.points();
    const std::size_t m = pts.size();
    const auto lchi = log_chi_sq(u, grid);
    if (lchi[m - 1] > std::log(1e-14)) {
        throw NonConvergence("energy_rayleigh: chi^2 has not decayed at r_max; iterate is not normalizable");
    }
    std::vector<double> num(m), den(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = pts[i];
        const double c = std::exp(lchi[i]);
        // chi^2 y^2 = exp(2 int u) (1 + r u)^2 up to the common shift.
        const double ry = 1.0 + r * u.values[i];
        const double e2w = std::exp(lchi[i] - 2.0 * std::log(r));
        num[i] = e2w * ry * ry / (2.0 * spec.m) + c * evaluate(spec, r);
        den[i] = c;
    }
    const double n = grid.integrate(num, 0);
    const double d = grid.integrate(den, 2);
    const double e = n / d;
    if (!std::isfinite(e)) throw NonFiniteSample("energy_rayleigh: non-finite quotient");
    return e;
}

RadialFunction normalized_chi(const RadialFunction& u, const RadialGrid& grid) {
    require_on_grid(u, grid);
    const auto lchi = log_chi_sq(u, grid);
    std::vector<double> sq(lchi.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::exp(lchi[i]);
    const double norm = grid.integrate(sq, 2);
    std::vector<double> chi(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) chi[i] = std::sqrt(sq[i] / norm);
    return like(grid, std::move(chi), "chi");
}

double riccati_residual_norm(const RadialFunction& u, double energy, const PotentialSpec& spec,
                             const RadialGrid& grid) {
    require_on_grid(u, grid);
    const auto pts = grid.points();
    const auto du = derivative(u.values, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = pts[i];
        const double v = u.values[i];
        // y' + y^2 with y = 1/r + u: the 1/r^2 pieces cancel.
        const double res = du[i] + 2.0 * v / r + v * v - local_wavenumber_sq(spec, energy, r);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::vector<IterationRecord> solve(const PotentialSpec& spec, const EngineGuess& guess,
                                   const RadialGrid& grid, const EngineOptions& options) {
    spec.validate();
    if (options.max_iter < 1) throw DomainError("solve: max_iter must be at least 1");
    if (!(options.tol_energy > 0.0)) throw DomainError("solve: tol_energy must be positive");
    if (!(guess.energy < 0.0)) throw DomainError("solve: guess energy must be negative");

    std::vector<IterationRecord> history;
    IterationRecord first;
    first.n = 0;
    first.u = guess.u;
    first.energy = options.update == EnergyUpdate::Rayleigh ? energy_rayleigh(guess.u, spec, grid)
                                                            : guess.energy;
    first.residual_norm = riccati_residual_norm(guess.u, first.energy, spec, grid);
    history.push_back(std::move(first));

    for (int n = 1; n <= options.max_iter; ++n) {
        const IterationRecord& prev = history.back();
        const double used = options.update == EnergyUpdate::Rayleigh ? prev.energy : guess.energy;
        IterationRecord rec;
        rec.n = n;
        rec.u = qlm_step(prev.u, used, spec, grid);
        rec.energy = energy_rayleigh(rec.u, spec, grid);
        rec.delta_energy = std::abs(rec.energy - prev.energy);
        // The step solves u' + 2(1/r + u_n) u = u_n^2 + k^2(E_used) exactly, so
        // the Riccati residual of the result is (u - u_n)^2 + 2m (E - E_used).
        double worst = 0.0;
        for (std::size_t i = 0; i < rec.u.values.size(); ++i) {
            const double du = rec.u.values[i] - prev.u.values[i];
            worst = std::max(worst, std::abs(du * du + 2.0 * spec.m * (rec.energy - used)));
        }
        rec.residual_norm = worst;
        const bool done = rec.delta_energy <= options.tol_energy;
        history.push_back(std::move(rec));
        if (done) return history;
    }
    throw MaxIterExceeded("solve: energy not converged after " + std::to_string(options.max_iter) +
                              " iterations",
                          std::move(history));
}

}  // namespace qlm
