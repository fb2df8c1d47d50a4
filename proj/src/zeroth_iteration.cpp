#include "qlm/zeroth_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qlm/numerics.hpp"

namespace qlm {

namespace {

void require_analytic_family(const PotentialSpec& spec) {
    if (spec.family == PotentialFamily::Custom) {
        throw DomainError("zeroth iteration: closed forms exist only for yukawa/coulomb potentials");
    }
    spec.validate();
}

// (1 - exp(-c r))/c, with the c -> 0 limit r. Valid for either sign of c.
double log_one_minus_exp_over(double c, double r) {
    if (c == 0.0) return std::log(r);
    if (c > 0.0) return std::log(-std::expm1(-c * r) / c);
    const double x = -c * r;
    if (x > 30.0) return x - std::log(-c) + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x) / (-c));
}

}  // namespace

bool GuessParams::coulomb_limit() const { return std::abs(mu - eta) < kCoulombLimitGap * mu; }

double zeroth_energy_functional(double eta, const PotentialSpec& spec) {
    require_analytic_family(spec);
    const double mu = spec.mu();
    const double m = spec.m;
    if (!(eta > 0.0 && eta < 2.0 * mu)) throw DomainError("zeroth_energy_functional: need 0 < eta < 2 mu");
    const double d = mu - eta;
    const double s = 2.0 * mu + spec.lambda;
    const double x = 4.0 * d * d / (s * s);
    if (!(x < 1.0)) throw DomainError("zeroth_energy_functional: logarithm argument is not positive");
    const double a = 2.0 * mu - eta;
    double log_term;
    if (std::abs(d) < kCoulombLimitGap * mu) {
        // mu/d^2 * log1p(-x) with x = 4 d^2/s^2, expanded.
        log_term = -(4.0 * mu / (s * s)) * (1.0 + x / 2.0 + x * x / 3.0);
    } else {
        log_term = mu / (d * d) * std::log1p(-x);
    }
    return (mu * eta * a / m) * (1.0 / (2.0 * mu) + log_term);
}

double coulomb_limit_energy(const PotentialSpec& spec) {
    return zeroth_energy_functional(spec.mu(), spec);
}

GuessParams make_guess_params(double eta, const PotentialSpec& spec) {
    require_analytic_family(spec);
    const double mu = spec.mu();
    if (!(eta > 0.0 && eta < 2.0 * mu)) throw DomainError("guess parameters: need 0 < eta < 2 mu");
    GuessParams p;
    p.eta = eta;
    p.mu = mu;
    p.a = 2.0 * mu - eta;
    p.m = spec.m;
    p.N = eta == mu ? std::numeric_limits<double>::infinity()
                    : std::sqrt(mu * eta * p.a) / (mu - eta);
    p.E0 = -eta * eta / (2.0 * spec.m);
    return p;
}

GuessParams solve_eta(const PotentialSpec& spec, double tol) {
    require_analytic_family(spec);
    const double mu = spec.mu();
    if (spec.lambda == 0.0) return make_guess_params(mu, spec);

    const auto residual = [&](double eta) {
        return zeroth_energy_functional(eta, spec) + eta * eta / (2.0 * spec.m);
    };

    // Geometric in eta near 0 and geometric in mu - eta near mu.
    constexpr int per_side = 120;
    std::vector<double> etas;
    etas.reserve(2 * per_side);
    for (int i = 0; i < per_side; ++i) {
        const double t = static_cast<double>(i) / (per_side - 1);
        etas.push_back(mu * 1e-6 * std::pow(0.5 / 1e-6, t));
    }
    for (int i = 1; i < per_side; ++i) {
        const double t = static_cast<double>(i) / (per_side - 1);
        etas.push_back(mu - mu * 0.5 * std::pow(1e-9 / 0.5, t));
    }

    double best_lo = 0.0, best_hi = 0.0;
    bool found = false;
    double prev = residual(etas[0]);
    for (std::size_t i = 1; i < etas.size(); ++i) {
        const double cur = residual(etas[i]);
        if (prev * cur < 0.0) {
            best_lo = etas[i - 1];
            best_hi = etas[i];
            found = true;
        }
        prev = cur;
    }
    if (!found) {
        throw NoBoundState("zeroth-order model has no bound state for lambda = " +
                           std::to_string(spec.lambda));
    }
    const auto root = numerics::find_root_bracketed(residual, best_lo, best_hi, 0.0);
    if (std::abs(root.residual) > tol) {
        throw NonConvergence("solve_eta: residual above tolerance");
    }
    return make_guess_params(root.root, spec);
}

double chi0(const GuessParams& p, double r) {
    if (r < 0.0) throw DomainError("chi0: r must be non-negative");
    if (r == 0.0) return 0.0;
    return std::exp(log_chi0(p, r));
}

double log_chi0(const GuessParams& p, double r) {
    if (!(r > 0.0)) throw DomainError("log_chi0: r must be positive");
    // N (e^{-eta r} - e^{-a r}) = 2 sqrt(mu eta a) e^{-eta r} (1 - e^{-2 d r})/(2 d)
    const double d2 = 2.0 * (p.mu - p.eta);
    return std::log(2.0 * std::sqrt(p.mu * p.eta * p.a)) - p.eta * r + log_one_minus_exp_over(d2, r);
}

double u0(const GuessParams& p, double r) {
    if (!(r >= 0.0)) throw DomainError("u0: r must be non-negative");
    const double d = p.mu - p.eta;
    return -p.mu + d * numerics::coth_minus_inverse(d * r);
}

double y0(const GuessParams& p, double r) {
    if (!(r > 0.0)) throw DomainError("y0: r must be positive");
    return 1.0 / r + u0(p, r);
}

}  // namespace qlm
