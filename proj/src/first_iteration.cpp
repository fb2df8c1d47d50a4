#include "qlm/first_iteration.hpp"

#include <algorithm>
#include <cmath>

namespace qlm {

namespace {
constexpr int kTaylorTerms = 40;
}

struct FirstIteration::Impl {
    GuessParams p;
    PotentialSpec spec;
    double tol;
    double lambda;
    double d;           // mu - eta
    double alpha_eta;   // 2 eta + lambda
    double alpha_mu;    // 2 mu + lambda
    double alpha_a;     // 2 a + lambda
    double crossover;
    double constant;    // bracket at r = 0; zero when eta is self-consistent
    std::vector<double> taylor;  // taylor[k] multiplies r^k, k >= 1
    double anchor_step = 0.0;
    std::vector<double> anchors;

    Impl(const GuessParams& params, const PotentialSpec& s, double tolerance, bool with_anchors)
        : p(params), spec(s), tol(tolerance) {
        if (spec.family == PotentialFamily::Custom) {
            throw DomainError("first iteration: closed form exists only for yukawa/coulomb potentials");
        }
        lambda = spec.lambda;
        d = p.mu - p.eta;
        alpha_eta = 2.0 * p.eta + lambda;
        alpha_mu = 2.0 * p.mu + lambda;
        alpha_a = 2.0 * p.a + lambda;
        crossover = 1.0 / std::max({alpha_eta, alpha_mu, alpha_a});
        const double s2 = alpha_mu * alpha_mu;
        constant = -d * d / (p.mu * p.a) - std::log1p(-4.0 * d * d / s2);

        // exp terms: (eta/mu - 1)(-2mu r)^k/k! + (d/a)(-2a r)^k/k!
        // Ei terms: Ei(-x) = gamma + ln x - Ein(x) with weights (-1, 2, -1) on
        // (alpha_eta, alpha_mu, alpha_a); gamma and ln r cancel, Ein contributes
        // sum_i c_i (-alpha_i r)^k / (k k!).
        taylor.assign(kTaylorTerms + 1, 0.0);
        double e_mu = 1.0, e_a = 1.0, q_eta = 1.0, q_mu = 1.0, q_a = 1.0;
        for (int k = 1; k <= kTaylorTerms; ++k) {
            const double kk = static_cast<double>(k);
            e_mu *= -2.0 * p.mu / kk;
            e_a *= -2.0 * p.a / kk;
            q_eta *= -alpha_eta / kk;
            q_mu *= -alpha_mu / kk;
            q_a *= -alpha_a / kk;
            taylor[k] = (p.eta / p.mu - 1.0) * e_mu + (d / p.a) * e_a +
                        (-q_eta + 2.0 * q_mu - q_a) / kk;
        }
        // The r and r^2 coefficients cancel identically (a + eta = 2 mu);
        // pin them so rounding does not leak into Phi/chi0^2 ~ r.
        taylor[1] = 0.0;
        taylor[2] = 0.0;

        if (with_anchors && !p.coulomb_limit()) build_anchors();
    }

    double series(double r, bool with_constant) const {
        double acc = 0.0;
        for (int k = kTaylorTerms; k >= 1; --k) acc = (acc + taylor[k]) * r;
        return with_constant ? acc + constant : acc;
    }

    // Phi/(2 mu) with N stripped, exactly as the closed form reads.
    double bracket(double r) const {
        if (r <= crossover) return series(r, true);
        return (p.eta / p.mu - 1.0) * std::exp(-2.0 * p.mu * r) + (d / p.a) * std::exp(-2.0 * p.a * r) +
               2.0 * numerics::expint_ei(-r * alpha_mu) - numerics::expint_ei(-r * alpha_eta) -
               numerics::expint_ei(-r * alpha_a);
    }

    double phi(double r) const {
        if (!(r > 0.0)) throw DomainError("phi: r must be positive");
        if (p.coulomb_limit()) return 0.0;
        return p.N * p.N * 2.0 * p.mu * bracket(r);
    }

    double correction(double r) const {
        if (!(r > 0.0)) throw DomainError("first iteration: r must be positive");
        if (p.coulomb_limit()) return 0.0;
        const double gap = -std::expm1(-2.0 * d * r);  // 1 - e^{-(a - eta) r}
        if (r <= crossover) {
            const double shape = std::exp(-p.eta * r) * gap;
            return 2.0 * p.mu * series(r, false) / (shape * shape);
        }
        // Every term multiplied by e^{2 eta r}; E1 kept in scaled form.
        const double scaled =
            (p.eta / p.mu - 1.0) * std::exp(-2.0 * d * r) + (d / p.a) * std::exp(-4.0 * d * r) -
            2.0 * std::exp(-(2.0 * d + lambda) * r) * numerics::expint_e1_scaled(alpha_mu * r) +
            std::exp(-lambda * r) * numerics::expint_e1_scaled(alpha_eta * r) +
            std::exp(-(4.0 * d + lambda) * r) * numerics::expint_e1_scaled(alpha_a * r);
        return 2.0 * p.mu * scaled / (gap * gap);
    }

    double integral_of_correction(double lo, double hi) const {
        if (hi <= lo) return 0.0;
        return numerics::integrate_adaptive([this](double t) { return correction(t); }, lo, hi,
                                            std::min(tol, 1e-13))
            .value;
    }

    void build_anchors() {
        anchor_step = 0.25 / p.mu;
        const double reach = 100.0 / p.eta;
        const auto count = static_cast<std::size_t>(std::ceil(reach / anchor_step));
        anchors.resize(count + 1);
        anchors[0] = 0.0;
        for (std::size_t j = 1; j <= count; ++j) {
            anchors[j] = anchors[j - 1] +
                         integral_of_correction(anchor_step * static_cast<double>(j - 1),
                                                anchor_step * static_cast<double>(j));
        }
    }

    double accumulated(double r) const {
        if (p.coulomb_limit()) return 0.0;
        if (anchors.empty()) return integral_of_correction(0.0, r);
        const auto j = std::min(static_cast<std::size_t>(r / anchor_step), anchors.size() - 1);
        const double start = anchor_step * static_cast<double>(j);
        return anchors[j] + integral_of_correction(start, r);
    }

    double chi1_log(double r) const {
        if (!(r > 0.0)) throw DomainError("chi1_log: r must be positive");
        return log_chi0(p, r) + accumulated(r);
    }
};

FirstIteration::FirstIteration(const GuessParams& params, const PotentialSpec& spec, double tol)
    : impl_(std::make_shared<const Impl>(params, spec, tol, true)) {}

const GuessParams& FirstIteration::params() const { return impl_->p; }
const PotentialSpec& FirstIteration::spec() const { return impl_->spec; }

double FirstIteration::phi(double r) const { return impl_->phi(r); }
double FirstIteration::correction(double r) const { return impl_->correction(r); }
double FirstIteration::u1(double r) const { return u0(impl_->p, r) + impl_->correction(r); }
double FirstIteration::y1(double r) const { return 1.0 / r + u1(r); }
double FirstIteration::chi1_log(double r) const { return impl_->chi1_log(r); }

FirstIterResult FirstIteration::energy() const {
    const auto impl = impl_;
    const Impl& s = *impl;
    const double offset = s.chi1_log(1.0 / s.p.eta);
    const double two_m = 2.0 * s.spec.m;

    const auto density = [&s, offset](double r) { return std::exp(2.0 * (s.chi1_log(r) - offset)); };
    const auto hamiltonian_density = [&s, &density, two_m](double r) {
        const double y = 1.0 / r + u0(s.p, r) + s.correction(r);
        return density(r) * (y * y / two_m + evaluate(s.spec, r));
    };

    // chi1^2 decays like exp(-2 eta r).
    const double decay = 2.0 * s.p.eta;
    FirstIterResult out;
    out.numerator = numerics::integrate_semi_infinite(hamiltonian_density, 0.0, s.tol, decay);
    out.denominator = numerics::integrate_semi_infinite(density, 0.0, s.tol, decay);
    out.E1 = out.numerator.value / out.denominator.value;
    out.log_norm = offset + 0.5 * std::log(out.denominator.value);
    out.y1_fn = [impl](double r) { return 1.0 / r + u0(impl->p, r) + impl->correction(r); };
    out.chi1_log_fn = [impl](double r) { return impl->chi1_log(r); };
    return out;
}

double phi(const GuessParams& p, const PotentialSpec& spec, double r) {
    return FirstIteration::Impl(p, spec, numerics::kDefaultQuadTol, false).phi(r);
}

double y1(const GuessParams& p, const PotentialSpec& spec, double r) {
    const FirstIteration::Impl impl(p, spec, numerics::kDefaultQuadTol, false);
    return 1.0 / r + u0(p, r) + impl.correction(r);
}

double chi1_log(const GuessParams& p, const PotentialSpec& spec, double r) {
    return FirstIteration::Impl(p, spec, numerics::kDefaultQuadTol, false).chi1_log(r);
}

FirstIterResult energy_first(const GuessParams& p, const PotentialSpec& spec, double tol) {
    return FirstIteration(p, spec, tol).energy();
}

}  // namespace qlm
