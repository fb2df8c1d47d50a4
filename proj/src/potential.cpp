#include "qlm/potential.hpp"

#include <cmath>
#include <utility>

namespace qlm {

std::string to_string(PotentialFamily family) {
    switch (family) {
        case PotentialFamily::Yukawa: return "yukawa";
        case PotentialFamily::Coulomb: return "coulomb";
        case PotentialFamily::Custom: return "custom";
    }
    return "unknown";
}

PotentialFamily parse_family(const std::string& name) {
    if (name == "yukawa") return PotentialFamily::Yukawa;
    if (name == "coulomb") return PotentialFamily::Coulomb;
    if (name == "custom") return PotentialFamily::Custom;
    throw DomainError("unknown potential family '" + name + "'");
}

PotentialSpec PotentialSpec::yukawa(double g, double lambda, double m) {
    PotentialSpec s;
    s.family = PotentialFamily::Yukawa;
    s.g = g;
    s.lambda = lambda;
    s.m = m;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::coulomb(double g, double m) {
    PotentialSpec s;
    s.family = PotentialFamily::Coulomb;
    s.g = g;
    s.lambda = 0.0;
    s.m = m;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::custom(std::function<double(double)> u, double m,
                                    double origin_strength, double decay_scale) {
    PotentialSpec s;
    s.family = PotentialFamily::Custom;
    s.custom_eval = std::move(u);
    s.m = m;
    s.g = origin_strength;
    s.custom_origin_strength = origin_strength;
    s.decay_scale = decay_scale;
    s.validate();
    return s;
}

void PotentialSpec::validate() const {
    if (!(m > 0.0)) throw DomainError("potential: mass must be positive");
    if (family == PotentialFamily::Custom) {
        if (!custom_eval) throw DomainError("potential: custom family needs an evaluator");
        if (!decay_scale || !(*decay_scale > 0.0)) {
            throw DomainError("potential: custom family needs a positive decay_scale hint");
        }
        return;
    }
    if (!(g > 0.0)) throw DomainError("potential: coupling g must be positive");
    if (!(lambda >= 0.0)) throw DomainError("potential: screening lambda must be non-negative");
    if (family == PotentialFamily::Coulomb && lambda != 0.0) {
        throw DomainError("potential: coulomb family has lambda = 0");
    }
}

double PotentialSpec::origin_strength() const {
    return family == PotentialFamily::Custom ? custom_origin_strength : g;
}

double PotentialSpec::origin_regular_part() const {
    switch (family) {
        case PotentialFamily::Yukawa: return g * lambda;
        case PotentialFamily::Coulomb: return 0.0;
        case PotentialFamily::Custom: {
            const double r = 1e-6;
            return custom_eval(r) + custom_origin_strength / r;
        }
    }
    return 0.0;
}

double evaluate(const PotentialSpec& spec, double r) {
    if (!(r > 0.0)) throw DomainError("potential: r must be positive");
    switch (spec.family) {
        case PotentialFamily::Yukawa: return (-spec.g / r) * std::exp(-spec.lambda * r);
        case PotentialFamily::Coulomb: return -spec.g / r;
        case PotentialFamily::Custom: return spec.custom_eval(r);
    }
    return 0.0;
}

double local_wavenumber_sq(const PotentialSpec& spec, double energy, double r) {
    return 2.0 * spec.m * (evaluate(spec, r) - energy);
}

}  // namespace qlm
