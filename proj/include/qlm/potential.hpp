#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qlm/errors.hpp"

namespace qlm {

enum class PotentialFamily { Yukawa, Coulomb, Custom };

std::string to_string(PotentialFamily family);
PotentialFamily parse_family(const std::string& name);

/// Central potential in atomic units (Hartree, Bohr, electron masses).
///
/// Yukawa: U(r) = -g exp(-lambda r)/r. Coulomb is the lambda = 0 member of
/// the same family. Custom potentials carry their own U(r) plus the two
/// hints the solvers need: the Coulomb strength at the origin
/// (-lim r U(r)) and the slowest decay rate of the bound state's tail.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::Yukawa;
    double g = 1.0;
    double lambda = 0.0;
    double m = 1.0;
    std::function<double(double)> custom_eval;
    double custom_origin_strength = 0.0;
    std::optional<double> decay_scale;

    static PotentialSpec yukawa(double g, double lambda, double m = 1.0);
    static PotentialSpec coulomb(double g, double m = 1.0);
    static PotentialSpec custom(std::function<double(double)> u, double m, double origin_strength,
                                double decay_scale);

    /// mu = m g, the Coulomb decay scale.
    double mu() const { return m * g; }

    /// -lim_{r->0} r U(r).
    double origin_strength() const;

    /// lim_{r->0} (U(r) + Z/r), the regular part of U at the origin.
    double origin_regular_part() const;

    /// Throws DomainError if the parameters violate g > 0, m > 0, lambda >= 0.
    void validate() const;
};

/// U(r) in Hartree. DomainError for r <= 0.
double evaluate(const PotentialSpec& spec, double r);

/// k^2(r) = 2m [U(r) - E], the right-hand side of the Riccati equation.
double local_wavenumber_sq(const PotentialSpec& spec, double energy, double r);

}  // namespace qlm
