#include <catch_amalgamated.hpp>

#include <cmath>

#include "qlm/engine.hpp"
#include "qlm/reference_solver.hpp"

using namespace qlm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double simpson(const RadialFunction& f, double (*g)(double, double)) {
    const std::size_t n = f.size() - 1;
    const double h = f.r[1] - f.r[0];
    double s = g(f.r[0], f.values[0]) + g(f.r[n], f.values[n]);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(f.r[i], f.values[i]);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("hydrogen ground state", "[reference]") {
    const auto res = solve_ground_state(PotentialSpec::coulomb(1.0));
    CHECK_THAT(res.E_D, WithinAbs(-0.5, 1e-9));
    CHECK(res.nodes == 0);
    CHECK(res.r_match > 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < res.chi_D.size(); ++i) {
        const double r = res.chi_D.r[i];
        worst = std::max(worst, std::abs(res.chi_D.values[i] - 2.0 * r * std::exp(-r)));
    }
    CHECK(worst <= 1e-8);
    CHECK_THAT(simpson(res.chi_D, [](double, double c) { return c * c; }), WithinAbs(1.0, 1e-10));
    // <r> = 3/2 for the 1s state.
    CHECK_THAT(simpson(res.chi_D, [](double r, double c) { return r * c * c; }), WithinAbs(1.5, 1e-7));
}

TEST_CASE("virial theorem for a scaled Coulomb problem", "[reference]") {
    // g = 2, m = 0.5: E = -m g^2 / 2 = -1, <U> = 2E.
    const auto spec = PotentialSpec::coulomb(2.0, 0.5);
    const auto res = solve_ground_state(spec);
    CHECK_THAT(res.E_D, WithinAbs(-1.0, 1e-9));
    const double mean_u = simpson(res.chi_D, [](double r, double c) { return r > 0.0 ? -2.0 * c * c / r : 0.0; });
    CHECK_THAT(mean_u, WithinAbs(2.0 * res.E_D, 1e-6));
}

TEST_CASE("Yukawa ground-state energies", "[reference]") {
    // Table values, rounded to the digits given there.
    CHECK_THAT(solve_ground_state(PotentialSpec::yukawa(1.0, 0.2)).E_D, WithinAbs(-0.32680851, 5e-9));
    CHECK_THAT(solve_ground_state(PotentialSpec::yukawa(1.0, 0.5)).E_D, WithinAbs(-0.1481170, 5e-8));
    const auto r8 = solve_ground_state(PotentialSpec::yukawa(1.0, 0.8));
    CHECK_THAT(r8.E_D, WithinAbs(-0.0447043, 5e-8));
    CHECK(r8.halving_change <= 1e-10);
}

TEST_CASE("Numerov error falls like h^4", "[reference][order]") {
    const auto spec = PotentialSpec::yukawa(1.0, 0.5);
    const double e1 = solve_ground_state_fixed_step(spec, 0.05).E_D;
    const double e2 = solve_ground_state_fixed_step(spec, 0.025).E_D;
    const double e3 = solve_ground_state_fixed_step(spec, 0.0125).E_D;
    const double ratio = std::abs(e1 - e2) / std::abs(e2 - e3);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("bracketing works with and without a hint", "[reference]") {
    const auto spec = PotentialSpec::yukawa(1.0, 0.5);
    ReferenceOptions hinted;
    hinted.energy_hint = -0.148;
    const double a = solve_ground_state(spec).E_D;
    const double b = solve_ground_state(spec, hinted).E_D;
    CHECK_THAT(a, WithinAbs(b, 1e-11));
    // A custom potential with the same values goes through the generic path.
    const auto custom = PotentialSpec::custom([](double r) { return -std::exp(-0.5 * r) / r; }, 1.0, 1.0, 0.54);
    CHECK_THAT(solve_ground_state(custom).E_D, WithinAbs(a, 1e-9));
}

TEST_CASE("no bound state beyond critical screening", "[reference]") {
    CHECK_THROWS_AS(solve_ground_state(PotentialSpec::yukawa(1.0, 1.5)), NoBoundState);
    CHECK_THROWS_AS(solve_ground_state_fixed_step(PotentialSpec::yukawa(1.0, 0.2), -0.1), DomainError);
}

TEST_CASE("sampling chi onto the engine grid", "[reference]") {
    const auto res = solve_ground_state(PotentialSpec::coulomb(1.0));
    const auto grid = default_grid(1.0);
    const auto s = sample_chi(res, grid);
    REQUIRE(s.size() == grid.size());
    for (std::size_t i = 0; i < s.size(); i += 97) {
        CHECK_THAT(s.values[i], WithinAbs(2.0 * s.r[i] * std::exp(-s.r[i]), 1e-8));
    }
    // Identity on the mesh itself.
    CHECK(res.chi_D(res.chi_D.r[10]) == res.chi_D.values[10]);
    CHECK_THROWS_AS(sample_chi(res, RadialGrid::uniform(0.1, 10.0 * res.r_max, 50)), ExtrapolationError);
}

TEST_CASE("pinned reference value", "[reference][regression]") {
    // h = 2e-3 after one halving from the default step.
    const auto res = solve_ground_state(PotentialSpec::yukawa(1.0, 0.2));
    CHECK_THAT(res.E_D, WithinAbs(-0.32680851137012, 5e-13));
    CHECK_THAT(res.h, WithinRel(2e-3, 1e-12));
}
