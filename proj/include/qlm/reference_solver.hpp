#pragma once

#include <cstddef>
#include <optional>

#include "qlm/potential.hpp"
#include "qlm/radial.hpp"

namespace qlm {

struct EigenResult {
    double E_D = 0.0;
    /// Unit-normalised, positive chi on the uniform integration mesh, r from 0.
    RadialFunction chi_D;
    int nodes = 0;
    /// Numerov matching defect at the returned energy (slope mismatch, chi(r_t) = 1).
    double match_defect = 0.0;
    double h = 0.0;
    double r_match = 0.0;
    double r_max = 0.0;
    /// |E(h) - E(2h)| of the final step-halving pair; 0 for a fixed-step solve.
    double halving_change = 0.0;
};

struct ReferenceOptions {
    /// Initial uniform step (Bohr). Below ~2e-3 the slope matching is
    /// dominated by rounding, which grows like 1/h.
    double h0 = 4e-3;
    /// Step halving stops once |E(h) - E(2h)| <= tol.
    double tol = 1e-10;
    int max_halvings = 4;
    /// Outward bracket E_hint*(1 -/+ 0.2) when set; otherwise a scan up from E_floor.
    std::optional<double> energy_hint;
    /// Inward integration starts at r_turn + tail_reach/kappa.
    double tail_reach = 45.0;
    /// Refuse meshes longer than this many steps.
    std::size_t max_steps = 20'000'000;
};

/// Ground state of chi'' = 2m (U - E) chi, chi(0) = 0, by Numerov shooting.
///
/// The regular solution is integrated outward from the origin (Frobenius
/// start chi = r - mZ r^2 + c r^3), the decaying one inward from the tail,
/// and the two are matched at the outermost classical turning point. E is
/// bracketed on "no outward node and positive defect", then refined with
/// TOMS 748 on the defect. The step is halved from h0 until successive
/// energies agree to tol.
EigenResult solve_ground_state(const PotentialSpec& spec, const ReferenceOptions& options = {});

/// Same shooting at one fixed step h, without halving.
EigenResult solve_ground_state_fixed_step(const PotentialSpec& spec, double h,
                                          const ReferenceOptions& options = {});

/// chi_D interpolated (six-point Lagrange) onto another grid.
/// ExtrapolationError if the grid reaches past the solver's mesh.
RadialFunction sample_chi(const EigenResult& result, const RadialGrid& grid);

}  // namespace qlm
