#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlm/engine.hpp"
#include "qlm/potential.hpp"
#include "qlm/radial.hpp"

namespace qlm::report {

inline constexpr const char* kToolName = "qlm";
inline constexpr const char* kToolVersion = "1.0.0";

/// Deviations are reported only where chi_D exceeds this fraction of its maximum.
inline constexpr double kDeviationFloor = 1e-8;
/// log10|1 - chi_n/chi_D| is capped from below at this value (exact agreement).
inline constexpr double kDeviationCap = -16.0;

/// Everything a command needs, after config file and flags are merged.
struct RunConfig {
    PotentialFamily family = PotentialFamily::Yukawa;
    double g = 1.0;
    double lambda = 0.2;
    double m = 1.0;
    std::vector<double> lambdas{0.2, 0.5, 0.8};
    double tol_energy = 1e-10;
    double tol_quad = 1e-11;
    /// 0 selects r_max = 40/eta.
    double rmax = 0.0;
    std::size_t grid_points = kDefaultGridPoints;
    GridSpacing grid = GridSpacing::Mapped;
    int max_iter = 20;
    /// Columns of the wavefunction command, any of "0", "1", "D".
    std::vector<std::string> wave_columns{"0", "1", "D"};
    /// The engine guess uses eta * guess_scale.
    double guess_scale = 1.0;
    EnergyUpdate update = EnergyUpdate::Rayleigh;
    int digits = 10;
    bool provenance = true;

    PotentialSpec spec_for(double lambda_value) const;
};

using Cell = std::variant<double, std::string>;

struct Section {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Serialisable output of one command: scalar fields plus row tables.
struct Document {
    std::string kind;
    std::vector<std::pair<std::string, Cell>> meta;
    /// Empty when provenance is disabled.
    std::vector<std::pair<std::string, Cell>> provenance;
    std::vector<Section> sections;

    const Cell* find_meta(const std::string& key) const;
    const Section* find_section(const std::string& name) const;
};

struct SolveReport {
    PotentialSpec spec;
    double E0 = 0.0;
    double E1 = 0.0;
    double E_D = 0.0;
    std::vector<IterationRecord> qlm_history;
    /// deviation_curves[n] belongs to qlm_history[n].
    std::vector<RadialFunction> deviation_curves;
    std::vector<std::pair<std::string, Cell>> provenance;
};

/// log10|1 - a/b|, capped at kDeviationCap.
double log_deviation(double a, double b);

/// Least-squares fit of log e_{n+1} = log C + p log e_n.
struct OrderFit {
    double order = 0.0;
    double constant = 0.0;
    /// max e_{n+1}/e_n^2 over the pairs used.
    double quadratic_constant = 0.0;
    int pairs = 0;
};

/// Pairs with e_n > usable_above and e_{n+1} > noise_floor enter the fit.
/// order is NaN when fewer than two pairs qualify.
OrderFit fit_convergence_order(const std::vector<double>& errors, double usable_above,
                               double noise_floor);

Document run_table(const RunConfig& cfg);
Document run_wavefunction(const RunConfig& cfg);
/// Keeps the partial history when max_iter is reached; meta "converged" is then 0.
Document run_converge(const RunConfig& cfg);
/// Throws MaxIterExceeded if the engine does not converge.
SolveReport run_solve(const RunConfig& cfg);

Document to_document(const SolveReport& report);
SolveReport solve_report_from_document(const Document& doc);

std::vector<std::pair<std::string, Cell>> make_provenance(const RunConfig& cfg);

std::string format_number(double x);
std::string to_csv(const Document& doc);
std::string to_json(const Document& doc);
std::string to_text(const Document& doc, int digits);
Document parse_csv(const std::string& text);
Document parse_json(const std::string& text);

}  // namespace qlm::report
