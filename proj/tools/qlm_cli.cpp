// qlm: command-line front end for the QLM Yukawa solver.
//
//   qlm table        --lambda 0.2,0.5,0.8
//   qlm wavefunction --lambda 0.2 --iterations 0,1,D --format csv --output wf.csv
//   qlm converge     --lambda 0.2 --tol-energy 1e-12
//   qlm solve        --lambda 0.5 --format json
//
// Flags may also come from a key=value config file (--config, or the path
// in QLM_CONFIG); flags on the command line win.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qlm/report.hpp"

namespace {

enum ExitCode { kOk = 0, kNoBoundState = 2, kNonConvergence = 3, kBadArguments = 4 };

struct Flags {
    std::string potential = "yukawa";
    double g = 1.0;
    std::vector<double> lambdas;
    double mass = 1.0;
    double tol_energy = 1e-10;
    double tol_quad = 1e-11;
    double rmax = 0.0;
    std::size_t grid_points = qlm::kDefaultGridPoints;
    std::string grid = "mapped";
    std::string iterations;
    std::string format = "table";
    std::string output;
    bool no_provenance = false;
    int digits = 10;
    double guess_scale = 1.0;
    bool frozen_energy = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

qlm::report::RunConfig make_config(const Flags& f, const std::string& command) {
    qlm::report::RunConfig cfg;
    cfg.family = qlm::parse_family(f.potential);
    if (cfg.family == qlm::PotentialFamily::Custom) {
        throw qlm::DomainError("custom potentials are available through the library only");
    }
    cfg.g = f.g;
    cfg.m = f.mass;
    if (command == "table") {
        if (!f.lambdas.empty()) cfg.lambdas = f.lambdas;
    } else if (f.lambdas.size() > 1) {
        throw qlm::DomainError("'" + command + "' takes a single --lambda");
    } else if (!f.lambdas.empty()) {
        cfg.lambda = f.lambdas.front();
    }
    if (cfg.family == qlm::PotentialFamily::Coulomb) {
        cfg.lambda = 0.0;
        cfg.lambdas = {0.0};
    }
    if (!(f.tol_energy > 0.0) || !(f.tol_quad > 0.0)) throw qlm::DomainError("tolerances must be positive");
    if (f.rmax < 0.0) throw qlm::DomainError("--rmax must be positive");
    cfg.tol_energy = f.tol_energy;
    cfg.tol_quad = f.tol_quad;
    cfg.rmax = f.rmax;
    cfg.grid_points = f.grid_points;
    cfg.grid = qlm::parse_spacing(f.grid);
    cfg.digits = f.digits;
    cfg.guess_scale = f.guess_scale;
    cfg.update = f.frozen_energy ? qlm::EnergyUpdate::Frozen : qlm::EnergyUpdate::Rayleigh;
    cfg.provenance = !f.no_provenance;
    if (!f.iterations.empty()) {
        if (command == "wavefunction") {
            cfg.wave_columns = split_list(f.iterations);
            for (const auto& c : cfg.wave_columns) {
                if (c != "0" && c != "1" && c != "D") {
                    throw qlm::DomainError("--iterations for wavefunction takes a list of 0, 1, D");
                }
            }
        } else {
            std::size_t used = 0;
            const int n = std::stoi(f.iterations, &used);
            if (used != f.iterations.size() || n < 1) throw qlm::DomainError("--iterations must be a positive integer");
            cfg.max_iter = n;
        }
    }
    return cfg;
}

std::string render(const qlm::report::Document& doc, const std::string& format, int digits) {
    if (format == "csv") return qlm::report::to_csv(doc);
    if (format == "json") return qlm::report::to_json(doc);
    return qlm::report::to_text(doc, digits);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qlm::DomainError("cannot open output file '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasilinearization solver for the s-wave ground state of screened Coulomb potentials"};
    app.set_version_flag("--version", std::string(qlm::report::kToolVersion));
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file")->envname("QLM_CONFIG");

    Flags f;
    app.add_option("--potential", f.potential, "yukawa or coulomb")
        ->check(CLI::IsMember({"yukawa", "coulomb"}))
        ->capture_default_str();
    app.add_option("--g", f.g, "coupling strength g")->capture_default_str();
    app.add_option("--lambda", f.lambdas, "screening parameter(s); comma list for 'table'")->delimiter(',');
    app.add_option("--mass", f.mass, "particle mass m")->capture_default_str();
    app.add_option("--tol-energy", f.tol_energy, "energy convergence tolerance (hartree)")->capture_default_str();
    app.add_option("--tol-quad", f.tol_quad, "quadrature tolerance")->capture_default_str();
    app.add_option("--rmax", f.rmax, "grid truncation radius (bohr); default 40/eta");
    app.add_option("--grid-points", f.grid_points, "radial grid size")
        ->check(CLI::Range(static_cast<std::size_t>(7), static_cast<std::size_t>(10'000'000)))
        ->capture_default_str();
    app.add_option("--grid", f.grid, "grid spacing")
        ->check(CLI::IsMember({"uniform", "log", "mapped"}))
        ->capture_default_str();
    app.add_option("--iterations", f.iterations,
                   "wavefunction: columns among 0,1,D; converge/solve: maximum QLM iterations");
    app.add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "table"}))
        ->capture_default_str();
    app.add_option("--output", f.output, "write to PATH instead of stdout");
    app.add_flag("--no-provenance", f.no_provenance, "omit the provenance (tool/timestamp) record");
    app.add_option("--digits", f.digits, "significant digits in table format")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
    app.add_option("--guess-scale", f.guess_scale, "start the engine from eta * scale")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--frozen-energy", f.frozen_energy, "keep k^2 at the guess energy in every step");

    app.add_subcommand("table", "E0, E1 and E_D for a list of screening parameters");
    app.add_subcommand("wavefunction", "chi_D, chi0, chi1 and their log deviations");
    app.add_subcommand("converge", "QLM energy history and convergence order");
    app.add_subcommand("solve", "full report for one screening parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadArguments;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = make_config(f, command);
        if (command == "table") {
            emit(render(qlm::report::run_table(cfg), f.format, cfg.digits), f.output);
        } else if (command == "wavefunction") {
            emit(render(qlm::report::run_wavefunction(cfg), f.format, cfg.digits), f.output);
        } else if (command == "converge") {
            const auto doc = qlm::report::run_converge(cfg);
            emit(render(doc, f.format, cfg.digits), f.output);
            const auto* converged = doc.find_meta("converged");
            if (converged && std::get<double>(*converged) == 0.0) {
                std::cerr << "qlm: energy not converged within " << cfg.max_iter << " iterations\n";
                return kNonConvergence;
            }
        } else {
            const auto rep = qlm::report::run_solve(cfg);
            emit(render(qlm::report::to_document(rep), f.format, cfg.digits), f.output);
        }
    } catch (const qlm::NoBoundState& e) {
        std::cerr << "qlm: no bound state: " << e.what() << '\n';
        return kNoBoundState;
    } catch (const qlm::NonConvergence& e) {
        std::cerr << "qlm: not converged: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const qlm::DomainError& e) {
        std::cerr << "qlm: bad argument: " << e.what() << '\n';
        return kBadArguments;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qlm: bad argument: " << e.what() << '\n';
        return kBadArguments;
    } catch (const std::exception& e) {
        std::cerr << "qlm: " << e.what() << '\n';
        return kNonConvergence;
    }
    return kOk;
}
