#include "qlm/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <future>
#include <limits>

#include "qlm/first_iteration.hpp"
#include "qlm/reference_solver.hpp"
#include "qlm/zeroth_iteration.hpp"

namespace qlm::report {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Analytic {
    PotentialSpec spec;
    GuessParams p;
    FirstIteration first;
    FirstIterResult e1;
};

Analytic analytic_for(const PotentialSpec& spec, const RunConfig& cfg) {
    const GuessParams p = solve_eta(spec);
    FirstIteration first(p, spec, cfg.tol_quad);
    FirstIterResult e1 = first.energy();
    return {spec, p, std::move(first), std::move(e1)};
}

ReferenceOptions reference_options(const RunConfig& cfg, double e_hint, double eta) {
    ReferenceOptions opt;
    opt.energy_hint = e_hint;
    // The reference mesh has to cover whatever grid the deviations use.
    const double reach = cfg.rmax > 0.0 ? cfg.rmax : kDefaultGridReach / eta;
    opt.tail_reach = std::max(opt.tail_reach, reach * eta + 5.0);
    return opt;
}

RadialGrid grid_for(const RunConfig& cfg, double eta) {
    return default_grid(eta, cfg.grid_points, cfg.grid, cfg.rmax);
}

double median(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

void add_spec_meta(Document& doc, const PotentialSpec& spec) {
    doc.meta.emplace_back("potential", to_string(spec.family));
    doc.meta.emplace_back("g", spec.g);
    doc.meta.emplace_back("lambda", spec.lambda);
    doc.meta.emplace_back("mass", spec.m);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

PotentialSpec RunConfig::spec_for(double lambda_value) const {
    switch (family) {
        case PotentialFamily::Coulomb: return PotentialSpec::coulomb(g, m);
        case PotentialFamily::Yukawa:
            return lambda_value == 0.0 ? PotentialSpec::coulomb(g, m) : PotentialSpec::yukawa(g, lambda_value, m);
        case PotentialFamily::Custom: break;
    }
    throw DomainError("custom potentials are available through the library only");
}

const Cell* Document::find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return &v;
    }
    return nullptr;
}

const Section* Document::find_section(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

double log_deviation(double a, double b) {
    const double rel = std::abs(1.0 - a / b);
    if (!(rel > 0.0)) return kDeviationCap;
    return std::max(kDeviationCap, std::log10(rel));
}

OrderFit fit_convergence_order(const std::vector<double>& errors, double usable_above,
                               double noise_floor) {
    OrderFit fit;
    std::vector<double> xs, ys;
    for (std::size_t n = 0; n + 1 < errors.size(); ++n) {
        if (errors[n] > usable_above && errors[n + 1] > noise_floor) {
            xs.push_back(std::log(errors[n]));
            ys.push_back(std::log(errors[n + 1]));
            fit.quadratic_constant =
                std::max(fit.quadratic_constant, errors[n + 1] / (errors[n] * errors[n]));
        }
    }
    fit.pairs = static_cast<int>(xs.size());
    if (xs.size() < 2) {
        fit.order = kNaN;
        fit.constant = kNaN;
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.constant = std::exp((sy - fit.order * sx) / n);
    return fit;
}

std::vector<std::pair<std::string, Cell>> make_provenance(const RunConfig& cfg) {
    if (!cfg.provenance) return {};
    std::vector<std::pair<std::string, Cell>> p;
    p.emplace_back("tool", std::string(kToolName) + " " + kToolVersion);
    p.emplace_back("generated", utc_timestamp());
    p.emplace_back("tol_energy", cfg.tol_energy);
    p.emplace_back("tol_quad", cfg.tol_quad);
    p.emplace_back("grid", to_string(cfg.grid));
    p.emplace_back("grid_points", static_cast<double>(cfg.grid_points));
    p.emplace_back("rmax", cfg.rmax > 0.0 ? Cell(cfg.rmax) : Cell(std::string("auto")));
    p.emplace_back("energy_update", std::string(cfg.update == EnergyUpdate::Rayleigh ? "rayleigh" : "frozen"));
    return p;
}

Document run_table(const RunConfig& cfg) {
    struct Row {
        double lambda;
        double e0 = kNaN, e1 = kNaN, ed = kNaN;
        std::string status = "ok";
    };
    // Rows are independent; each one runs on its own task and the table is
    // assembled in input order.
    std::vector<std::future<Row>> jobs;
    for (double lam : cfg.lambdas) {
        jobs.push_back(std::async(std::launch::async, [lam, &cfg]() {
            Row row{lam};
            try {
                const PotentialSpec spec = cfg.spec_for(lam);
                const Analytic a = analytic_for(spec, cfg);
                row.e0 = a.p.E0;
                row.e1 = a.e1.E1;
                row.ed = solve_ground_state(spec, reference_options(cfg, a.p.E0, a.p.eta)).E_D;
            } catch (const NoBoundState&) {
                row.status = "no_bound_state";
            } catch (const NonConvergence&) {
                row.status = "non_convergence";
            }
            return row;
        }));
    }
    Document doc;
    doc.kind = "table";
    doc.meta.emplace_back("potential", to_string(cfg.family));
    doc.meta.emplace_back("g", cfg.g);
    doc.meta.emplace_back("mass", cfg.m);
    doc.provenance = make_provenance(cfg);
    Section rows{"rows", {"lambda", "minus_E0", "minus_E1", "minus_E_D", "status"}, {}};
    for (auto& job : jobs) {
        const Row r = job.get();
        rows.rows.push_back({r.lambda, -r.e0, -r.e1, -r.ed, r.status});
    }
    doc.sections.push_back(std::move(rows));
    return doc;
}

Document run_wavefunction(const RunConfig& cfg) {
    const PotentialSpec spec = cfg.spec_for(cfg.lambda);
    const Analytic a = analytic_for(spec, cfg);
    const EigenResult ref = solve_ground_state(spec, reference_options(cfg, a.p.E0, a.p.eta));
    const RadialGrid grid = grid_for(cfg, a.p.eta);
    const RadialFunction chi_d = sample_chi(ref, grid);
    const double chi_max = *std::max_element(ref.chi_D.values.begin(), ref.chi_D.values.end());

    const auto wants = [&](const char* c) {
        return std::find(cfg.wave_columns.begin(), cfg.wave_columns.end(), c) != cfg.wave_columns.end();
    };
    const bool want0 = wants("0"), want1 = wants("1"), wantd = wants("D");

    Section rows{"rows", {"r"}, {}};
    if (wantd) rows.columns.push_back("chi_D");
    if (want0) rows.columns.push_back("chi0");
    if (want1) rows.columns.push_back("chi1");
    if (want0) rows.columns.push_back("dev0");
    if (want1) rows.columns.push_back("dev1");

    std::vector<double> dev0s, dev1s, gaps;
    double r_floor = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.points()[i];
        const double cd = chi_d.values[i];
        if (!(cd > kDeviationFloor * chi_max)) continue;
        r_floor = r;
        // chi0 with amplitude N is already unit-normalised.
        const double c0 = std::exp(log_chi0(a.p, r));
        const double c1 = std::exp(a.first.chi1_log(r) - a.e1.log_norm);
        const double d0 = log_deviation(c0, cd);
        const double d1 = log_deviation(c1, cd);
        dev0s.push_back(d0);
        dev1s.push_back(d1);
        gaps.push_back(d0 - d1);
        std::vector<Cell> row{r};
        if (wantd) row.emplace_back(cd);
        if (want0) row.emplace_back(c0);
        if (want1) row.emplace_back(c1);
        if (want0) row.emplace_back(d0);
        if (want1) row.emplace_back(d1);
        rows.rows.push_back(std::move(row));
    }

    Document doc;
    doc.kind = "wavefunction";
    add_spec_meta(doc, spec);
    doc.meta.emplace_back("eta", a.p.eta);
    doc.meta.emplace_back("E0", a.p.E0);
    doc.meta.emplace_back("E1", a.e1.E1);
    doc.meta.emplace_back("E_D", ref.E_D);
    doc.meta.emplace_back("deviation_floor", kDeviationFloor);
    doc.meta.emplace_back("r_floor", r_floor);
    doc.meta.emplace_back("max_dev0", dev0s.empty() ? kNaN : *std::max_element(dev0s.begin(), dev0s.end()));
    doc.meta.emplace_back("max_dev1", dev1s.empty() ? kNaN : *std::max_element(dev1s.begin(), dev1s.end()));
    doc.meta.emplace_back("median_dev0_minus_dev1", median(gaps));
    doc.provenance = make_provenance(cfg);
    doc.sections.push_back(std::move(rows));
    return doc;
}

namespace {

struct EngineRun {
    Analytic analytic;
    RadialGrid grid;
    std::vector<IterationRecord> history;
    bool converged = true;
};

EngineRun run_engine(const RunConfig& cfg) {
    const PotentialSpec spec = cfg.spec_for(cfg.lambda);
    Analytic a = analytic_for(spec, cfg);
    RadialGrid grid = grid_for(cfg, a.p.eta);
    const double eta = a.p.eta * cfg.guess_scale;
    const EngineGuess guess = cfg.guess_scale == 1.0 ? yukawa_guess(a.p, grid)
                                                     : yukawa_guess(make_guess_params(eta, spec), grid);
    EngineOptions opt;
    opt.max_iter = cfg.max_iter;
    opt.tol_energy = cfg.tol_energy;
    opt.update = cfg.update;
    EngineRun run{std::move(a), std::move(grid), {}, true};
    try {
        run.history = solve(spec, guess, run.grid, opt);
    } catch (const MaxIterExceeded& e) {
        run.history = e.history();
        run.converged = false;
    }
    return run;
}

}  // namespace

Document run_converge(const RunConfig& cfg) {
    const EngineRun run = run_engine(cfg);
    const double e_final = run.history.back().energy;
    std::vector<double> errors;
    Section rows{"iterations", {"n", "E_n", "error", "delta_E", "residual_norm"}, {}};
    for (const auto& rec : run.history) {
        const double err = std::abs(rec.energy - e_final);
        errors.push_back(err);
        rows.rows.push_back({static_cast<double>(rec.n), rec.energy, err, rec.delta_energy, rec.residual_norm});
    }
    const OrderFit fit =
        fit_convergence_order(errors, 1e2 * cfg.tol_energy, 1e-14 * std::abs(e_final));

    Document doc;
    doc.kind = "converge";
    add_spec_meta(doc, run.analytic.spec);
    doc.meta.emplace_back("guess_scale", cfg.guess_scale);
    doc.meta.emplace_back("converged", run.converged ? 1.0 : 0.0);
    doc.meta.emplace_back("E_final", e_final);
    doc.meta.emplace_back("E1_analytic", run.analytic.e1.E1);
    doc.meta.emplace_back("quadratic_constant", fit.quadratic_constant);
    doc.meta.emplace_back("fitted_order", fit.order);
    doc.meta.emplace_back("fit_pairs", static_cast<double>(fit.pairs));
    doc.provenance = make_provenance(cfg);
    doc.sections.push_back(std::move(rows));
    return doc;
}

SolveReport run_solve(const RunConfig& cfg) {
    const EngineRun run = run_engine(cfg);
    if (!run.converged) {
        throw MaxIterExceeded("solve: engine did not converge in " + std::to_string(cfg.max_iter) + " iterations",
                              run.history);
    }
    const Analytic& a = run.analytic;
    const EigenResult ref = solve_ground_state(a.spec, reference_options(cfg, a.p.E0, a.p.eta));
    const RadialFunction chi_d = sample_chi(ref, run.grid);
    const double chi_max = *std::max_element(ref.chi_D.values.begin(), ref.chi_D.values.end());

    SolveReport rep;
    rep.spec = a.spec;
    rep.E0 = a.p.E0;
    rep.E1 = a.e1.E1;
    rep.E_D = ref.E_D;
    rep.qlm_history = run.history;
    for (const auto& rec : run.history) {
        const RadialFunction chi = normalized_chi(rec.u, run.grid);
        RadialFunction dev;
        dev.spacing = run.grid.spacing();
        dev.quantity = "dev" + std::to_string(rec.n);
        for (std::size_t i = 0; i < chi.size(); ++i) {
            if (!(chi_d.values[i] > kDeviationFloor * chi_max)) continue;
            dev.r.push_back(chi.r[i]);
            dev.values.push_back(log_deviation(chi.values[i], chi_d.values[i]));
        }
        rep.deviation_curves.push_back(std::move(dev));
    }
    rep.provenance = make_provenance(cfg);
    return rep;
}

Document to_document(const SolveReport& rep) {
    Document doc;
    doc.kind = "solve";
    add_spec_meta(doc, rep.spec);
    doc.meta.emplace_back("E0", rep.E0);
    doc.meta.emplace_back("E1", rep.E1);
    doc.meta.emplace_back("E_D", rep.E_D);
    doc.provenance = rep.provenance;
    Section hist{"qlm_history", {"n", "E_n", "delta_E", "residual_norm"}, {}};
    for (const auto& rec : rep.qlm_history) {
        hist.rows.push_back({static_cast<double>(rec.n), rec.energy, rec.delta_energy, rec.residual_norm});
    }
    Section curves{"deviation_curves", {"n", "r", "dev"}, {}};
    for (std::size_t k = 0; k < rep.deviation_curves.size(); ++k) {
        const auto& c = rep.deviation_curves[k];
        const double n = k < rep.qlm_history.size() ? rep.qlm_history[k].n : static_cast<double>(k);
        for (std::size_t i = 0; i < c.size(); ++i) curves.rows.push_back({n, c.r[i], c.values[i]});
    }
    doc.sections.push_back(std::move(hist));
    doc.sections.push_back(std::move(curves));
    return doc;
}

namespace {

double number_of(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return *d;
    throw DomainError("report: expected a number, found '" + std::get<std::string>(c) + "'");
}

double meta_number(const Document& doc, const std::string& key) {
    const Cell* c = doc.find_meta(key);
    if (!c) throw DomainError("report: missing field '" + key + "'");
    return number_of(*c);
}

std::size_t column_index(const Section& s, const std::string& name) {
    const auto it = std::find(s.columns.begin(), s.columns.end(), name);
    if (it == s.columns.end()) throw DomainError("report: section '" + s.name + "' lacks column '" + name + "'");
    return static_cast<std::size_t>(it - s.columns.begin());
}

}  // namespace

SolveReport solve_report_from_document(const Document& doc) {
    if (doc.kind != "solve") throw DomainError("report: document kind is '" + doc.kind + "', not 'solve'");
    SolveReport rep;
    const Cell* fam = doc.find_meta("potential");
    rep.spec.family = parse_family(fam ? std::get<std::string>(*fam) : "yukawa");
    rep.spec.g = meta_number(doc, "g");
    rep.spec.lambda = meta_number(doc, "lambda");
    rep.spec.m = meta_number(doc, "mass");
    rep.E0 = meta_number(doc, "E0");
    rep.E1 = meta_number(doc, "E1");
    rep.E_D = meta_number(doc, "E_D");
    rep.provenance = doc.provenance;
    if (const Section* hist = doc.find_section("qlm_history")) {
        const auto in = column_index(*hist, "n"), ie = column_index(*hist, "E_n"),
                   id = column_index(*hist, "delta_E"), ir = column_index(*hist, "residual_norm");
        for (const auto& row : hist->rows) {
            IterationRecord rec;
            rec.n = static_cast<int>(number_of(row[in]));
            rec.energy = number_of(row[ie]);
            rec.delta_energy = number_of(row[id]);
            rec.residual_norm = number_of(row[ir]);
            rep.qlm_history.push_back(std::move(rec));
        }
    }
    if (const Section* curves = doc.find_section("deviation_curves")) {
        const auto in = column_index(*curves, "n"), ir = column_index(*curves, "r"),
                   iv = column_index(*curves, "dev");
        double current = kNaN;
        for (const auto& row : curves->rows) {
            const double n = number_of(row[in]);
            if (rep.deviation_curves.empty() || n != current) {
                RadialFunction f;
                f.quantity = "dev" + std::to_string(static_cast<int>(n));
                rep.deviation_curves.push_back(std::move(f));
                current = n;
            }
            rep.deviation_curves.back().r.push_back(number_of(row[ir]));
            rep.deviation_curves.back().values.push_back(number_of(row[iv]));
        }
    }
    return rep;
}

}  // namespace qlm::report
