// Acceptance checks for the solver. One [PASS]/[FAIL] line per criterion;
// `qlm_acceptance --criterion N` runs a single one. Exit status is 0 only
// when every selected criterion passes.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qlm/engine.hpp"
#include "qlm/first_iteration.hpp"
#include "qlm/numerics.hpp"
#include "qlm/reference_solver.hpp"
#include "qlm/report.hpp"
#include "qlm/zeroth_iteration.hpp"

using namespace qlm;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " FAILED{" << what << "}";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::string fix(double x, int digits = 11) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// ---------------------------------------------------------------------------

struct TableRow {
    double lambda;
    double e0, e0_tol;
    double e1, e1_tol;
    double ed, ed_tol;
};

// Reference energies, g = m = 1, with their tolerances.
constexpr std::array<TableRow, 3> kTable{{
    {0.2, -0.32679, 5e-6, -0.32680851, 5e-9, -0.32680851, 5e-9},
    {0.5, -0.14795, 5e-6, -0.1481170, 5e-8, -0.1481170, 5e-8},
    {0.8, -0.04445, 5e-6, -0.0447042, 5e-8, -0.0447043, 5e-8},
}};

struct Energies {
    double e0, e1, ed;
};

Energies energies(double lambda) {
    const auto spec = lambda == 0.0 ? PotentialSpec::coulomb(1.0) : PotentialSpec::yukawa(1.0, lambda);
    const auto p = solve_eta(spec);
    ReferenceOptions opt;
    opt.energy_hint = p.E0;
    return {p.E0, energy_first(p, spec).E1, solve_ground_state(spec, opt).E_D};
}

void criterion_1(Outcome& o) {
    const auto t0 = Clock::now();
    for (const auto& row : kTable) {
        const Energies e = energies(row.lambda);
        const std::string lam = "lambda=" + fix(row.lambda, 1);
        o.detail << " " << lam << ": E0=" << fix(e.e0, 7) << " E1=" << fix(e.e1, 10) << " E_D=" << fix(e.ed, 10) << ";";
        o.require(std::abs(e.e0 - row.e0) <= row.e0_tol, lam + " E0 off by " + sci(e.e0 - row.e0));
        o.require(std::abs(e.e1 - row.e1) <= row.e1_tol, lam + " E1 off by " + sci(e.e1 - row.e1));
        o.require(std::abs(e.ed - row.ed) <= row.ed_tol, lam + " E_D off by " + sci(e.ed - row.ed));
    }
    const double t = seconds_since(t0);
    o.detail << " runtime " << fix(t, 2) << " s";
    o.require(t < 10.0, "runtime");
}

void criterion_2(Outcome& o) {
    for (const auto& row : kTable) {
        const Energies e = energies(row.lambda);
        const double rel = std::abs(e.e1 - e.ed) / std::abs(e.ed);
        o.detail << " lambda=" << fix(row.lambda, 1) << " rel=" << sci(rel) << ";";
        o.require(rel <= 1e-4, "rel > 1e-4 at lambda " + fix(row.lambda, 1));
        if (row.lambda == 0.2) o.require(rel <= 1e-7, "rel > 1e-7 at lambda 0.2");
    }
}

void criterion_3(Outcome& o) {
    report::RunConfig cfg;
    cfg.lambda = 0.2;
    cfg.provenance = false;
    const auto doc = report::run_wavefunction(cfg);
    const double max1 = std::get<double>(*doc.find_meta("max_dev1"));
    const double max0 = std::get<double>(*doc.find_meta("max_dev0"));
    const double gap = std::get<double>(*doc.find_meta("median_dev0_minus_dev1"));
    const double r_floor = std::get<double>(*doc.find_meta("r_floor"));
    o.detail << " max dev1=" << fix(max1, 3) << " (bound " << fix(std::log10(5e-4), 3) << "), max dev0=" << fix(max0, 3)
             << ", median(dev0-dev1)=" << fix(gap, 3) << ", floor at r=" << fix(r_floor, 2);
    o.require(max1 <= std::log10(5e-4), "dev1 above band");
    o.require(gap > 0.0, "dev0 not above dev1 in median");
}

void criterion_4(Outcome& o) {
    const auto t0 = Clock::now();
    const auto spec = PotentialSpec::coulomb(1.0);
    const auto p = solve_eta(spec);
    const FirstIteration fi(p, spec);
    const double e1 = fi.energy().E1;
    const double ed = solve_ground_state(spec).E_D;
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double r = 1e-6 + i * 0.01;
        worst = std::max(worst, std::abs(std::exp(fi.chi1_log(r)) - 2.0 * r * std::exp(-r)));
    }
    const double t = seconds_since(t0);
    o.detail << " E0=" << fix(p.E0, 12) << " E1=" << fix(e1, 12) << " E_D=" << fix(ed, 12) << " max|chi1-2re^-r|=" << sci(worst)
             << " runtime " << fix(t, 3) << " s";
    for (double e : {p.E0, e1, ed}) o.require(std::abs(e + 0.5) <= 1e-9, "energy " + fix(e, 12));
    o.require(worst <= 1e-8, "chi1 pointwise");
    o.require(t < 1.0, "runtime");
}

void criterion_5(Outcome& o) {
    const auto spec = PotentialSpec::yukawa(1.0, 0.2);
    const auto p = solve_eta(spec);
    const auto grid = default_grid(p.eta);
    const auto guess = yukawa_guess(p, grid);
    const auto u1 = qlm_step(guess.u, guess.energy, spec, grid);
    const FirstIteration fi(p, spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) worst = std::max(worst, std::abs(u1.values[i] - fi.u1(u1.r[i])));
    const double de = std::abs(energy_rayleigh(u1, spec, grid) - fi.energy().E1);
    o.detail << " max|y1_grid - y1_closed|=" << sci(worst) << " |dE1|=" << sci(de);
    o.require(worst <= 1e-8, "pointwise");
    o.require(de <= 1e-9, "energy");
}

void criterion_6(Outcome& o) {
    const auto spec = PotentialSpec::yukawa(1.0, 0.2);
    const auto p = solve_eta(spec);
    const double at = std::abs(phi(p, spec, 1e-6));
    // Least-squares slope of ln|Phi| against ln r over 1e-3 .. 1e-2. Closer
    // in, Phi is swamped by the ~1e-16 rounding floor of its constant term.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 0; k <= 20; ++k) {
        const double r = 1e-3 * std::pow(10.0, k / 20.0);
        const double x = std::log(r), y = std::log(std::abs(phi(p, spec, r)));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const auto off = make_guess_params(p.eta + 1e-3, spec);
    const double broken = std::abs(phi(off, spec, 1e-6));
    o.detail << " |Phi(1e-6)|=" << sci(at) << " fitted exponent=" << fix(slope, 4) << " off-shell |Phi(1e-6)|=" << sci(broken)
             << " (ratio " << sci(broken / std::max(at, 1e-300)) << ")";
    o.require(at <= 1e-10, "Phi(1e-6)");
    o.require(slope >= 1.9 && slope <= 2.1, "exponent outside [1.9, 2.1]");
    o.require(broken >= 1e4 * 1e-10 && broken >= 1e4 * at, "negative control");
}

void criterion_7(Outcome& o) {
    // From the self-consistent guess the energy error drops below the
    // tolerance after two steps, leaving a single usable (e_n, e_{n+1})
    // pair. The order is therefore fitted on runs started from a detuned
    // decay rate; the plain run is reported alongside.
    for (double scale : {1.0, 1.3, 0.7}) {
        report::RunConfig cfg;
        cfg.lambda = 0.2;
        cfg.provenance = false;
        cfg.guess_scale = scale;
        const auto doc = report::run_converge(cfg);
        const double order = std::get<double>(*doc.find_meta("fitted_order"));
        const double pairs = std::get<double>(*doc.find_meta("fit_pairs"));
        const double conv = std::get<double>(*doc.find_meta("converged"));
        o.detail << " scale " << fix(scale, 1) << ": p=" << (std::isnan(order) ? std::string("n/a") : fix(order, 3))
                 << " from " << static_cast<int>(pairs) << " pairs;";
        o.require(conv == 1.0, "run did not converge at scale " + fix(scale, 1));
        if (scale != 1.0) o.require(pairs >= 2 && order >= 1.7, "order below 1.7 at scale " + fix(scale, 1));
    }
}

double ei_oracle(double x) {
    using big = boost::multiprecision::cpp_bin_float_100;
    const big bx = x;
    big term = 1, sum = 0;
    for (int k = 1; k < 2000; ++k) {
        term *= bx / k;
        const big add = term / k;
        sum += add;
        if (k > 10 && abs(add) < big("1e-60")) break;
    }
    return static_cast<double>(boost::math::constants::euler<big>() + log(abs(bx)) + sum);
}

void criterion_8(Outcome& o) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double x = -1e-4 * std::pow(50.0 / 1e-4, i / 49.0);
        const double want = ei_oracle(x);
        worst = std::max(worst, std::abs(numerics::expint_ei(x) - want) / std::abs(want));
    }
    double worst_d = 0.0;
    for (double x : {-1e-3, -0.05, -0.7, -1.0, -1.3, -3.0, -6.0, -12.0, -30.0, -45.0}) {
        const double h = 1e-5 * std::abs(x);
        const double fd = (numerics::expint_ei(x + h) - numerics::expint_ei(x - h)) / (2.0 * h);
        const double want = std::exp(x) / x;
        worst_d = std::max(worst_d, std::abs(fd - want) / std::abs(want));
    }
    o.detail << " max rel err vs 100-digit series=" << sci(worst) << " max rel err of dEi/dx=" << sci(worst_d);
    o.require(worst <= 1e-12, "Ei values");
    o.require(worst_d <= 1e-6, "derivative identity");
}

void criterion_9(Outcome& o) {
    const auto spec = PotentialSpec::yukawa(1.0, 0.5);
    const double h = 0.05;
    const double e1 = solve_ground_state_fixed_step(spec, h).E_D;
    const double e2 = solve_ground_state_fixed_step(spec, h / 2).E_D;
    const double e3 = solve_ground_state_fixed_step(spec, h / 4).E_D;
    const double ratio = std::abs(e1 - e2) / std::abs(e2 - e3);
    o.detail << " h=" << h << "," << h / 2 << "," << h / 4 << ": E_D=" << fix(e1, 12) << "," << fix(e2, 12) << ","
             << fix(e3, 12) << " ratio=" << fix(ratio, 3);
    o.require(ratio >= 12.0 && ratio <= 20.0, "ratio outside [12, 20]");
}

bool same_numbers(const report::Document& a, const report::Document& b) {
    if (a.sections.size() != b.sections.size() || a.meta.size() != b.meta.size()) return false;
    const auto same = [](const report::Cell& x, const report::Cell& y) {
        if (x.index() != y.index()) return false;
        if (const double* d = std::get_if<double>(&x)) {
            const double e = std::get<double>(y);
            return (std::isnan(*d) && std::isnan(e)) || std::memcmp(d, &e, sizeof e) == 0;
        }
        return x == y;
    };
    for (std::size_t i = 0; i < a.meta.size(); ++i) {
        if (a.meta[i].first != b.meta[i].first || !same(a.meta[i].second, b.meta[i].second)) return false;
    }
    for (std::size_t s = 0; s < a.sections.size(); ++s) {
        const auto& x = a.sections[s].rows;
        const auto& y = b.sections[s].rows;
        if (x.size() != y.size()) return false;
        for (std::size_t r = 0; r < x.size(); ++r) {
            if (x[r].size() != y[r].size()) return false;
            for (std::size_t c = 0; c < x[r].size(); ++c) {
                if (!same(x[r][c], y[r][c])) return false;
            }
        }
    }
    return true;
}

#ifdef QLM_CLI_PATH
std::string run_capture(const std::string& cmd) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    pclose(pipe);
    return out;
}
#endif

void criterion_10(Outcome& o) {
#ifdef QLM_CLI_PATH
    const std::string cmd = std::string("\"") + QLM_CLI_PATH + "\" table --no-provenance --format csv";
    const std::string a = run_capture(cmd), b = run_capture(cmd);
    o.detail << " CLI table runs: " << a.size() << " bytes, identical=" << (a == b ? "yes" : "no") << ";";
    o.require(!a.empty() && a == b, "CLI output differs between runs");
#else
    o.detail << " (CLI not built; library runs only);";
#endif
    report::RunConfig cfg;
    cfg.provenance = false;
    const auto t1 = report::run_table(cfg);
    const auto t2 = report::run_table(cfg);
    o.require(report::to_csv(t1) == report::to_csv(t2), "library table differs between runs");
    o.require(report::to_json(t1) == report::to_json(t2), "library JSON differs between runs");

    cfg.lambda = 0.5;
    cfg.provenance = true;
    const auto rep = report::run_solve(cfg);
    const auto doc = report::to_document(rep);
    const bool csv_ok = same_numbers(doc, report::parse_csv(report::to_csv(doc)));
    const bool json_ok = same_numbers(doc, report::parse_json(report::to_json(doc)));
    const bool table_ok = same_numbers(t1, report::parse_csv(report::to_csv(t1))) &&
                          same_numbers(t1, report::parse_json(report::to_json(t1)));
    const auto back = report::solve_report_from_document(report::parse_json(report::to_json(doc)));
    const bool energies_ok = back.E0 == rep.E0 && back.E1 == rep.E1 && back.E_D == rep.E_D &&
                             back.qlm_history.size() == rep.qlm_history.size();
    o.detail << " round trip: solve csv=" << csv_ok << " json=" << json_ok << " table=" << table_ok
             << " energies=" << energies_ok;
    o.require(csv_ok && json_ok && table_ok && energies_ok, "round trip");
}

const std::array<std::pair<const char*, void (*)(Outcome&)>, 10> kCriteria{{
    {"table energies (E0, E1, E_D) for lambda = 0.2, 0.5, 0.8", criterion_1},
    {"relative accuracy of E1 against E_D", criterion_2},
    {"wave-function deviation band, lambda = 0.2", criterion_3},
    {"Coulomb limit", criterion_4},
    {"grid step vs closed-form first iteration", criterion_5},
    {"on-shell Phi near the origin", criterion_6},
    {"quadratic convergence order", criterion_7},
    {"Ei against extended precision", criterion_8},
    {"Numerov fourth-order step halving, lambda = 0.5", criterion_9},
    {"determinism and CSV/JSON round trip", criterion_10},
}};

bool run_one(int k) {
    Outcome o;
    try {
        kCriteria[k - 1].second(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " exception: " << e.what();
    }
    std::printf("[%s] criterion %d: %s --%s\n", o.pass ? "PASS" : "FAIL", k, kCriteria[k - 1].first, o.detail.str().c_str());
    std::fflush(stdout);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
        const int k = std::atoi(argv[2]);
        if (k < 1 || k > 10) {
            std::fprintf(stderr, "criterion must be 1..10\n");
            return 2;
        }
        return run_one(k) ? 0 : 1;
    }
    if (argc != 1) {
        std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
        return 2;
    }
    int failed = 0;
    for (int k = 1; k <= 10; ++k) failed += run_one(k) ? 0 : 1;
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
