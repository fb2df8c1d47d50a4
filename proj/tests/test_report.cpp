#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

#include "qlm/report.hpp"

using namespace qlm;
using namespace qlm::report;
using Catch::Matchers::WithinAbs;

namespace {

bool same_cell(const Cell& a, const Cell& b) {
    if (a.index() != b.index()) return false;
    if (const double* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        if (std::isnan(*x)) return std::isnan(y);
        return std::bit_cast<std::uint64_t>(*x) == std::bit_cast<std::uint64_t>(y);
    }
    return std::get<std::string>(a) == std::get<std::string>(b);
}

void require_same(const Document& a, const Document& b) {
    REQUIRE(a.kind == b.kind);
    REQUIRE(a.meta.size() == b.meta.size());
    for (std::size_t i = 0; i < a.meta.size(); ++i) {
        CHECK(a.meta[i].first == b.meta[i].first);
        CHECK(same_cell(a.meta[i].second, b.meta[i].second));
    }
    REQUIRE(a.provenance.size() == b.provenance.size());
    for (std::size_t i = 0; i < a.provenance.size(); ++i) {
        CHECK(a.provenance[i].first == b.provenance[i].first);
        CHECK(same_cell(a.provenance[i].second, b.provenance[i].second));
    }
    REQUIRE(a.sections.size() == b.sections.size());
    for (std::size_t s = 0; s < a.sections.size(); ++s) {
        const auto& x = a.sections[s];
        const auto& y = b.sections[s];
        CHECK(x.name == y.name);
        CHECK(x.columns == y.columns);
        REQUIRE(x.rows.size() == y.rows.size());
        for (std::size_t r = 0; r < x.rows.size(); ++r) {
            REQUIRE(x.rows[r].size() == y.rows[r].size());
            for (std::size_t c = 0; c < x.rows[r].size(); ++c) CHECK(same_cell(x.rows[r][c], y.rows[r][c]));
        }
    }
}

Document random_document(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> bits;
    const auto any_double = [&] {
        // Arbitrary finite bit patterns, including subnormals.
        double d;
        do {
            d = std::bit_cast<double>(bits(rng));
        } while (!std::isfinite(d));
        return d;
    };
    Document doc;
    doc.kind = "synthetic";
    doc.meta = {{"alpha", any_double()}, {"label", std::string("plain text")}, {"neg_zero", -0.0}};
    doc.provenance = {{"tool", std::string("qlm 1.0.0")}, {"seed", static_cast<double>(seed % 1000)}};
    Section a{"first", {"x", "y", "note"}, {}};
    Section b{"second", {"y", "z"}, {}};
    for (int i = 0; i < 40; ++i) a.rows.push_back({any_double(), any_double(), std::string(i % 2 ? "ok" : "a,\"b\"")});
    for (int i = 0; i < 25; ++i) b.rows.push_back({any_double(), std::ldexp(1.0, -1074 + i)});
    b.rows.push_back({std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()});
    doc.sections = {a, b};
    return doc;
}

}  // namespace

TEST_CASE("numbers are printed with 17 significant digits", "[report][io]") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-0.5) == "-0.5");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV and JSON round-trips are exact", "[report][io][property]") {
    for (std::uint64_t seed : {1u, 2u, 77u, 4096u}) {
        const Document doc = random_document(seed);
        INFO("seed = " << seed);
        require_same(doc, parse_csv(to_csv(doc)));
        require_same(doc, parse_json(to_json(doc)));
        // Serialising again gives identical bytes.
        CHECK(to_csv(parse_csv(to_csv(doc))) == to_csv(doc));
        CHECK(to_json(parse_json(to_json(doc))) == to_json(doc));
    }
}

TEST_CASE("CSV layout", "[report][io]") {
    Document doc;
    doc.kind = "table";
    doc.meta = {{"g", 1.0}};
    doc.sections = {{"rows", {"lambda", "status"}, {{0.2, std::string("ok")}}}};
    const std::string csv = to_csv(doc);
    CHECK(csv.rfind("# units: r=bohr energy=hartree\n", 0) == 0);
    CHECK(csv.find("\nlambda,status\n0.20000000000000001,ok\n") != std::string::npos);
    CHECK(csv.find("provenance") == std::string::npos);
    CHECK_THROWS_AS(parse_csv("# kind: x\na,b\n1\n"), DomainError);
}

TEST_CASE("solve report survives serialisation", "[report][io]") {
    SolveReport rep;
    rep.spec = PotentialSpec::yukawa(1.0, 0.5);
    rep.E0 = -0.14794656023705;
    rep.E1 = -0.14811701708109;
    rep.E_D = -0.14811702189233;
    for (int n = 0; n < 3; ++n) {
        IterationRecord rec;
        rec.n = n;
        rec.energy = rep.E0 + n * 1e-5 / 3.0;
        rec.delta_energy = n ? 1.0 / (7.0 + n) : 0.0;
        rec.residual_norm = std::exp(-n);
        rep.qlm_history.push_back(rec);
        RadialFunction dev;
        for (int i = 0; i < 5; ++i) {
            dev.r.push_back(0.1 * (i + 1) / 3.0);
            dev.values.push_back(-1.0 - n - i / 7.0);
        }
        rep.deviation_curves.push_back(dev);
    }
    for (const auto& text : {to_csv(to_document(rep)), to_json(to_document(rep))}) {
        const Document doc = text.front() == '{' ? parse_json(text) : parse_csv(text);
        const SolveReport back = solve_report_from_document(doc);
        CHECK(back.spec.lambda == rep.spec.lambda);
        CHECK(back.E0 == rep.E0);
        CHECK(back.E1 == rep.E1);
        CHECK(back.E_D == rep.E_D);
        REQUIRE(back.qlm_history.size() == 3);
        REQUIRE(back.deviation_curves.size() == 3);
        for (int n = 0; n < 3; ++n) {
            CHECK(back.qlm_history[n].energy == rep.qlm_history[n].energy);
            CHECK(back.qlm_history[n].delta_energy == rep.qlm_history[n].delta_energy);
            CHECK(back.deviation_curves[n].r == rep.deviation_curves[n].r);
            CHECK(back.deviation_curves[n].values == rep.deviation_curves[n].values);
        }
    }
    Document wrong;
    wrong.kind = "table";
    CHECK_THROWS_AS(solve_report_from_document(wrong), DomainError);
}

TEST_CASE("log deviation", "[report]") {
    CHECK(log_deviation(1.0, 1.0) == kDeviationCap);
    CHECK_THAT(log_deviation(0.999, 1.0), WithinAbs(-3.0, 1e-12));
    CHECK_THAT(log_deviation(1.1, 1.0), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("convergence order fit", "[report]") {
    // e_{n+1} = 0.5 e_n^2 exactly.
    std::vector<double> e{1e-1};
    for (int i = 0; i < 4; ++i) e.push_back(0.5 * e.back() * e.back());
    e.push_back(0.0);
    const auto fit = fit_convergence_order(e, 1e-30, 1e-40);
    CHECK(fit.pairs == 4);
    CHECK_THAT(fit.order, WithinAbs(2.0, 1e-9));
    CHECK_THAT(fit.constant, WithinAbs(0.5, 1e-8));
    CHECK_THAT(fit.quadratic_constant, WithinAbs(0.5, 1e-9));

    // Linear convergence is reported as such.
    std::vector<double> lin{1.0, 0.3, 0.09, 0.027, 0.0081};
    CHECK_THAT(fit_convergence_order(lin, 1e-12, 1e-12).order, WithinAbs(1.0, 1e-9));
    // Too few usable pairs.
    CHECK(std::isnan(fit_convergence_order({1e-3, 1e-7, 0.0}, 1e-10, 1e-20).order));
}

TEST_CASE("table command", "[report][cli]") {
    RunConfig cfg;
    cfg.provenance = false;
    cfg.lambdas = {0.0, 0.2, 1.5};
    const Document a = run_table(cfg);
    const Document b = run_table(cfg);
    CHECK(to_csv(a) == to_csv(b));
    CHECK(a.provenance.empty());
    const Section* rows = a.find_section("rows");
    REQUIRE(rows);
    REQUIRE(rows->rows.size() == 3);
    // lambda = 0 row is hydrogen.
    CHECK_THAT(std::get<double>(rows->rows[0][1]), WithinAbs(0.5, 1e-12));
    CHECK_THAT(std::get<double>(rows->rows[0][2]), WithinAbs(0.5, 1e-9));
    CHECK_THAT(std::get<double>(rows->rows[0][3]), WithinAbs(0.5, 1e-9));
    CHECK(std::get<std::string>(rows->rows[1][4]) == "ok");
    CHECK(std::get<std::string>(rows->rows[2][4]) == "no_bound_state");
    CHECK(std::isnan(std::get<double>(rows->rows[2][1])));
}

TEST_CASE("wavefunction command", "[report][cli]") {
    RunConfig cfg;
    cfg.lambda = 0.2;
    const Document doc = run_wavefunction(cfg);
    CHECK(doc.kind == "wavefunction");
    CHECK(!doc.provenance.empty());
    const Section* rows = doc.find_section("rows");
    REQUIRE(rows);
    CHECK(rows->columns == std::vector<std::string>{"r", "chi_D", "chi0", "chi1", "dev0", "dev1"});
    CHECK(rows->rows.size() > 500);
    const double max1 = std::get<double>(*doc.find_meta("max_dev1"));
    const double max0 = std::get<double>(*doc.find_meta("max_dev0"));
    CHECK(max1 < max0);
    CHECK(max1 <= std::log10(5e-4));
    CHECK(std::get<double>(*doc.find_meta("median_dev0_minus_dev1")) > 0.0);

    cfg.wave_columns = {"D"};
    const Document only = run_wavefunction(cfg);
    CHECK(only.find_section("rows")->columns == std::vector<std::string>{"r", "chi_D"});
}

TEST_CASE("converge command keeps a capped history", "[report][cli]") {
    RunConfig cfg;
    cfg.lambda = 0.5;
    cfg.max_iter = 1;
    cfg.tol_energy = 1e-15;
    const Document doc = run_converge(cfg);
    CHECK(std::get<double>(*doc.find_meta("converged")) == 0.0);
    CHECK(doc.find_section("iterations")->rows.size() == 2);
}

TEST_CASE("spec_for maps lambda = 0 to Coulomb", "[report]") {
    RunConfig cfg;
    CHECK(cfg.spec_for(0.0).family == PotentialFamily::Coulomb);
    CHECK(cfg.spec_for(0.3).family == PotentialFamily::Yukawa);
    CHECK(cfg.spec_for(0.3).lambda == 0.3);
}
