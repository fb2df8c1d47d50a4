#include "qlm/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace qlm {

namespace {

constexpr std::size_t kStencil = 6;

// W[o][k] = int_o^{o+1} L_k(t) dt for the Lagrange basis on nodes 0..5.
std::array<std::array<double, kStencil>, kStencil - 1> make_panel_weights() {
    std::array<std::array<double, kStencil>, kStencil - 1> w{};
    for (std::size_t k = 0; k < kStencil; ++k) {
        // Expand L_k as a polynomial in t, coefficients in increasing degree.
        std::array<double, kStencil> poly{};
        poly[0] = 1.0;
        double denom = 1.0;
        for (std::size_t i = 0; i < kStencil; ++i) {
            if (i == k) continue;
            std::array<double, kStencil> next{};
            for (std::size_t d = 0; d + 1 < kStencil; ++d) {
                next[d + 1] += poly[d];
                next[d] -= static_cast<double>(i) * poly[d];
            }
            poly = next;
            denom *= static_cast<double>(k) - static_cast<double>(i);
        }
        for (std::size_t o = 0; o + 1 < kStencil; ++o) {
            double acc = 0.0;
            for (std::size_t d = 0; d < kStencil; ++d) {
                const double hi = std::pow(static_cast<double>(o + 1), static_cast<double>(d + 1));
                const double lo = std::pow(static_cast<double>(o), static_cast<double>(d + 1));
                acc += poly[d] * (hi - lo) / static_cast<double>(d + 1);
            }
            w[o][k] = acc / denom;
        }
    }
    return w;
}

const auto kPanelWeights = make_panel_weights();

void require_grid_args(double r_min, double r_max, std::size_t points) {
    if (!(r_min > 0.0) || !(r_max > r_min)) throw DomainError("radial grid: need 0 < r_min < r_max");
    if (points < kStencil + 1) throw DomainError("radial grid: need at least 7 points");
}

}  // namespace

std::string to_string(GridSpacing spacing) {
    switch (spacing) {
        case GridSpacing::Uniform: return "uniform";
        case GridSpacing::LogUniform: return "log";
        case GridSpacing::Mapped: return "mapped";
    }
    return "unknown";
}

GridSpacing parse_spacing(const std::string& name) {
    if (name == "uniform") return GridSpacing::Uniform;
    if (name == "log") return GridSpacing::LogUniform;
    if (name == "mapped") return GridSpacing::Mapped;
    throw DomainError("unknown grid spacing '" + name + "'");
}

RadialGrid::RadialGrid(std::vector<double> r, std::vector<double> jac, double dx,
                       GridSpacing spacing, double beta)
    : r_(std::move(r)), jac_(std::move(jac)), dx_(dx), spacing_(spacing), beta_(beta) {}

RadialGrid RadialGrid::uniform(double r_min, double r_max, std::size_t points) {
    require_grid_args(r_min, r_max, points);
    const double dx = (r_max - r_min) / static_cast<double>(points - 1);
    std::vector<double> r(points), jac(points, 1.0);
    for (std::size_t i = 0; i < points; ++i) r[i] = r_min + dx * static_cast<double>(i);
    r.back() = r_max;
    return RadialGrid(std::move(r), std::move(jac), dx, GridSpacing::Uniform, 0.0);
}

RadialGrid RadialGrid::log_uniform(double r_min, double r_max, std::size_t points) {
    require_grid_args(r_min, r_max, points);
    const double x0 = std::log(r_min);
    const double dx = (std::log(r_max) - x0) / static_cast<double>(points - 1);
    std::vector<double> r(points), jac(points);
    for (std::size_t i = 0; i < points; ++i) {
        r[i] = std::exp(x0 + dx * static_cast<double>(i));
        jac[i] = r[i];
    }
    r.front() = r_min;
    r.back() = r_max;
    jac.front() = r_min;
    jac.back() = r_max;
    return RadialGrid(std::move(r), std::move(jac), dx, GridSpacing::LogUniform, 0.0);
}

RadialGrid RadialGrid::mapped(double r_min, double r_max, std::size_t points, double beta) {
    require_grid_args(r_min, r_max, points);
    if (!(beta >= 0.0)) throw DomainError("radial grid: mapping beta must be non-negative");
    const auto to_x = [beta](double r) { return std::log(r) + beta * r; };
    const double x0 = to_x(r_min);
    const double dx = (to_x(r_max) - x0) / static_cast<double>(points - 1);
    std::vector<double> r(points), jac(points);
    double guess = r_min;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = x0 + dx * static_cast<double>(i);
        double ri = guess;
        for (int it = 0; it < 100; ++it) {
            // Newton on ln r + beta r = x, carried out in ln r for robustness.
            const double step = (to_x(ri) - x) / (1.0 + beta * ri);
            ri *= std::exp(-step);
            if (std::abs(step) < 1e-15) break;
        }
        r[i] = ri;
        guess = ri;
    }
    r.front() = r_min;
    r.back() = r_max;
    for (std::size_t i = 0; i < points; ++i) jac[i] = r[i] / (1.0 + beta * r[i]);
    return RadialGrid(std::move(r), std::move(jac), dx, GridSpacing::Mapped, beta);
}

std::vector<double> RadialGrid::panel_integrals(std::span<const double> f) const {
    if (f.size() != r_.size()) throw DomainError("radial grid: sample count does not match grid");
    const std::size_t m = r_.size();
    std::vector<double> panels(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t start = std::min(i >= 2 ? i - 2 : 0, m - kStencil);
        const auto& w = kPanelWeights[i - start];
        double acc = 0.0;
        for (std::size_t k = 0; k < kStencil; ++k) acc += w[k] * f[start + k] * jac_[start + k];
        panels[i] = acc * dx_;
    }
    return panels;
}

double RadialGrid::head_integral(std::span<const double> f, int head_power) const {
    const double r0 = r_[0];
    const double r1 = r_[1];
    const double p = static_cast<double>(head_power);
    const double q0 = f[0] / std::pow(r0, p);
    const double q1 = f[1] / std::pow(r1, p);
    const double c1 = (q1 - q0) / (r1 - r0);
    const double c0 = q0 - c1 * r0;
    return c0 * std::pow(r0, p + 1.0) / (p + 1.0) + c1 * std::pow(r0, p + 2.0) / (p + 2.0);
}

std::vector<double> RadialGrid::cumulative(std::span<const double> f, int head_power) const {
    const auto panels = panel_integrals(f);
    std::vector<double> out(r_.size());
    double sum = head_integral(f, head_power);
    double comp = 0.0;
    out[0] = sum;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const double y = panels[i] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        out[i + 1] = sum;
    }
    return out;
}

std::vector<double> RadialGrid::suffix(std::span<const double> f) const {
    const auto panels = panel_integrals(f);
    std::vector<double> out(r_.size());
    double sum = 0.0;
    double comp = 0.0;
    out.back() = 0.0;
    for (std::size_t i = panels.size(); i-- > 0;) {
        const double y = panels[i] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        out[i] = sum;
    }
    return out;
}

double RadialGrid::integrate(std::span<const double> f, int head_power) const {
    return cumulative(f, head_power).back();
}

double RadialFunction::operator()(double x) const {
    const std::size_t n = r.size();
    if (n == 0 || values.size() != n) throw ExtrapolationError("radial function is empty");
    if (x < r.front() || x > r.back()) {
        throw ExtrapolationError("radial function: r = " + std::to_string(x) + " outside [" +
                                 std::to_string(r.front()) + ", " + std::to_string(r.back()) + "]");
    }
    if (n == 1) return values[0];
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t k = it == r.end() ? n - 2 : static_cast<std::size_t>(it - r.begin()) - 1;
    k = std::min(k, n - 2);

    const auto secant = [&](std::size_t i) { return (values[i + 1] - values[i]) / (r[i + 1] - r[i]); };
    const auto slope = [&](std::size_t i) {
        if (i == 0) return secant(0);
        if (i == n - 1) return secant(n - 2);
        const double d0 = secant(i - 1);
        const double d1 = secant(i);
        if (d0 * d1 <= 0.0) return 0.0;
        const double h0 = r[i] - r[i - 1];
        const double h1 = r[i + 1] - r[i];
        return 3.0 * (h0 + h1) / ((2.0 * h1 + h0) / d0 + (h1 + 2.0 * h0) / d1);
    };

    const double h = r[k + 1] - r[k];
    const double t = (x - r[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values[k] + (t3 - 2 * t2 + t) * h * slope(k) +
           (-2 * t3 + 3 * t2) * values[k + 1] + (t3 - t2) * h * slope(k + 1);
}

}  // namespace qlm
