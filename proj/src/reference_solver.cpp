#include "qlm/reference_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qlm/numerics.hpp"

namespace qlm {

namespace {

constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kMinSteps = 16;

// Outermost r with U(r) <= E, or 0 if U > E everywhere.
double outer_turning_point(const PotentialSpec& spec, double energy) {
    double last_inside = 0.0;
    double first_outside = 0.0;
    double r = 1e-6;
    for (int k = 0; k < 2400; ++k, r *= 1.01) {
        if (evaluate(spec, r) <= energy) {
            last_inside = r;
            first_outside = 0.0;
        } else if (first_outside == 0.0) {
            first_outside = r;
        }
    }
    if (last_inside == 0.0) return 0.0;
    if (first_outside == 0.0) {
        throw NoBoundState("reference solver: potential stays below E = " + std::to_string(energy) +
                           " out to r = " + std::to_string(r));
    }
    double lo = last_inside, hi = first_outside;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (evaluate(spec, mid) <= energy ? lo : hi) = mid;
    }
    return lo;
}

double tail_radius(const PotentialSpec& spec, double energy, double reach) {
    const double kappa = std::sqrt(-2.0 * spec.m * energy);
    return outer_turning_point(spec, energy) + reach / kappa;
}

struct Shot {
    bool turning = false;  // false: no classically allowed region on the mesh
    std::size_t t = 0;
    int nodes = 0;
    double defect = 0.0;

    // Energy is below the ground state: no node before the match, slope excess.
    bool too_deep() const { return !turning || (nodes == 0 && defect > 0.0); }
};

// Numerov integration of chi'' = f chi on r_i = i h, i = 0..n.
class Shooter {
public:
    Shooter(const PotentialSpec& spec, double h, double r_max) : spec_(spec), h_(h) {
        const double steps = std::ceil(r_max / h);
        n_ = static_cast<std::size_t>(steps);
        if (n_ % 2 == 1) ++n_;  // even count for Simpson
        if (n_ < kMinSteps) n_ = kMinSteps;
        u_.resize(n_ + 1);
        u_[0] = 0.0;
        for (std::size_t i = 1; i <= n_; ++i) u_[i] = evaluate(spec, h * static_cast<double>(i));
        z_ = spec.origin_strength();
        u0_ = spec.origin_regular_part();
    }

    std::size_t steps() const { return n_; }
    double h() const { return h_; }

    // Index of the last classically allowed mesh point, kNoIndex if none.
    std::size_t turning_index(double energy) const {
        for (std::size_t i = n_; i >= 1; --i) {
            if (u_[i] <= energy) return i;
        }
        return kNoIndex;
    }

    double min_potential() const { return *std::min_element(u_.begin() + 1, u_.end()); }

    // Matches at t_fixed when given, else at the turning index for this energy.
    Shot shoot(double energy, std::size_t t_fixed = kNoIndex) {
        Shot s;
        std::size_t t = t_fixed == kNoIndex ? turning_index(energy) : t_fixed;
        if (t == kNoIndex) return s;
        t = std::clamp<std::size_t>(t, 2, n_ - 2);
        s.turning = true;
        s.t = t;
        fill_weights(energy);
        integrate_out(energy, t + 1);
        integrate_in(t - 1);
        for (std::size_t i = 2; i <= t; ++i) {
            if ((out_[i] > 0.0) != (out_[i - 1] > 0.0)) ++s.nodes;
        }
        const double lhs = 12.0 - 10.0 * w_[t];
        s.defect = (lhs - w_[t - 1] * out_[t - 1] / out_[t] - w_[t + 1] * in_[t + 1] / in_[t]) / h_;
        return s;
    }

    // Joined, unit-normalised, positive chi from the last shot.
    std::vector<double> joined(std::size_t t) const {
        std::vector<double> chi(n_ + 1);
        const double scale = out_[t] / in_[t];
        for (std::size_t i = 0; i <= t; ++i) chi[i] = out_[i];
        for (std::size_t i = t + 1; i <= n_; ++i) chi[i] = in_[i] * scale;
        // Composite Simpson on the even mesh.
        double acc = chi[0] * chi[0] + chi[n_] * chi[n_];
        for (std::size_t i = 1; i < n_; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * chi[i] * chi[i];
        const double norm = std::sqrt(acc * h_ / 3.0);
        const double sign = chi[t] < 0.0 ? -1.0 : 1.0;
        for (auto& v : chi) v *= sign / norm;
        return chi;
    }

private:
    void fill_weights(double energy) {
        w_.resize(n_ + 1);
        const double c = h_ * h_ / 12.0 * 2.0 * spec_.m;
        w_[0] = 0.0;  // replaced by the limit term below
        for (std::size_t i = 1; i <= n_; ++i) w_[i] = 1.0 - c * (u_[i] - energy);
    }

    void integrate_out(double energy, std::size_t last) {
        out_.assign(n_ + 1, 0.0);
        const double m = spec_.m;
        const double z = z_;
        // chi = r - m Z r^2 + c r^3 + ...
        const double c3 = (m * m * z * z + m * (u0_ - energy)) / 3.0;
        out_[0] = 0.0;
        out_[1] = h_ - m * z * h_ * h_ + c3 * h_ * h_ * h_;
        // w_0 chi_0 -> -h^2/12 lim (f chi) = 2 m Z h^2/12 as r -> 0.
        double prev_y = 2.0 * m * z * h_ * h_ / 12.0;
        for (std::size_t i = 1; i < last; ++i) {
            const double y_next = (12.0 - 10.0 * w_[i]) * out_[i] - prev_y;
            prev_y = w_[i] * out_[i];
            out_[i + 1] = y_next / w_[i + 1];
            if (std::abs(out_[i + 1]) > 1e250) {
                for (std::size_t j = 0; j <= i + 1; ++j) out_[j] *= 1e-250;
                prev_y *= 1e-250;
            }
        }
    }

    void integrate_in(std::size_t first) {
        in_.assign(n_ + 1, 0.0);
        const double f_end = (1.0 - w_[n_]) * 12.0 / (h_ * h_);
        const double kappa = std::sqrt(std::max(f_end, 0.0));
        in_[n_] = 1e-200;
        in_[n_ - 1] = 1e-200 * std::exp(kappa * h_);
        for (std::size_t i = n_ - 1; i > first; --i) {
            in_[i - 1] = ((12.0 - 10.0 * w_[i]) * in_[i] - w_[i + 1] * in_[i + 1]) / w_[i - 1];
            if (std::abs(in_[i - 1]) > 1e250) {
                for (std::size_t j = i - 1; j <= n_; ++j) in_[j] *= 1e-250;
            }
        }
    }

    const PotentialSpec& spec_;
    double h_;
    std::size_t n_ = 0;
    double z_ = 0.0;
    double u0_ = 0.0;
    std::vector<double> u_, w_, out_, in_;
};

// A Shooter sized for one trial energy, with the step coarsened if the
// mesh would otherwise be too long (bracketing only needs the topology).
bool too_deep_at(const PotentialSpec& spec, double energy, double h, const ReferenceOptions& opt) {
    double r_max;
    if (outer_turning_point(spec, energy) == 0.0) return true;
    r_max = tail_radius(spec, energy, opt.tail_reach);
    const double h_eff = std::max(h, r_max / 200000.0);
    Shooter s(spec, h_eff, r_max);
    return s.shoot(energy).too_deep();
}

struct Bracket {
    double deep;
    double shallow;
};

Bracket find_bracket(const PotentialSpec& spec, double h, const ReferenceOptions& opt) {
    if (opt.energy_hint && *opt.energy_hint < 0.0) {
        const double lo = *opt.energy_hint * 1.2;
        const double hi = *opt.energy_hint * 0.8;
        if (too_deep_at(spec, lo, h, opt) && !too_deep_at(spec, hi, h, opt)) return {lo, hi};
    }
    // Scan upward from twice the deepest potential value on a short mesh.
    const Shooter probe(spec, h, 1.0);
    const double floor = 2.0 * std::min(probe.min_potential(), -1e-12);
    double prev = floor;
    if (!too_deep_at(spec, prev, h, opt)) {
        throw NoBoundState("reference solver: no bracket above E_floor = " + std::to_string(floor));
    }
    for (int k = 1; k < 200; ++k) {
        const double e = floor * std::pow(0.5, k);
        if (std::abs(e) < 1e-10 * std::abs(floor) || std::abs(e) < 1e-12) break;
        if (!too_deep_at(spec, e, h, opt)) return {prev, e};
        prev = e;
    }
    throw NoBoundState("reference solver: matching defect never changes sign below E = 0");
}

EigenResult solve_at_step(const PotentialSpec& spec, double h, const ReferenceOptions& opt) {
    if (!(h > 0.0)) throw DomainError("reference solver: step must be positive");
    Bracket b = find_bracket(spec, h, opt);

    const double r_max = tail_radius(spec, b.shallow, opt.tail_reach);
    if (r_max / h > static_cast<double>(opt.max_steps)) {
        throw NonConvergence("reference solver: mesh of " + std::to_string(r_max / h) +
                             " steps exceeds the limit");
    }
    Shooter shooter(spec, h, r_max);

    // Narrow on the predicate until both ends sit on the node-free branch,
    // where the defect is continuous in E.
    Shot top = shooter.shoot(b.shallow);
    for (int it = 0; it < 200 && (top.nodes > 0 || !top.turning); ++it) {
        const double mid = 0.5 * (b.deep + b.shallow);
        const Shot s = shooter.shoot(mid);
        if (s.too_deep()) {
            b.deep = mid;
        } else {
            b.shallow = mid;
            top = s;
        }
    }
    if (!(shooter.shoot(b.deep).too_deep()) || top.too_deep()) {
        throw NonConvergence("reference solver: lost the energy bracket");
    }

    // Fix the matching index so the defect is a smooth function of E.
    const std::size_t t = shooter.turning_index(b.shallow);
    auto defect = [&](double e) { return shooter.shoot(e, t).defect; };
    double lo = b.deep, hi = b.shallow;
    while (defect(lo) * defect(hi) > 0.0) {
        // Matching point moved between the ends; tighten on the predicate.
        const double mid = 0.5 * (lo + hi);
        (shooter.shoot(mid).too_deep() ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::abs(hi)) throw NonConvergence("reference solver: defect bracket collapsed");
    }
    const auto root = numerics::find_root_bracketed(defect, lo, hi, 0.0);

    const Shot fin = shooter.shoot(root.root, t);
    EigenResult res;
    res.E_D = root.root;
    res.match_defect = fin.defect;
    res.h = h;
    res.r_match = h * static_cast<double>(t);
    res.r_max = h * static_cast<double>(shooter.steps());
    const auto chi = shooter.joined(t);
    res.nodes = 0;
    for (std::size_t i = 2; i + 1 < chi.size(); ++i) {
        if ((chi[i] > 0.0) != (chi[i - 1] > 0.0)) ++res.nodes;
    }
    res.chi_D.r.resize(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i) res.chi_D.r[i] = h * static_cast<double>(i);
    res.chi_D.values = chi;
    res.chi_D.spacing = GridSpacing::Uniform;
    res.chi_D.quantity = "chi";
    return res;
}

}  // namespace

EigenResult solve_ground_state_fixed_step(const PotentialSpec& spec, double h,
                                          const ReferenceOptions& options) {
    spec.validate();
    return solve_at_step(spec, h, options);
}

EigenResult solve_ground_state(const PotentialSpec& spec, const ReferenceOptions& options) {
    spec.validate();
    if (!(options.tol > 0.0)) throw DomainError("reference solver: tol must be positive");
    ReferenceOptions opt = options;
    double h = options.h0;
    EigenResult prev = solve_at_step(spec, h, opt);
    for (int k = 0; k < options.max_halvings; ++k) {
        h *= 0.5;
        opt.energy_hint = prev.E_D;
        EigenResult next = solve_at_step(spec, h, opt);
        next.halving_change = std::abs(next.E_D - prev.E_D);
        if (next.halving_change <= options.tol) return next;
        prev = std::move(next);
    }
    throw NonConvergence("reference solver: step halving did not reach tol; last change " +
                         std::to_string(prev.halving_change));
}

RadialFunction sample_chi(const EigenResult& result, const RadialGrid& grid) {
    const auto& mesh = result.chi_D;
    const std::size_t n = mesh.r.size();
    if (n < 6) throw ExtrapolationError("sample_chi: reference mesh is empty");
    const double h = result.h;
    RadialFunction out;
    out.r.assign(grid.points().begin(), grid.points().end());
    out.values.resize(out.r.size());
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        const double x = out.r[i];
        if (x < mesh.r.front() || x > mesh.r.back()) {
            throw ExtrapolationError("sample_chi: r = " + std::to_string(x) + " beyond the reference mesh [0, " +
                                     std::to_string(mesh.r.back()) + "]");
        }
        // Six-point Lagrange interpolation on the uniform mesh; the shooting
        // values are fourth-order accurate, so a cubic would be the weak link.
        const auto cell = static_cast<std::size_t>(x / h);
        const std::size_t start = std::min(cell >= 2 ? cell - 2 : 0, n - 6);
        const double t = x / h - static_cast<double>(start);
        double acc = 0.0;
        for (std::size_t k = 0; k < 6; ++k) {
            double basis = 1.0;
            for (std::size_t j = 0; j < 6; ++j) {
                if (j != k) basis *= (t - static_cast<double>(j)) / (static_cast<double>(k) - static_cast<double>(j));
            }
            acc += basis * mesh.values[start + k];
        }
        out.values[i] = acc;
    }
    out.spacing = grid.spacing();
    out.quantity = "chi_D";
    return out;
}

}  // namespace qlm
