#include "qlm/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

namespace qlm::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod abscissae on [0,1); index 7 is the centre. Gauss nodes sit at odd indices.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kMaxIntervals = 4000;

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

double checked(const RealFunction& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw NonFiniteSample("integrand is not finite at x = " + std::to_string(x));
    }
    return v;
}

// QUADPACK qk15 local rule with its error heuristic.
Segment gk15(const RealFunction& f, double a, double b, std::size_t& evals) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, centre);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = checked(f, centre - dx);
        f2[j] = checked(f, centre + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    evals += 15;
    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * resabs, err);
    }
    return {a, b, result, err};
}

// Neumaier-compensated sum in left-to-right interval order, so the result
// does not depend on the heap's internal layout.
std::pair<double, double> ordered_sum(std::vector<Segment> segs) {
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    double sum = 0.0, comp = 0.0, err = 0.0;
    for (const auto& s : segs) {
        const double t = sum + s.value;
        comp += std::abs(sum) >= std::abs(s.value) ? (sum - t) + s.value : (s.value - t) + sum;
        sum = t;
        err += s.error;
    }
    return {sum + comp, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b, double tol) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("integrate_adaptive: need finite a < b");
    }
    if (!(tol > 0.0)) throw DomainError("integrate_adaptive: tol must be positive");

    std::size_t evals = 0;
    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    const Segment first = gk15(f, a, b, evals);
    heap.push(first);
    double total = first.value;
    double total_err = first.error;

    while (total_err > std::max(tol, tol * std::abs(total))) {
        if (heap.size() >= kMaxIntervals) {
            throw NonConvergence("integrate_adaptive: subdivision limit reached on [" +
                                 std::to_string(a) + ", " + std::to_string(b) + "]");
        }
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            throw NonConvergence("integrate_adaptive: interval cannot be bisected further");
        }
        heap.pop();
        const Segment left = gk15(f, worst.a, mid, evals);
        const Segment right = gk15(f, mid, worst.b, evals);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    const auto [value, err] = ordered_sum(std::move(segs));
    return {value, err, evals};
}

QuadratureResult integrate_semi_infinite(const RealFunction& f, double a, double tol,
                                         double decay_scale) {
    if (!(decay_scale > 0.0)) throw DomainError("integrate_semi_infinite: decay_scale must be positive");
    const double span = 40.0 / decay_scale;
    double r_max = a + span;
    for (int attempt = 0;; ++attempt) {
        const double edge = f(r_max);
        if (std::isfinite(edge) && std::abs(edge) / decay_scale < tol) break;
        if (attempt == 8) {
            throw NonConvergence("integrate_semi_infinite: integrand does not decay at the declared rate");
        }
        r_max += span;
    }
    return integrate_adaptive(f, a, r_max, tol);
}

RootResult find_root_bracketed(const RealFunction& f, double lo, double hi, double tol) {
    if (lo > hi) std::swap(lo, hi);
    auto g = [&](double x) {
        const double v = f(x);
        if (std::isnan(v)) throw NonFiniteSample("find_root_bracketed: f is NaN at " + std::to_string(x));
        return v;
    };
    const double flo = g(lo);
    const double fhi = g(hi);
    if (!(flo * fhi < 0.0)) {
        throw NoSignChange("find_root_bracketed: f(lo) and f(hi) have the same sign on [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    auto done = [tol](double x, double y) {
        return std::abs(y - x) <= std::max(tol, 4.0 * kEps * std::max(std::abs(x), std::abs(y)));
    };
    std::uintmax_t max_iter = 500;
    const auto [l, u] = boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, done, max_iter);
    if (max_iter >= 500 && !done(l, u)) {
        throw NonConvergence("find_root_bracketed: iteration limit reached");
    }
    const double fl = g(l);
    const double fu = g(u);
    const bool take_lower = std::abs(fl) <= std::abs(fu);
    return {take_lower ? l : u, take_lower ? fl : fu, u - l};
}

double expint_ein(double x) {
    if (x < 0.0) throw DomainError("expint_ein: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x > 2.0) return expint_e1_scaled(x) * std::exp(-x) + kEulerGamma + std::log(x);
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) <= kEps * std::abs(sum)) break;
    }
    return sum;
}

double expint_e1_scaled(double x) {
    if (!(x > 0.0)) throw DomainError("expint_e1_scaled: x must be positive");
    if (x <= 1.0) {
        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 100; ++k) {
            term *= -x / k;
            const double add = term / k;
            sum += add;
            if (std::abs(add) <= kEps * std::abs(sum)) break;
        }
        return std::exp(x) * (-kEulerGamma - std::log(x) - sum);
    }
    // Modified Lentz evaluation of the continued fraction for e^x E1(x).
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) return h;
    }
    throw NonConvergence("expint_e1_scaled: continued fraction did not converge");
}

double expint_ei(double x) {
    if (!(x < 0.0)) throw DomainError("expint_ei: only negative arguments are supported");
    const double z = -x;
    if (z <= 1.0) {
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 100; ++k) {
            term *= x / k;
            const double add = term / k;
            sum += add;
            if (std::abs(add) <= kEps * std::abs(sum)) break;
        }
        return kEulerGamma + std::log(z) + sum;
    }
    return -expint_e1_scaled(z) * std::exp(-z);
}

double coth_stable(double x) {
    if (x == 0.0) throw DomainError("coth_stable: pole at x = 0");
    const double ax = std::abs(x);
    if (ax < 1e-4) return 1.0 / x + x / 3.0 - x * x * x / 45.0;
    const double v = 1.0 + 2.0 / std::expm1(2.0 * ax);
    return x > 0.0 ? v : -v;
}

double coth_minus_inverse(double x) {
    // coth x - 1/x = sum_n 2^{2n} B_{2n} x^{2n-1} / (2n)!
    static constexpr std::array<double, 15> c = {
        0.33333333333333333333,   -0.022222222222222222222,  0.0021164021164021164021,
        -0.00021164021164021164021, 0.000021377799155576933355, -2.1644042808063972085e-6,
        2.19259478518737778e-7,   -2.2214608789979679076e-8, 2.2507846516808992854e-9,
        -2.2805151204592182866e-10, 2.3106432599002624097e-11, -2.3411706819824883959e-12,
        2.3721017400233654295e-13, -2.4034415333307706179e-14, 2.4351954029183368731e-15};
    if (std::abs(x) < 1.0) {
        const double x2 = x * x;
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x2 + *it;
        return acc * x;
    }
    return coth_stable(x) - 1.0 / x;
}

}  // namespace qlm::numerics
