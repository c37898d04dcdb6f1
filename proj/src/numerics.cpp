#include "ohlrelay/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ohl {

double q_exact(double x) {
    // Q(x) = erfc(x / sqrt(2)) / 2; erfc keeps relative accuracy deep into
    // the tail, which numerical integration of the density would not.
    return 0.5 * std::erfc(x * 0.7071067811865475244);
}

double q_approx3(double x) {
    if (x < 0.0) throw std::domain_error("q_approx3: requires x >= 0");
    static constexpr double a[3] = {5.0 / 24.0, 4.0 / 24.0, 1.0 / 24.0};
    static constexpr double b[3] = {2.0, 11.0 / 20.0, 0.5};
    const double x2 = x * x;
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += a[j] * std::exp(-b[j] * x2);
    return s;
}

namespace {

// Series expansion of P(s, x), valid for x < s + 1.
double gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Continued fraction for Q(s, x) = 1 - P(s, x), valid for x >= s + 1.
double gamma_q_contfrac(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double regularized_gamma_p(double s, double x) {
    if (s <= 0.0) throw std::domain_error("incomplete gamma: requires s > 0");
    if (x < 0.0) throw std::domain_error("incomplete gamma: requires x >= 0");
    if (x == 0.0) return 0.0;
    return (x < s + 1.0) ? gamma_p_series(s, x) : 1.0 - gamma_q_contfrac(s, x);
}

double lower_incomplete_gamma(double s, double x) {
    return regularized_gamma_p(s, x) * std::exp(std::lgamma(s));
}

double ln_lower_incomplete_gamma(double s, double x) {
    const double p = regularized_gamma_p(s, x);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::lgamma(s) + std::log(p);
}

double lambert_w(double x, LambertBranch branch) {
    constexpr double inv_e = 0.36787944117144232160;  // 1/e
    if (x < -inv_e) {
        // Tolerate representation noise at the branch point.
        if (x > -inv_e - 1e-15) x = -inv_e;
        else throw std::domain_error("lambert_w: no real solution for x < -1/e");
    }
    double w;
    if (branch == LambertBranch::principal) {
        if (x == 0.0) return 0.0;
        if (x < -inv_e + 1e-6) {
            const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
            w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        } else if (x < 10.0) {
            w = x / (1.0 + x);  // crude but inside the basin
        } else {
            const double l1 = std::log(x);
            const double l2 = std::log(l1);
            w = l1 - l2 + l2 / l1;
        }
    } else {
        if (x >= 0.0)
            throw std::domain_error("lambert_w: W_{-1} requires -1/e <= x < 0");
        if (x < -inv_e + 1e-6) {
            const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
            w = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
        } else {
            const double l1 = std::log(-x);
            const double l2 = std::log(-l1);
            w = l1 - l2 + l2 / l1;
        }
    }
    // Halley iteration on w e^w - x = 0.
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        const double dw = f / denom;
        w -= dw;
        if (std::fabs(dw) <= 1e-15 * (std::fabs(w) + 1e-300)) break;
    }
    return w;
}

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
    double a, b, value, error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    const double fc = f(c);
    resk += kWgk[7] * fc;
    resg += kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double fv = f(c - dx) + f(c + dx);
        resk += kWgk[j] * fv;
        if (j % 2 == 1) resg += kWg[j / 2] * fv;
    }
    Segment s;
    s.a = a;
    s.b = b;
    s.value = resk * h;
    s.error = std::fabs((resk - resg) * h);
    return s;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    if (a > b) throw std::invalid_argument("integrate: requires a <= b");
    if (a == b) return 0.0;
    std::vector<Segment> segs;
    segs.push_back(gk15(f, a, b));
    for (int iter = 0; iter < spec.max_subdivisions; ++iter) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (err <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)))
            return total;
        const Segment w = segs[worst];
        const double mid = 0.5 * (w.a + w.b);
        segs[worst] = gk15(f, w.a, mid);
        segs.push_back(gk15(f, mid, w.b));
    }
    double total = 0.0, err = 0.0;
    for (const auto& s : segs) {
        total += s.value;
        err += s.error;
    }
    throw AccuracyError("integrate: tolerance not met within max_subdivisions",
                        total, err);
}

double integrate_to_inf(const std::function<double(double)>& f, double a,
                        const QuadratureSpec& spec) {
    // t = a + u/(1-u) maps u in (0,1) to t in (a, inf).
    auto g = [&f, a](double u) {
        const double om = 1.0 - u;
        const double t = a + u / om;
        return f(t) / (om * om);
    };
    return integrate(g, 0.0, 1.0, spec);
}

}  // namespace ohl
