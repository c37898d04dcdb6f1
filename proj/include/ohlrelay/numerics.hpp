#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ohl {

// Accuracy contract for the adaptive quadrature used throughout the
// analytical error models.
struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int max_subdivisions = 200;
};

// Thrown when the quadrature cannot meet the requested tolerances within
// the subdivision budget. Carries the best estimate so callers can decide
// whether to continue.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

// Gaussian tail probability Q(x) = P(N(0,1) > x), computed through erfc.
double q_exact(double x);

// Three-term exponential approximation of Q(x) for x >= 0:
//   Q(x) ~ sum_j a_j exp(-b_j x^2)
// with a = {5/24, 4/24, 1/24}, b = {2, 11/20, 1/2}.
// Throws std::domain_error for x < 0.
double q_approx3(double x);

// Lower incomplete gamma gamma(s, x) = int_0^x t^{s-1} e^{-t} dt, s > 0.
double lower_incomplete_gamma(double s, double x);

// Regularized P(s, x) = gamma(s, x) / Gamma(s), and its natural log of the
// unregularized value (for log-domain closed forms).
double regularized_gamma_p(double s, double x);
double ln_lower_incomplete_gamma(double s, double x);

enum class LambertBranch { principal, minus_one };

// Real Lambert W: solves w * e^w = x. Principal branch for x >= -1/e,
// W_{-1} for x in [-1/e, 0). Throws std::domain_error outside the branch
// domain.
double lambert_w(double x, LambertBranch branch = LambertBranch::principal);

// Adaptive Gauss-Kronrod (7-15) quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

// Semi-infinite integral over [a, inf), mapped to (0, 1].
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        const QuadratureSpec& spec = {});

}  // namespace ohl
