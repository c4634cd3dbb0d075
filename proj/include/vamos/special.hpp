#pragma once

#include <cmath>
#include <limits>

#include "vamos/common.hpp"

// Small special-function kit backing the significance tests: regularized
// incomplete beta (Student-t tails) and regularized upper incomplete gamma
// (chi-square tails). Continued fractions evaluated with Lentz's method.

namespace vamos {

namespace detail {

inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-15;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incbeta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw domain_error("incbeta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw domain_error("incbeta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::betacf(a, b, x) / a;
    }
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
inline double gamma_q(double a, double x) {
    if (a <= 0.0) throw domain_error("gamma_q: a must be positive");
    if (x < 0.0) throw domain_error("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // series for P(a,x), return 1-P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 1; n <= 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 3e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // continued fraction for Q directly
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 3e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom:
// p = I_{dof/(dof+t^2)}(dof/2, 1/2).
inline double student_t_two_sided_p(double t, double dof) {
    if (dof < 1.0) throw domain_error("student_t_two_sided_p: dof must be >= 1");
    return incbeta(0.5 * dof, 0.5, dof / (dof + t * t));
}

// Upper-tail p-value of a chi-square statistic.
inline double chi_square_upper_p(double stat, double dof) {
    return gamma_q(0.5 * dof, 0.5 * stat);
}

} // namespace vamos
