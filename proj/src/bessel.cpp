#include "patsvd/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "patsvd/error.hpp"

namespace patsvd::bessel {

namespace {

constexpr double kRescale = 1e250;

int miller_start(int order, double x) {
    const double base = std::max(static_cast<double>(order), x);
    int m = static_cast<int>(base + 30.0 + std::sqrt(40.0 * base));
    return m + (m & 1); // even, for the J0 + 2*sum(J_2k) normalisation
}

double cyl_j_series(int n, double x) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= n; ++i) term *= half / i;
    double sum = term;
    const double q = -half * half;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double sph_j_series(int l, double x) {
    double lead = 1.0;
    for (int i = 1; i <= l; ++i) lead *= x / (2.0 * i + 1.0);
    double term = 1.0;
    double sum = 1.0;
    const double q = -0.5 * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (2.0 * l + 2.0 * k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return lead * sum;
}

} // namespace

double cyl_j(int n, double x) {
    if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * cyl_j(-n, x);
    if (x < 0.0) throw DomainError("cyl_j: negative argument");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x <= 2.0) return cyl_j_series(n, x);

    const int m = miller_start(n, x);
    double next = 0.0;  // J_{k+1}
    double cur = 1e-30; // J_k, k = m
    double norm = 0.0;
    double wanted = 0.0;
    for (int k = m; k >= 1; --k) {
        const double prev = (2.0 * k / x) * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        if (k - 1 == n) wanted = cur;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            next /= kRescale;
            norm /= kRescale;
            wanted /= kRescale;
        }
    }
    norm += cur; // J_0
    return wanted / norm;
}

double cyl_j_prime(int n, double x) {
    if (n == 0) return -cyl_j(1, x);
    return 0.5 * (cyl_j(n - 1, x) - cyl_j(n + 1, x));
}

double sph_j(int l, double x) {
    if (l < 0) throw DomainError("sph_j: negative order");
    if (x < 0.0) throw DomainError("sph_j: negative argument");
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x <= 1.0) return sph_j_series(l, x);
    const double j0 = std::sin(x) / x;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    if (l == 0) return j0;
    if (l == 1) return j1;
    if (static_cast<double>(l) < x) {
        // upward recurrence is stable below the turning point
        double a = j0;
        double b = j1;
        for (int k = 1; k < l; ++k) {
            const double c = (2.0 * k + 1.0) / x * b - a;
            a = b;
            b = c;
        }
        return b;
    }

    const int m = miller_start(l, x);
    double next = 0.0;
    double cur = 1e-30;
    double wanted = 0.0;
    double at0 = 0.0;
    double at1 = 0.0;
    for (int k = m; k >= 1; --k) {
        const double prev = (2.0 * k + 1.0) / x * cur - next; // j_{k-1}
        next = cur;
        cur = prev;
        if (k - 1 == l) wanted = cur;
        if (k - 1 == 1) at1 = cur;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            next /= kRescale;
            wanted /= kRescale;
            at1 /= kRescale;
        }
    }
    at0 = cur;
    // normalise against whichever closed form is better conditioned here
    return std::abs(j0) >= std::abs(j1) ? wanted * (j0 / at0) : wanted * (j1 / at1);
}

double sph_j_prime(int l, double x) {
    if (l == 0) return -sph_j(1, x);
    return sph_j(l - 1, x) - (l + 1.0) / x * sph_j(l, x);
}

std::vector<double> roots(const std::function<double(double)>& f, int count, double x_start,
                          double step, double x_limit) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    double a = x_start;
    double fa = f(a);
    while (static_cast<int>(out.size()) < count) {
        const double b = a + step;
        if (b > x_limit)
            throw NumericalError("root bracket search passed x = " + std::to_string(x_limit) + " after " +
                                 std::to_string(out.size()) + " of " + std::to_string(count) + " roots");
        const double fb = f(b);
        if (fb == 0.0) {
            out.push_back(b);
        } else if ((fa < 0.0) != (fb < 0.0) && fa != 0.0) {
            double lo = a;
            double hi = b;
            double flo = fa;
            for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    return out;
}

} // namespace patsvd::bessel
