#include "patsvd/tridiag_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "patsvd/error.hpp"

namespace patsvd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const SymTridiag& t) {
    double emax = 0.0;
    for (double e : t.off) emax = std::max(emax, e * e);
    return std::max(std::numeric_limits<double>::min(), std::numeric_limits<double>::min() * 1e2 * emax);
}

double norm_bound(const SymTridiag& t) { return std::max(std::abs(t.lower_bound()), std::abs(t.upper_bound())); }

/// LU factorisation with partial pivoting of T - shift*I (LAPACK dgttrf layout).
class ShiftedLU {
public:
    ShiftedLU(const SymTridiag& t, double shift, double tiny) : n_(t.size()), dl_(t.off), d_(t.diag), du_(t.off) {
        for (double& v : d_) v -= shift;
        du2_.assign(n_ > 2 ? n_ - 2 : 0, 0.0);
        pivoted_.assign(n_ > 1 ? n_ - 1 : 0, false);
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0) d_[i] = tiny;
                const double fact = dl_[i] / d_[i];
                dl_[i] = fact;
                d_[i + 1] -= fact * du_[i];
            } else {
                const double fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const double temp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = temp - fact * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                pivoted_[i] = true;
            }
        }
        if (n_ > 0 && d_[n_ - 1] == 0.0) d_[n_ - 1] = tiny;
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (!pivoted_[i]) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl_[i] * b[i];
            }
        }
        for (std::size_t k = n_; k-- > 0;) {
            double v = b[k];
            if (k + 1 < n_) v -= du_[k] * b[k + 1];
            if (k + 2 < n_) v -= du2_[k] * b[k + 2];
            b[k] = v / d_[k];
        }
    }

private:
    std::size_t n_;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<bool> pivoted_;
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& x) {
    const double nrm = std::sqrt(dot(x, x));
    for (double& v : x) v /= nrm;
}

} // namespace

double SymTridiag::lower_bound() const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i < off.size()) r += std::abs(off[i]);
        lo = std::min(lo, diag[i] - r);
    }
    return lo;
}

double SymTridiag::upper_bound() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i < off.size()) r += std::abs(off[i]);
        hi = std::max(hi, diag[i] + r);
    }
    return hi;
}

std::size_t sturm_count(const SymTridiag& t, double x) {
    const double pivmin = pivot_floor(t);
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e2 = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1];
        q = t.diag[i] - x - e2 / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

double bisect_eigenvalue(const SymTridiag& t, std::size_t k) {
    if (k >= t.size()) throw IndexError("eigenvalue index " + std::to_string(k) + " exceeds matrix order");
    const double span = norm_bound(t);
    double lo = t.lower_bound() - kEps * span;
    double hi = t.upper_bound() + kEps * span;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(t, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

void multiply(const SymTridiag& t, std::span<const double> x, std::span<double> y) {
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        double v = t.diag[i] * x[i];
        if (i > 0) v += t.off[i - 1] * x[i - 1];
        if (i + 1 < n) v += t.off[i] * x[i + 1];
        y[i] = v;
    }
}

std::vector<EigenPair> smallest_eigenpairs(const SymTridiag& t, std::size_t count) {
    const std::size_t n = t.size();
    if (count > n) throw ConfigError("requested " + std::to_string(count) + " eigenpairs of an order-" +
                                     std::to_string(n) + " matrix");
    const double tnorm = norm_bound(t);
    const double tiny = kEps * tnorm;
    const double tol = 10.0 * std::sqrt(static_cast<double>(n)) * kEps * tnorm;
    constexpr int kMaxIterations = 12;

    std::vector<EigenPair> pairs;
    pairs.reserve(count);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> residual(n);

    for (std::size_t k = 0; k < count; ++k) {
        EigenPair p;
        p.value = bisect_eigenvalue(t, k);
        const ShiftedLU lu(t, p.value, tiny);

        std::vector<double> x(n);
        for (double& v : x) v = uni(rng);
        normalize(x);

        bool converged = false;
        double last_residual = 0.0;
        for (int it = 1; it <= kMaxIterations; ++it) {
            lu.solve(x);
            for (const EigenPair& q : pairs) {
                const double c = dot(x, q.vector);
                for (std::size_t i = 0; i < n; ++i) x[i] -= c * q.vector[i];
            }
            normalize(x);
            multiply(t, x, residual);
            const double rq = dot(x, residual);
            for (std::size_t i = 0; i < n; ++i) residual[i] -= rq * x[i];
            last_residual = std::sqrt(dot(residual, residual));
            p.iterations = it;
            if (converged) break; // one refinement sweep after the residual test passes
            if (last_residual <= tol) converged = true;
        }
        if (!converged)
            throw NumericalError("inverse iteration for eigenpair " + std::to_string(k) + " did not converge after " +
                                 std::to_string(kMaxIterations) + " iterations (residual " +
                                 std::to_string(last_residual) + ", tolerance " + std::to_string(tol) + ")");
        p.vector = std::move(x);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

} // namespace patsvd
