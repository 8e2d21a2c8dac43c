#include "levcav/numerics.h"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "levcav/error.h"

namespace levcav::numerics {

RootResult brent(const std::function<double(double)>& f, double a, double b, double relTol,
                 double absTol, int maxIter)
{
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0)
        return {a, 0};
    if (fb == 0.0)
        return {b, 0};
    if ((fa > 0.0) == (fb > 0.0))
        throw ConvergenceError("brent: no sign change on [" + std::to_string(a) + ", "
                               + std::to_string(b) + "]");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 1; it <= maxIter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 0.5 * (relTol * std::abs(b) + absTol);
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0)
            return {b, it};

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic interpolation, or secant when only two points.
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    throw ConvergenceError("brent: no convergence after " + std::to_string(maxIter) + " iterations");
}

std::optional<std::pair<double, double>> expand_bracket(const std::function<double(double)>& f,
                                                        double a, double step, double growth,
                                                        double limit)
{
    const double fa = f(a);
    double lo = a;
    double b = a + step;
    while (step > 0.0 ? b <= limit : b >= limit) {
        const double fb = f(b);
        if ((fa > 0.0) != (fb > 0.0) || fb == 0.0)
            return std::make_pair(lo, b);
        lo = b;
        step *= growth;
        b = a + step;
    }
    return std::nullopt;
}

GaussLegendre::GaussLegendre(int n)
{
    if (n < 1)
        throw InvalidParameters("nodes", "Gauss-Legendre rule needs at least one node");
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess; the rule
    // is symmetric so only half the roots are computed.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        nodes[n / 2] = 0.0;
}

const GaussLegendre& gauss_legendre(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<GaussLegendre>(n);
    return *slot;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n <= 0)
        return {};
    if (n == 1)
        return {lo};
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

} // namespace levcav::numerics
