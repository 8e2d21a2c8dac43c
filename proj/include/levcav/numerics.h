#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace levcav::numerics {

struct RootResult {
    double root = 0.0;
    int iterations = 0;
};

/// Brent's method on a sign-changing bracket [a, b]. Stops when the bracket
/// is narrower than relTol*|x| + absTol. Throws ConvergenceError when the
/// bracket has no sign change or the iteration limit is hit.
RootResult brent(const std::function<double(double)>& f, double a, double b,
                 double relTol = 1e-12, double absTol = 1e-14, int maxIter = 200);

/// Expands b = a + step, a + step*growth, ... until f changes sign between a
/// and b. Returns the bracket, or nullopt if `limit` is passed first.
std::optional<std::pair<double, double>> expand_bracket(const std::function<double(double)>& f,
                                                        double a, double step, double growth,
                                                        double limit);

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);
    int size() const { return static_cast<int>(nodes.size()); }

    /// Integral of f over [a, b].
    template <class F>
    double integrate(F&& f, double a, double b) const
    {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

/// Shared, lazily built rules (thread-safe).
const GaussLegendre& gauss_legendre(int n);

/// n points from lo to hi inclusive (n >= 2), or {lo} when n == 1.
std::vector<double> linspace(double lo, double hi, int n);

} // namespace levcav::numerics
