#pragma once

// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.
//
// Header-only and generic over the state dimension so that every model can
// integrate a fixed-size std::array without allocation. The error estimate
// and step-size control follow Hairer, Norsett & Wanner, "Solving Ordinary
// Differential Equations I", sec. II.4; the dense output is the 4th-order
// continuous extension of the same tableau.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace levcav::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Options {
    double relTol = 1e-9;
    double absTol = 1e-11;
    double maxStep = std::numeric_limits<double>::infinity();
    double initialStep = 0.0; // 0 selects automatically
    std::size_t maxSteps = 200'000'000;
};

enum class Status {
    completed,     // reached tEnd
    stopped,       // observer asked to stop
    stepUnderflow, // step fell below 1e-12 of the integration span
    tooManySteps,
    nonFinite,     // the right-hand side produced NaN/Inf
};

/// One accepted step with its interpolant.
template <std::size_t N>
struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    Vec<N> y0{};
    Vec<N> y1{};
    Vec<N> r2{}, r3{}, r4{}, r5{};

    Vec<N> operator()(double t) const
    {
        const double h = t1 - t0;
        const double s = h != 0.0 ? (t - t0) / h : 0.0;
        const double s1 = 1.0 - s;
        Vec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = y0[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
        return y;
    }
};

template <std::size_t N>
struct Result {
    Status status = Status::completed;
    double t = 0.0;
    Vec<N> y{};
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

struct NoProjection {
    template <class V>
    bool operator()(double, V&) const { return false; }
};

namespace detail {

// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
bool all_finite(const Vec<N>& v)
{
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

template <std::size_t N>
double scaled_norm(const Vec<N>& v, const Vec<N>& y, const Options& o)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = o.absTol + o.relTol * std::abs(y[i]);
        sum += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(sum / static_cast<double>(N));
}

template <std::size_t N, class Rhs>
double initial_step(Rhs& f, double t, const Vec<N>& y, const Vec<N>& k1, double dir,
                    double span, const Options& o)
{
    const double d0 = scaled_norm(y, y, o);
    const double d1 = scaled_norm(k1, y, o);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min({h0, o.maxStep, span});
    Vec<N> y1, k2;
    for (std::size_t i = 0; i < N; ++i)
        y1[i] = y[i] + dir * h0 * k1[i];
    f(t + dir * h0, y1, k2);
    Vec<N> diff;
    for (std::size_t i = 0; i < N; ++i)
        diff[i] = k2[i] - k1[i];
    const double d2 = scaled_norm(diff, y, o) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, o.maxStep, span});
}

} // namespace detail

/// Integrates y' = f(t, y) from t0 to tEnd.
///
/// `f(t, y, dydt)` fills the derivative. After every accepted step
/// `project(t, y)` may modify the end state (returning true forces the
/// derivative to be recomputed), then `observe(segment)` receives the step's
/// interpolant and returns false to stop early.
template <std::size_t N, class Rhs, class Observer, class Projection = NoProjection>
Result<N> integrate(Rhs&& f, double t0, const Vec<N>& y0, double tEnd, const Options& o,
                    Observer&& observe, Projection&& project = {})
{
    using namespace detail;
    Result<N> res;
    res.t = t0;
    res.y = y0;
    if (tEnd == t0)
        return res;

    const double dir = tEnd > t0 ? 1.0 : -1.0;
    const double span = std::abs(tEnd - t0);
    const double hMin = 1e-12 * span;

    double t = t0;
    Vec<N> y = y0;
    Vec<N> k1, k2, k3, k4, k5, k6, k7, yt, ynew, err;
    f(t, y, k1);
    if (!all_finite(k1)) {
        res.status = Status::nonFinite;
        return res;
    }

    double h = o.initialStep > 0.0 ? std::min(o.initialStep, span)
                                   : initial_step<N>(f, t, y, k1, dir, span, o);
    bool lastRejected = false;

    for (std::size_t n = 0;; ++n) {
        if (n >= o.maxSteps) {
            res.status = Status::tooManySteps;
            break;
        }
        const double remaining = std::abs(tEnd - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        if (h < hMin && !last) {
            res.status = Status::stepUnderflow;
            break;
        }
        const double hs = dir * h;

        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * a21 * k1[i];
        f(t + c2 * hs, yt, k2);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * hs, yt, k3);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * hs, yt, k4);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * hs, yt, k5);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double tNew = last ? tEnd : t + hs;
        f(tNew, yt, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(tNew, ynew, k7);

        for (std::size_t i = 0; i < N; ++i)
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        double errNorm = 0.0;
        {
            double sum = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double sc = o.absTol + o.relTol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                sum += (err[i] / sc) * (err[i] / sc);
            }
            errNorm = std::sqrt(sum / static_cast<double>(N));
        }

        if (!std::isfinite(errNorm) || !all_finite(k7)) {
            // Treat as a failed step; shrink hard and retry.
            h *= 0.1;
            lastRejected = true;
            ++res.rejected;
            if (h < hMin) {
                res.status = Status::nonFinite;
                break;
            }
            continue;
        }

        const double factor = std::clamp(0.9 * std::pow(std::max(errNorm, 1e-10), -0.2), 0.2,
                                         lastRejected ? 1.0 : 10.0);
        if (errNorm > 1.0) {
            h *= std::max(0.2, factor);
            lastRejected = true;
            ++res.rejected;
            continue;
        }

        // Accepted.
        Segment<N> seg;
        seg.t0 = t;
        seg.t1 = tNew;
        seg.y0 = y;
        seg.y1 = ynew;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = ynew[i] - y[i];
            const double bspl = hs * k1[i] - dy;
            seg.r2[i] = dy;
            seg.r3[i] = bspl;
            seg.r4[i] = dy - hs * k7[i] - bspl;
            seg.r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        ++res.accepted;

        t = tNew;
        y = ynew;
        k1 = k7;
        if (project(t, y)) {
            seg.y1 = y;
            f(t, y, k1);
        }
        res.t = t;
        res.y = y;

        if (!observe(static_cast<const Segment<N>&>(seg))) {
            res.status = Status::stopped;
            return res;
        }
        if (last) {
            res.status = Status::completed;
            return res;
        }

        h = std::min(h * factor, o.maxStep);
        lastRejected = false;
    }
    return res;
}

/// Calls `sample(t, y)` for every point t0 + k*stride (k >= 1) that falls in
/// a segment. Keeps its own cursor so it can be fed segment after segment.
class GridCursor {
public:
    GridCursor(double t0, double stride) : t0_(t0), stride_(stride) {}

    template <std::size_t N, class Sample>
    bool feed(const Segment<N>& seg, Sample&& sample)
    {
        for (;;) {
            const double t = t0_ + static_cast<double>(next_) * stride_;
            // Grid points within a rounding error of the step end belong to it.
            if (t > seg.t1 + 1e-12 * std::max(1.0, std::abs(seg.t1)))
                return true;
            ++next_;
            if (!sample(t, seg(std::min(t, seg.t1))))
                return false;
        }
    }

    std::size_t emitted() const { return next_ - 1; }

private:
    double t0_;
    double stride_;
    std::size_t next_ = 1;
};

} // namespace levcav::ode
