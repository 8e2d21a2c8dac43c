#pragma once

// Shared driver that turns an ODE right-hand side into a sampled, escape-aware
// trajectory run. Used by every model so the sampling rules stay identical.

#include <string>

#include "levcav/dynamics.h"
#include "levcav/ode.h"

namespace levcav::detail {

template <std::size_t N, class Rhs, class MakeSample, class Escaped>
RunSummary run_model(Rhs&& f, double t0, const ode::Vec<N>& y0, const IntegratorOptions& o,
                     MakeSample&& make, Escaped&& escaped, const SampleSink& sink)
{
    o.validate();
    RunSummary sum;
    sum.endTau = t0;

    auto emit = [&](double t, const ode::Vec<N>& y) {
        sum.last = make(t, y);
        ++sum.samples;
        return sink(sum.last);
    };
    if (!emit(t0, y0)) {
        sum.message = "stopped by sink";
        return sum;
    }

    ode::Options opts;
    opts.relTol = o.relTol;
    opts.absTol = o.absTol;
    opts.maxStep = o.maxStep;

    ode::GridCursor cursor(t0, o.outputStride);
    bool sinkStopped = false;
    bool didEscape = false;

    auto observe = [&](const ode::Segment<N>& seg) {
        if (!cursor.feed(seg, emit)) {
            sinkStopped = true;
            return false;
        }
        if (escaped(seg.t1, seg.y1)) {
            didEscape = true;
            if (o.stopOnEscape)
                return false;
        }
        return true;
    };

    const auto r = ode::integrate<N>(f, t0, y0, t0 + o.horizon, opts, observe);
    sum.endTau = r.t;
    sum.acceptedSteps = r.accepted;
    sum.rejectedSteps = r.rejected;

    switch (r.status) {
    case ode::Status::completed:
        sum.termination = didEscape ? Termination::escape : Termination::horizon;
        break;
    case ode::Status::stopped:
        if (sinkStopped) {
            sum.termination = didEscape ? Termination::escape : Termination::horizon;
            sum.message = "stopped by sink";
        } else {
            sum.termination = Termination::escape;
        }
        break;
    case ode::Status::stepUnderflow:
        sum.termination = Termination::integratorFailure;
        sum.message = "step size underflow at tau = " + std::to_string(r.t);
        break;
    case ode::Status::tooManySteps:
        sum.termination = Termination::integratorFailure;
        sum.message = "step limit reached at tau = " + std::to_string(r.t);
        break;
    case ode::Status::nonFinite:
        sum.termination = Termination::integratorFailure;
        sum.message = "non-finite derivative at tau = " + std::to_string(r.t);
        break;
    }
    return sum;
}

} // namespace levcav::detail
