#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "scarfsim/common.hpp"

namespace scarfsim::detail {

// Dormand-Prince 5(4) driver for 3-dimensional fields: FSAL, PI step control,
// 4th-order dense output, and event localization by bisection on the
// interpolant. Works for forward and backward time spans (signed steps).

using RhsFn = std::function<Vec3(double, const Vec3&)>;

// Events trigger when g goes strictly below zero; the step is truncated at the
// localized crossing and the driver stops.
struct Event {
    int id = 0;
    std::function<double(double, const Vec3&)> g;
};

enum class DriveStatus { ReachedEnd, EventTriggered, StepFailure, SampleCapReached };

struct DriveResult {
    DriveStatus status = DriveStatus::ReachedEnd;
    int event_id = -1;
    double t_end = 0.0;
    Vec3 y_end{};
    std::string message;
};

struct DriveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double event_time_tol = 1e-10;
    std::uint64_t max_steps = 100'000'000;
    std::uint64_t max_samples = 2'000'000;
};

class Dopri5 {
public:
    Dopri5(RhsFn f, DriveOptions opts) : f_(std::move(f)), opts_(opts) {}

    // on_sample is called at t0 and after every accepted (possibly
    // event-truncated) step; returning false requests a stop (treated as a
    // sample-cap stop by the caller). on_post_step may replace the state
    // (renormalization hook); it runs before the sample callback.
    DriveResult drive(double t0, double t1, Vec3 y0, const std::vector<Event>& events,
                      const std::function<void(double, Vec3&)>& on_post_step,
                      const std::function<bool(double, const Vec3&)>& on_sample);

    // Dense evaluation on the last accepted step (internal use in drive()).
private:
    struct DenseCoeffs {
        double t = 0.0, h = 0.0;
        Vec3 r1{}, r2{}, r3{}, r4{}, r5{};
        Vec3 eval(double theta) const {
            const double th1 = 1.0 - theta;
            Vec3 u;
            for (int i = 0; i < 3; ++i)
                u[i] = r1[i] +
                       theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
            return u;
        }
    };

    double error_norm(const Vec3& y0, const Vec3& y1, const Vec3& err) const;
    double initial_step(double t0, const Vec3& y0, const Vec3& f0, double dir,
                        double t_span) const;

    RhsFn f_;
    DriveOptions opts_;
};

inline double Dopri5::error_norm(const Vec3& y0, const Vec3& y1, const Vec3& err) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = err[i] / sc;
        s += e * e;
    }
    return std::sqrt(s / 3.0);
}

inline double Dopri5::initial_step(double t0, const Vec3& y0, const Vec3& f0, double dir,
                                   double t_span) const {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / 3.0);
    d1 = std::sqrt(d1 / 3.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_span);

    const Vec3 y1 = add(y0, scale(dir * h0, f0));
    const Vec3 f1 = f_(t0 + dir * h0, y1);
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y0[i]);
        const double df = (f1[i] - f0[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / 3.0) / h0;

    const double dm = std::max(d1, d2);
    const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, t_span, opts_.max_step});
}

inline DriveResult Dopri5::drive(double t0, double t1, Vec3 y0, const std::vector<Event>& events,
                                 const std::function<void(double, Vec3&)>& on_post_step,
                                 const std::function<bool(double, const Vec3&)>& on_sample) {
    // Dormand-Prince tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    static constexpr double d1c = -12715105075.0 / 11282082432.0;
    static constexpr double d3c = 87487479700.0 / 32700410799.0;
    static constexpr double d4c = -10690763975.0 / 1880347072.0;
    static constexpr double d5c = 701980252875.0 / 199316789632.0;
    static constexpr double d6c = -1453857185.0 / 822651844.0;
    static constexpr double d7c = 69997945.0 / 29380423.0;

    DriveResult res;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    Vec3 y = y0;

    if (!on_sample(t, y)) {
        res.status = DriveStatus::SampleCapReached;
        res.t_end = t;
        res.y_end = y;
        return res;
    }

    // events already violated at the start trigger immediately
    for (const auto& ev : events) {
        if (ev.g(t, y) < 0.0) {
            res.status = DriveStatus::EventTriggered;
            res.event_id = ev.id;
            res.t_end = t;
            res.y_end = y;
            return res;
        }
    }

    Vec3 k1 = f_(t, y);
    double h = initial_step(t, y, k1, dir, std::abs(t1 - t0));
    double facold = 1e-4;
    std::uint64_t nsteps = 0;
    std::uint64_t nsamples = 1;

    static constexpr double kSafe = 0.9, kBeta = 0.04, kExpo = 0.2 - kBeta * 0.75;
    static constexpr double kFacc1 = 5.0, kFacc2 = 0.1;  // h/fac clamps (shrink x5, grow x10)

    while ((t1 - t) * dir > 0.0) {
        if (++nsteps > opts_.max_steps) {
            res.status = DriveStatus::StepFailure;
            res.message = "step budget exhausted";
            break;
        }
        const double hmin =
            100.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
        if (h < hmin) {
            res.status = DriveStatus::StepFailure;
            res.message = "step size underflow at t = " + format_double(t);
            break;
        }
        h = std::min(h, opts_.max_step);
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;

        Vec3 k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y5{};
        double err;
        try {
            auto st = [&](double a1, double b2, double b3, double b4, double b5, double b6) {
                Vec3 s;
                for (int i = 0; i < 3; ++i)
                    s[i] = y[i] + hs * (a1 * k1[i] + b2 * k2[i] + b3 * k3[i] + b4 * k4[i] +
                                        b5 * k5[i] + b6 * k6[i]);
                return s;
            };
            k2 = f_(t + c2 * hs, [&] { Vec3 s; for (int i = 0; i < 3; ++i) s[i] = y[i] + hs * a21 * k1[i]; return s; }());
            k3 = f_(t + c3 * hs, [&] { Vec3 s; for (int i = 0; i < 3; ++i) s[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]); return s; }());
            k4 = f_(t + c4 * hs, [&] { Vec3 s; for (int i = 0; i < 3; ++i) s[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]); return s; }());
            k5 = f_(t + c5 * hs, st(a51, a52, a53, a54, 0.0, 0.0));
            k6 = f_(t + hs, st(a61, a62, a63, a64, a65, 0.0));
            for (int i = 0; i < 3; ++i)
                y5[i] = y[i] +
                        hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = f_(t + hs, y5);

            Vec3 errv;
            for (int i = 0; i < 3; ++i)
                errv[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * k7[i]);
            err = error_norm(y, y5, errv);
            if (!std::isfinite(err) ||
                !(std::isfinite(y5[0]) && std::isfinite(y5[1]) && std::isfinite(y5[2])))
                err = std::numeric_limits<double>::infinity();
        } catch (const ModelError&) {
            // a trial stage left the field's domain: reject the step
            err = std::numeric_limits<double>::infinity();
        }

        if (std::isinf(err)) {
            h *= 0.2;
            continue;
        }

        if (err > 1.0) {
            const double fac11 = std::pow(err, kExpo);
            h = h / std::min(kFacc1, fac11 / kSafe);
            continue;
        }

        // accepted: dense coefficients for this step
        DenseCoeffs dc;
        dc.t = t;
        dc.h = hs;
        for (int i = 0; i < 3; ++i) {
            const double ydiff = y5[i] - y[i];
            const double bspl = hs * k1[i] - ydiff;
            dc.r1[i] = y[i];
            dc.r2[i] = ydiff;
            dc.r3[i] = bspl;
            dc.r4[i] = ydiff - hs * k7[i] - bspl;
            dc.r5[i] = hs * (d1c * k1[i] + d3c * k3[i] + d4c * k4[i] + d5c * k5[i] +
                             d6c * k6[i] + d7c * k7[i]);
        }

        // event check over (t, t+hs]
        double theta_hit = 2.0;
        int hit_id = -1;
        for (const auto& ev : events) {
            if (ev.g(t + hs, y5) < 0.0) {
                double lo = 0.0, hi = 1.0;  // g(lo) >= 0 > g(hi)
                while ((hi - lo) * h > opts_.event_time_tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (ev.g(t + mid * hs, dc.eval(mid)) < 0.0)
                        hi = mid;
                    else
                        lo = mid;
                }
                if (hi < theta_hit) {
                    theta_hit = hi;
                    hit_id = ev.id;
                }
            }
        }
        if (hit_id >= 0) {
            const double te = t + theta_hit * hs;
            Vec3 ye = dc.eval(theta_hit);
            if (on_post_step) on_post_step(te, ye);
            on_sample(te, ye);
            res.status = DriveStatus::EventTriggered;
            res.event_id = hit_id;
            res.t_end = te;
            res.y_end = ye;
            return res;
        }

        t += hs;
        y = y5;
        if (on_post_step) on_post_step(t, y);
        k1 = (on_post_step) ? f_(t, y) : k7;  // FSAL unless the state was adjusted
        if (!on_sample(t, y) || ++nsamples >= opts_.max_samples) {
            res.status = DriveStatus::SampleCapReached;
            res.t_end = t;
            res.y_end = y;
            return res;
        }
        if (last) break;

        const double fac11 = std::pow(std::max(err, 1e-10), kExpo);
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::max(kFacc2, std::min(kFacc1, fac / kSafe));
        h = h / fac;
        facold = std::max(err, 1e-4);
    }

    res.t_end = t;
    res.y_end = y;
    return res;
}

}  // namespace scarfsim::detail
