#include "scarfsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "scarfsim/detail/dopri5.hpp"

namespace scarfsim {

namespace {

constexpr int kEventConverged = 1;
constexpr int kEventBoundary = 2;
constexpr int kEventNegative = 3;

double pow_gamma(double p, double gamma) {
    if (gamma == 0.0) return 1.0;  // 0^0 = 1: the classical process everywhere
    if (gamma == 1.0) return p;
    if (gamma == 2.0) return p * p;
    return p > 0.0 ? std::pow(p, gamma) : 0.0;
}

double phi_value(const Vec3& p, double gamma) {
    if (gamma == 0.0) return -p[0] * p[1] * p[2];
    if (!(p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0))
        return std::numeric_limits<double>::infinity();
    return std::pow(p[0], -gamma) + std::pow(p[1], -gamma) + std::pow(p[2], -gamma);
}

double g_value(const Vec3& p, double gamma) {
    if (gamma == 2.0) return p[0] * p[1] * p[2];
    const double e = 2.0 - gamma;
    auto pw = [&](double x) { return x >= 0.0 ? std::pow(x, e) : std::pow(std::abs(x), e); };
    // |x|^e keeps the monitor finite during the brief negative excursion a
    // gamma=0 trajectory makes before the negativity event localizes it
    return pw(p[0]) + pw(p[1]) + pw(p[2]);
}

}  // namespace

void IntegrationConfig::validate() const {
    if (!(gamma >= 0.0)) throw PreconditionViolation("gamma must be nonnegative");
    if (!(rel_tol > 0.0 && abs_tol > 0.0))
        throw PreconditionViolation("integration tolerances must be positive");
    if (!(boundary_floor >= 0.0)) throw PreconditionViolation("boundary_floor must be >= 0");
    if (boundary_trigger_count < 1 || boundary_trigger_count > 3)
        throw PreconditionViolation("boundary_trigger_count must be 1, 2 or 3");
    if (!(convergence_radius > 0.0))
        throw PreconditionViolation("convergence_radius must be positive");
    if (!(max_step > 0.0)) throw PreconditionViolation("max_step must be positive");
    if (t1 == t0) throw PreconditionViolation("empty integration span");
    if (max_samples < 2) throw PreconditionViolation("max_samples must be at least 2");
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ConvergedToEquilibriumRay: return "ConvergedToEquilibriumRay";
        case Termination::ReachedBoundary: return "ReachedBoundary";
        case Termination::PriceWentNegative: return "PriceWentNegative";
        case Termination::TimeExhausted: return "TimeExhausted";
        case Termination::LimitCycleSuspected: return "LimitCycleSuspected";
        case Termination::StepFailure: return "StepFailure";
    }
    return "?";
}

Vec3 rhs(const PriceVector& p, double gamma, const EndowmentMatrix& A) {
    if (!(gamma >= 0.0)) throw PreconditionViolation("gamma must be nonnegative");
    const Vec3 E = excess_demand(p, A);
    return {pow_gamma(p.p1, gamma) * E[0], pow_gamma(p.p2, gamma) * E[1],
            pow_gamma(p.p3, gamma) * E[2]};
}

double ray_distance(const Vec3& p, double gamma) {
    double c;
    if (gamma == 2.0) {
        const double prod = p[0] * p[1] * p[2];
        if (!(prod > 0.0)) return std::numeric_limits<double>::infinity();
        c = std::cbrt(prod);
    } else {
        const double g = g_value(p, gamma);
        if (!(g > 0.0) || !std::isfinite(g)) return std::numeric_limits<double>::infinity();
        c = std::pow(g / 3.0, 1.0 / (2.0 - gamma));
    }
    return std::max({std::abs(p[0] - c), std::abs(p[1] - c), std::abs(p[2] - c)});
}

Trajectory integrate(const PriceVector& p0, const EndowmentMatrix& A,
                     const IntegrationConfig& cfg) {
    cfg.validate();
    const Vec3 y0 = p0.as_array();
    const int zeros = (y0[0] == 0.0) + (y0[1] == 0.0) + (y0[2] == 0.0);
    if (zeros > 1 || min_elem(y0) < 0.0)
        throw PreconditionViolation("initial prices must be interior or have exactly one zero");
    if (zeros == 1 && cfg.gamma < 1.0)
        throw PreconditionViolation("boundary starts require gamma >= 1");

    const double gamma = cfg.gamma;
    const double g0 = g_value(y0, gamma);

    Trajectory traj;
    traj.samples.reserve(1024);

    detail::DriveOptions opts;
    opts.rel_tol = cfg.rel_tol;
    opts.abs_tol = cfg.abs_tol;
    opts.max_step = cfg.max_step;
    opts.max_samples = cfg.max_samples;

    detail::Dopri5 stepper([&A, gamma](double, const Vec3& y) {
        return rhs(PriceVector::from_array(y), gamma, A);
    }, opts);

    // Boundary event watches only coordinates that start above the floor, so
    // legitimate boundary starts (an exact zero coordinate) can run on their
    // edge. It fires when the k-th smallest watched coordinate crosses the
    // floor.
    std::array<bool, 3> watched{};
    int watched_n = 0;
    for (int i = 0; i < 3; ++i) {
        watched[i] = y0[i] > cfg.boundary_floor;
        watched_n += watched[i];
    }
    const int kth = std::min(cfg.boundary_trigger_count, watched_n);

    std::vector<detail::Event> events;
    events.push_back({kEventConverged, [gamma, r = cfg.convergence_radius](double, const Vec3& y) {
                          return ray_distance(y, gamma) - r;
                      }});
    if (cfg.boundary_floor > 0.0 && watched_n > 0) {
        events.push_back({kEventBoundary, [watched, kth, floor = cfg.boundary_floor](
                                              double, const Vec3& y) {
                              std::array<double, 3> v{};
                              int n = 0;
                              for (int i = 0; i < 3; ++i)
                                  if (watched[i]) v[n++] = y[i];
                              std::sort(v.begin(), v.begin() + n);
                              return v[kth - 1] - floor;
                          }});
    }
    events.push_back({kEventNegative, [](double, const Vec3& y) { return min_elem(y); }});

    std::function<void(double, Vec3&)> post_step;
    if (cfg.renormalize_invariant) {
        post_step = [gamma, g0](double, Vec3& y) {
            const double g = g_value(y, gamma);
            if (!(g > 0.0) || !std::isfinite(g)) return;
            const double f = (gamma == 2.0) ? std::cbrt(g0 / g)
                                            : std::pow(g0 / g, 1.0 / (2.0 - gamma));
            y = scale(f, y);
        };
    }

    auto on_sample = [&](double t, const Vec3& y) {
        Sample s;
        s.t = t;
        s.p = y;
        s.E = excess_demand(PriceVector::from_array(y), A);
        s.g = g_value(y, gamma);
        s.phi = phi_value(y, gamma);
        const double drift = std::abs(s.g - g0) / std::max(std::abs(g0), 1e-300);
        traj.max_integral_drift = std::max(traj.max_integral_drift, drift);
        traj.samples.push_back(s);
        return traj.samples.size() < cfg.max_samples;
    };

    const auto res = stepper.drive(cfg.t0, cfg.t1, y0, events, post_step, on_sample);

    switch (res.status) {
        case detail::DriveStatus::ReachedEnd:
            traj.termination = Termination::TimeExhausted;
            break;
        case detail::DriveStatus::SampleCapReached:
            traj.termination = Termination::TimeExhausted;
            traj.message = "sample cap reached at t = " + format_double(res.t_end);
            break;
        case detail::DriveStatus::StepFailure:
            traj.termination = Termination::StepFailure;
            traj.message = res.message;
            break;
        case detail::DriveStatus::EventTriggered: {
            if (res.event_id == kEventConverged) {
                traj.termination = Termination::ConvergedToEquilibriumRay;
            } else if (res.event_id == kEventNegative) {
                traj.termination = Termination::PriceWentNegative;
                traj.negative_index = argmin(res.y_end) + 1;
            } else {
                traj.termination = Termination::ReachedBoundary;
                const Vec3& ye = res.y_end;
                // A node approach has a second coordinate collapsing along
                // with the one that hit the floor; "collapsing" is judged on
                // the geometric scale between the floor and the surviving
                // coordinate.
                const double pmax = *std::max_element(ye.begin(), ye.end());
                const double lim = cfg.boundary_floor * (1.0 + 1e-9);
                const double node_lim =
                    std::max(lim, std::sqrt(cfg.boundary_floor * pmax));
                int below_n = 0;
                double min_watched = std::numeric_limits<double>::infinity();
                int min_watched_i = -1;
                for (int i = 0; i < 3; ++i) {
                    below_n += ye[i] <= node_lim;
                    if (watched[i] && ye[i] < min_watched) {
                        min_watched = ye[i];
                        min_watched_i = i;
                    }
                }
                traj.boundary_index = min_watched_i + 1;
                traj.boundary_is_node = below_n >= 2;
                if (traj.boundary_is_node) traj.node_vertex = argmax(ye) + 1;
                std::array<bool, 3> below{};
                for (int i = 0; i < 3; ++i)
                    below[i] = ye[i] <= (traj.boundary_is_node ? node_lim : lim);

                // Arrival-time estimate: extrapolate sigma = sum of the
                // below-floor coordinates to zero with its exact derivative,
                // refined quadratically against the previous sample.
                auto sigma_of = [&](const Vec3& y) {
                    double s = 0.0;
                    for (int i = 0; i < 3; ++i)
                        if (below[i]) s += y[i];
                    return s;
                };
                auto sigma_dot = [&](const Vec3& y) {
                    const Vec3 f = rhs(PriceVector::from_array(y), gamma, A);
                    double s = 0.0;
                    for (int i = 0; i < 3; ++i)
                        if (below[i]) s += f[i];
                    return s;
                };
                const double sig = sigma_of(ye);
                const double sd = sigma_dot(ye);
                if (std::abs(sd) > 1e-300) {
                    double delta = -sig / sd;
                    if (traj.samples.size() >= 2) {
                        const Sample& prev = traj.samples[traj.samples.size() - 2];
                        const double dt = res.t_end - prev.t;
                        if (std::abs(dt) > 1e-300) {
                            const double sdd = (sd - sigma_dot(prev.p)) / dt;
                            const double disc = sd * sd - 2.0 * sdd * sig;
                            if (std::abs(sdd) > 1e-300 && disc > 0.0) {
                                const double r1 = (-sd + std::sqrt(disc)) / sdd;
                                const double r2 = (-sd - std::sqrt(disc)) / sdd;
                                delta = (std::abs(r1 - delta) < std::abs(r2 - delta)) ? r1 : r2;
                            }
                        }
                    }
                    traj.extrapolated_boundary_time = res.t_end + delta;
                }
            }
            break;
        }
    }
    return traj;
}

CycleReport detect_limit_cycle(const Trajectory& traj) {
    // Plane coordinates orthogonal to (1,1,1), centered at the barycenter.
    static const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
    auto plane = [&](const Vec3& p) {
        const double q0 = p[0] - 1.0 / 3.0, q1 = p[1] - 1.0 / 3.0, q2 = p[2] - 1.0 / 3.0;
        return std::array<double, 2>{(q0 - q1) / s2, (q0 + q1 - 2.0 * q2) / s6};
    };

    constexpr double kSectionTol = 1e-4;   // closure tolerance on the return radius
    constexpr double kFarFromCenter = 1e-2;
    constexpr double kMinRadius = 1e-3;    // ignore crossings hugging the barycenter

    struct Crossing {
        double t, r;
        Vec3 p;
    };
    std::vector<Crossing> crossings;
    int orientation = 0;  // +1: y goes negative->positive at the section

    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const auto [x0, y0] = plane(traj.samples[k].p);
        const auto [x1, y1] = plane(traj.samples[k + 1].p);
        if (y0 == 0.0 && y1 == 0.0) continue;
        const bool up = y0 < 0.0 && y1 >= 0.0;
        const bool down = y0 > 0.0 && y1 <= 0.0;
        if (!up && !down) continue;
        const double w = y0 / (y0 - y1);
        const double xc = x0 + w * (x1 - x0);
        if (xc <= kMinRadius) continue;  // crossing on the wrong side or too central
        const int o = up ? 1 : -1;
        if (orientation == 0) orientation = o;
        if (o != orientation) continue;
        Crossing c;
        c.t = traj.samples[k].t + w * (traj.samples[k + 1].t - traj.samples[k].t);
        c.r = xc;
        c.p = add(traj.samples[k].p, scale(w, sub(traj.samples[k + 1].p, traj.samples[k].p)));
        crossings.push_back(c);
    }

    if (crossings.size() < 3)
        throw InsufficientCrossings("only " + std::to_string(crossings.size()) +
                                    " section crossings; need at least 3");

    CycleReport rep;
    rep.crossing_count = static_cast<int>(crossings.size());
    for (const auto& c : crossings) rep.section_points.push_back(c.p);

    rep.returns_shrinking = true;
    for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
        const double dr = std::abs(crossings[k + 1].r - crossings[k].r);
        rep.closure_residual = std::min(rep.closure_residual, dr);
        if (crossings[k + 1].r >= crossings[k].r * (1.0 + 1e-9)) rep.returns_shrinking = false;
        if (!rep.detected && dr <= kSectionTol &&
            std::min(crossings[k].r, crossings[k + 1].r) >= kFarFromCenter) {
            rep.detected = true;
            rep.period_estimate = std::abs(crossings[k + 1].t - crossings[k].t);
            rep.closure_residual = dr;
        }
    }
    return rep;
}

}  // namespace scarfsim
