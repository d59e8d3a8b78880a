#include "scarfsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "scarfsim/detail/dopri5.hpp"

namespace scarfsim {

const char* to_string(Region r) {
    switch (r) {
        case Region::Any: return "any";
        case Region::GloballyStable: return "stable";
        case Region::Conjecture: return "conjecture";
        case Region::Unstable: return "unstable";
    }
    return "?";
}

const char* to_string(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::Attracting: return "Attracting";
        case ProbeVerdict::Repelling: return "Repelling";
        case ProbeVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

bool region_accepts(Region region, const EndowmentParams& params) {
    const Criteria c = criteria(params);
    switch (region) {
        case Region::Any: return true;
        case Region::GloballyStable: return c.H > 0.0;
        case Region::Conjecture: return c.H < 0.0 && c.Hhat > 0.0;
        case Region::Unstable: return c.Hhat < 0.0;
    }
    return false;
}

EndowmentParams sample_params(SplitMix64& rng,
                              const std::function<bool(const EndowmentParams&)>& accept,
                              double min_d) {
    constexpr std::uint64_t kMaxAttempts = 1'000'000;
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        double e[4];
        double total = 0.0;
        for (double& x : e) {
            x = -std::log1p(-rng.next_double());
            total += x;
        }
        const double d1 = e[0] / total, d2 = e[1] / total, d3 = e[2] / total;
        const double m = e[3] / total;  // K + L
        const double dmin = std::min({d1, d2, d3});
        if (dmin < min_d) continue;
        // K - L uniform over the interval keeping all matrix entries >= 0
        const double span = m + 2.0 * dmin;
        const double dk = (2.0 * rng.next_double() - 1.0) * span;
        EndowmentParams p{d1, d2, d3, 0.5 * (m + dk), 0.5 * (m - dk)};
        if (!accept(p)) continue;
        return p;
    }
    throw SamplingExhausted("no accepted draw in 1e6 attempts for the requested region");
}

EndowmentParams sample_params(SplitMix64& rng, Region region, double min_d) {
    return sample_params(
        rng, [region](const EndowmentParams& p) { return region_accepts(region, p); }, min_d);
}

Vec3 sample_simplex_point(SplitMix64& rng, double margin) {
    for (;;) {
        double e[3];
        double total = 0.0;
        for (double& x : e) {
            x = -std::log1p(-rng.next_double());
            total += x;
        }
        const Vec3 p = {e[0] / total, e[1] / total, e[2] / total};
        if (min_elem(p) >= margin) return p;
    }
}

void SweepConfig::validate() const {
    if (sample_count <= 0) throw PreconditionViolation("sample_count must be positive");
    if (starts_per_sample <= 0) throw PreconditionViolation("starts_per_sample must be positive");
    if (!(t_max > 0.0)) throw PreconditionViolation("t_max must be positive");
    if (!(convergence_radius > 0.0))
        throw PreconditionViolation("convergence_radius must be positive");
    if (!(min_d > 0.0)) throw PreconditionViolation("min_d must be positive");
    if (!(start_margin >= 0.0 && start_margin < 1.0 / 3.0))
        throw PreconditionViolation("start_margin must be in [0, 1/3)");
    if (jobs < 1) throw PreconditionViolation("jobs must be at least 1");
}

namespace {

// Upgrade a time-exhausted gamma=1 trajectory to LimitCycleSuspected when the
// section analysis finds closed returns, or when phi stops decreasing for 50
// consecutive returns.
void apply_cycle_analysis(const Trajectory& traj, TrajectoryRecord& rec) {
    try {
        const CycleReport cr = detect_limit_cycle(traj);
        rec.returns_shrinking = cr.returns_shrinking;
        if (cr.detected) {
            rec.cycle_detected = true;
            rec.cycle_period = cr.period_estimate;
            rec.termination = Termination::LimitCycleSuspected;
            return;
        }
        int run = 0;
        double prev_phi = -std::numeric_limits<double>::infinity();
        for (const Vec3& p : cr.section_points) {
            const double phi = 1.0 / p[0] + 1.0 / p[1] + 1.0 / p[2];
            run = (phi >= prev_phi) ? run + 1 : 0;
            prev_phi = phi;
            if (run >= 50) {
                rec.termination = Termination::LimitCycleSuspected;
                return;
            }
        }
    } catch (const InsufficientCrossings&) {
        // too few returns to say anything; leave TimeExhausted
    }
}

std::string record_repro_info(const TrajectoryRecord& r, std::uint64_t seed) {
    std::ostringstream os;
    os << "sample=" << r.sample << " start=" << r.start << " seed=" << seed << " d=("
       << format_double(r.params.d1) << "," << format_double(r.params.d2) << ","
       << format_double(r.params.d3) << ") K=" << format_double(r.params.K)
       << " L=" << format_double(r.params.L) << " p0=(" << format_double(r.p0[0]) << ","
       << format_double(r.p0[1]) << "," << format_double(r.p0[2]) << ")"
       << " termination=" << to_string(r.termination);
    return os.str();
}

}  // namespace

SweepOutcome conjecture_sweep(const SweepConfig& cfg,
                              const std::function<void(int, int)>& progress) {
    cfg.validate();

    SweepOutcome out;
    out.cfg = cfg;
    const int total = cfg.sample_count * cfg.starts_per_sample;
    out.records.resize(total);

    std::atomic<int> next_sample{0};
    std::atomic<int> done{0};
    std::mutex mu;
    std::exception_ptr first_error;

    auto run_sample = [&](int i) {
        SplitMix64 prng = SplitMix64::derive(cfg.seed, i, 0);
        const EndowmentParams params = sample_params(prng, cfg.region, cfg.min_d);
        if (!region_accepts(cfg.region, params))
            throw std::logic_error("sampler returned params outside the requested region");
        const Criteria c = criteria(params);
        const EndowmentMatrix A = from_params(params);

        for (int j = 0; j < cfg.starts_per_sample; ++j) {
            SplitMix64 srng = SplitMix64::derive(cfg.seed, i, j + 1);
            const Vec3 p0 = sample_simplex_point(srng, cfg.start_margin);

            IntegrationConfig ic;
            ic.gamma = 1.0;
            ic.t0 = 0.0;
            ic.t1 = cfg.t_max;
            ic.convergence_radius = cfg.convergence_radius;

            const Trajectory traj =
                integrate(PriceVector::interior(p0[0], p0[1], p0[2]), A, ic);

            TrajectoryRecord rec;
            rec.sample = i;
            rec.start = j;
            rec.params = params;
            rec.H = c.H;
            rec.Hhat = c.Hhat;
            rec.local_class = classify_local(params);
            rec.p0 = p0;
            rec.termination = traj.termination;
            rec.t_end = traj.back().t;
            rec.final_ray_distance = ray_distance(traj.back().p, 1.0);
            rec.max_integral_drift = traj.max_integral_drift;
            if (traj.termination == Termination::ConvergedToEquilibriumRay)
                rec.converge_time = traj.back().t;
            if (traj.termination == Termination::TimeExhausted) apply_cycle_analysis(traj, rec);

            if (cfg.region == Region::GloballyStable &&
                (rec.termination == Termination::PriceWentNegative ||
                 rec.termination == Termination::ReachedBoundary ||
                 rec.termination == Termination::LimitCycleSuspected ||
                 rec.termination == Termination::StepFailure)) {
                throw std::logic_error("non-convergent trajectory in the H>0 region: " +
                                       record_repro_info(rec, cfg.seed));
            }
            out.records[i * cfg.starts_per_sample + j] = rec;
        }
        const int d = ++done;
        if (progress) {
            std::lock_guard<std::mutex> lk(mu);
            progress(d, cfg.sample_count);
        }
    };

    auto worker = [&] {
        for (;;) {
            const int i = next_sample.fetch_add(1);
            if (i >= cfg.sample_count) return;
            try {
                run_sample(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int jobs = std::min(cfg.jobs, cfg.sample_count);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (const auto& rec : out.records) {
        switch (rec.termination) {
            case Termination::ConvergedToEquilibriumRay: ++out.converged; break;
            case Termination::TimeExhausted: ++out.time_exhausted; break;
            case Termination::LimitCycleSuspected: ++out.cycle_suspected; break;
            default: ++out.other; break;
        }
    }
    return out;
}

Figure1Result reproduce_figure1() {
    Figure1Result r;
    r.params = kFigure1Params;
    r.p0 = kFigure1Start;
    const Criteria c = criteria(r.params);
    r.H = c.H;
    r.Hhat = c.Hhat;
    const EndowmentMatrix A = from_params(r.params);
    const PriceVector p0 = PriceVector::interior(r.p0[0], r.p0[1], r.p0[2]);

    IntegrationConfig fwd;
    fwd.gamma = 1.0;
    fwd.t0 = 0.0;
    fwd.t1 = 1500.0;
    fwd.convergence_radius = 1e-7;
    r.forward = integrate(p0, A, fwd);
    r.forward_final = r.forward.back().p;
    const Vec3 bary = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    r.forward_final_distance = inf_norm(sub(r.forward_final, bary));

    IntegrationConfig bwd;
    bwd.gamma = 1.0;
    bwd.t0 = 0.0;
    bwd.t1 = -5.0;
    bwd.convergence_radius = 1e-7;
    bwd.boundary_floor = 1e-3;
    bwd.boundary_trigger_count = 2;
    r.backward = integrate(p0, A, bwd);
    r.backward_extrapolated_time = r.backward.extrapolated_boundary_time;

    std::ostringstream det;
    bool ok = true;
    if (r.forward.termination != Termination::ConvergedToEquilibriumRay ||
        r.forward_final_distance >= 1e-6) {
        ok = false;
        det << "forward run did not converge to the barycenter (distance "
            << format_double(r.forward_final_distance) << "); ";
    }
    const Vec3 pe = r.backward.back().p;
    std::array<double, 3> sorted_pe = {pe[0], pe[1], pe[2]};
    std::sort(sorted_pe.begin(), sorted_pe.end());
    const bool node_ok = r.backward.termination == Termination::ReachedBoundary &&
                         r.backward.boundary_is_node && r.backward.node_vertex == 3 &&
                         sorted_pe[1] < 1e-3;
    if (!node_ok) {
        ok = false;
        det << "backward run did not reach node (0,0,1); ";
    }
    if (!(r.backward_extrapolated_time >= -2.28 && r.backward_extrapolated_time <= -2.08)) {
        ok = false;
        det << "backward arrival " << format_double(r.backward_extrapolated_time)
            << " outside [-2.28, -2.08]; ";
    }
    r.pass = ok;
    r.detail = ok ? "forward converged; backward reached node (0,0,1) at t ~ " +
                        format_double(r.backward_extrapolated_time)
                  : det.str();
    return r;
}

EscapeRecord escape_demo(const EndowmentParams& params) {
    params.validate();
    const EndowmentMatrix A = from_params(params);

    int worst_edge = 0;
    EdgeMinExcess worst{};
    for (int edge = 1; edge <= 3; ++edge) {
        const EdgeMinExcess m = edge_min_excess(edge, A);
        if (m.min_value < 0.0 && (worst_edge == 0 || m.min_value < worst.min_value)) {
            worst_edge = edge;
            worst = m;
        }
    }
    if (worst_edge == 0)
        throw NotApplicable("excess demand is positive on every edge; no escape exists");

    // Start just inside the minimizer of the edge's own excess demand: there
    // dp_e/dt = E_e < 0 pushes the price through zero.
    const int e = worst_edge - 1, j = (e + 1) % 3, k = (e + 2) % 3;
    const double s = worst.argmin_ratio;  // p_k / p_j
    constexpr double kEps = 1e-4;
    Vec3 start{};
    start[e] = kEps;
    start[j] = (1.0 - kEps) / (1.0 + s);
    start[k] = (1.0 - kEps) * s / (1.0 + s);

    IntegrationConfig ic;
    ic.gamma = 0.0;
    ic.t0 = 0.0;
    ic.t1 = 10.0;
    ic.boundary_floor = 0.0;  // let the price cross zero
    ic.convergence_radius = 1e-300;

    EscapeRecord rec;
    rec.edge = worst_edge;
    rec.edge_min_value = worst.min_value;
    rec.start = start;
    rec.traj = integrate(PriceVector::interior(start[0], start[1], start[2]), A, ic);
    return rec;
}

EdgeProbeResult edge_stability_probe(int edge, const EndowmentParams& params, double t_max) {
    EdgeProbeResult res;
    res.fixed_point = edge_fixed_point(edge, params);
    const EndowmentMatrix A = from_params(params);
    const Vec3 fp = res.fixed_point.point.as_array();

    // interior start at distance 1e-3 from the fixed point, toward the barycenter
    constexpr double kOffset = 1e-3;
    const Vec3 bary = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    Vec3 dirv = sub(bary, fp);
    dirv = scale(1.0 / norm2(dirv), dirv);
    const Vec3 start = add(fp, scale(kOffset, dirv));

    constexpr double kNear = 1e-5;
    constexpr double kFar = 1e-2;
    constexpr int kNearId = 1, kFarId = 2;

    detail::DriveOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-14;
    detail::Dopri5 stepper(
        [&A](double, const Vec3& y) { return rhs(PriceVector::from_array(y), 1.0, A); }, opts);

    std::vector<detail::Event> events;
    events.push_back({kNearId, [&fp](double, const Vec3& y) { return norm2(sub(y, fp)) - kNear; }});
    events.push_back({kFarId, [&fp](double, const Vec3& y) { return kFar - norm2(sub(y, fp)); }});

    const auto dr = stepper.drive(0.0, t_max, start, events, nullptr,
                                  [](double, const Vec3&) { return true; });
    res.time_to_verdict = dr.t_end;
    if (dr.status == detail::DriveStatus::EventTriggered)
        res.verdict = (dr.event_id == kNearId) ? ProbeVerdict::Attracting : ProbeVerdict::Repelling;
    const bool predicted_attracting = res.fixed_point.own_excess < 0.0;
    res.matches_prediction =
        (res.verdict == ProbeVerdict::Attracting && predicted_attracting) ||
        (res.verdict == ProbeVerdict::Repelling && !predicted_attracting);
    return res;
}

UniquenessReport uniqueness_scan(const EndowmentParams& params, int grid_n) {
    if (grid_n < 10) throw PreconditionViolation("grid_n must be at least 10");
    params.validate();
    const EndowmentMatrix A = from_params(params);
    constexpr double kMargin = 1e-3;
    constexpr double kZeroNorm = 1e-8;

    const auto norm_at = [&](const Vec3& p) {
        return norm2(excess_demand(PriceVector::raw(p[0], p[1], p[2]), A));
    };

    const int n = grid_n;
    std::vector<double> norms(static_cast<std::size_t>(n + 1) * (n + 1),
                              std::numeric_limits<double>::quiet_NaN());
    const auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + j; };
    const auto in_grid = [&](int i, int j) {
        if (i < 0 || j < 0 || i + j > n) return false;
        const double p1 = double(i) / n, p2 = double(j) / n, p3 = double(n - i - j) / n;
        return p1 >= kMargin && p2 >= kMargin && p3 >= kMargin;
    };

    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j)
            if (in_grid(i, j))
                norms[idx(i, j)] = norm_at({double(i) / n, double(j) / n, double(n - i - j) / n});

    UniquenessReport rep;
    rep.grid_n = n;
    const Vec3 bary = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    rep.min_norm_outside = std::numeric_limits<double>::infinity();

    static constexpr int kNbr[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};

    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            if (!in_grid(i, j)) continue;
            const double v = norms[idx(i, j)];
            const Vec3 p = {double(i) / n, double(j) / n, double(n - i - j) / n};
            if (inf_norm(sub(p, bary)) > 1e-2)
                rep.min_norm_outside = std::min(rep.min_norm_outside, v);

            bool is_min = true;
            for (const auto& d : kNbr) {
                if (in_grid(i + d[0], j + d[1]) && norms[idx(i + d[0], j + d[1])] < v) {
                    is_min = false;
                    break;
                }
            }
            if (!is_min) continue;

            // refine by damped Newton on (E1, E2) in (p1, p2)
            Vec3 x = p;
            for (int it = 0; it < 60; ++it) {
                const Vec3 E = excess_demand(PriceVector::raw(x[0], x[1], x[2]), A);
                if (std::hypot(E[0], E[1], E[2]) < 1e-13) break;
                constexpr double h = 1e-7;
                double Jm[2][2];
                for (int col = 0; col < 2; ++col) {
                    Vec3 xp = x, xm = x;
                    xp[col] += h;
                    xp[2] -= h;
                    xm[col] -= h;
                    xm[2] += h;
                    const Vec3 Ep = excess_demand(PriceVector::raw(xp[0], xp[1], xp[2]), A);
                    const Vec3 Em = excess_demand(PriceVector::raw(xm[0], xm[1], xm[2]), A);
                    Jm[0][col] = (Ep[0] - Em[0]) / (2.0 * h);
                    Jm[1][col] = (Ep[1] - Em[1]) / (2.0 * h);
                }
                const double det = Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0];
                if (std::abs(det) < 1e-14) break;
                const double dx0 = (E[0] * Jm[1][1] - E[1] * Jm[0][1]) / det;
                const double dx1 = (Jm[0][0] * E[1] - Jm[1][0] * E[0]) / det;
                Vec3 xn = {x[0] - dx0, x[1] - dx1, 0.0};
                xn[2] = 1.0 - xn[0] - xn[1];
                if (min_elem(xn) < kMargin / 2.0) break;
                x = xn;
            }
            const double rn = norm_at(x);
            if (rn < kZeroNorm) {
                bool dup = false;
                for (const Vec3& z : rep.zeros)
                    if (inf_norm(sub(z, x)) < 1e-6) dup = true;
                if (!dup) {
                    rep.zeros.push_back(x);
                    rep.zero_norms.push_back(rn);
                }
            }
        }
    }
    return rep;
}

}  // namespace scarfsim
