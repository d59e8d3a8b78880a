// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "scarfsim/experiments.hpp"
#include "scarfsim/io.hpp"
#include "support/oracles.hpp"

using namespace scarfsim;

namespace {

const EndowmentParams kFig1Spec{0.1, 0.1, 0.5, 0.0, 0.3};

struct Result {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. forward benchmark convergence, under 1 second
Result criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    IntegrationConfig cfg;
    cfg.gamma = 1.0;
    cfg.t1 = 1500.0;
    cfg.convergence_radius = 1e-7;
    const Trajectory traj =
        integrate(PriceVector::interior(0.3, 0.2, 0.5), from_params(kFig1Spec), cfg);
    const double wall = seconds_since(t0);
    const double dist = inf_norm(sub(traj.back().p, Vec3{1.0 / 3, 1.0 / 3, 1.0 / 3}));
    const bool ok = traj.termination == Termination::ConvergedToEquilibriumRay &&
                    dist < 1e-6 && wall < 1.0;
    return {ok, "final distance " + fmt(dist) + " at t=" + fmt(traj.back().t) + ", " +
                    fmt(wall, 3) + " s"};
}

// 2. backward benchmark: node (0,0,1), arrival in [-2.28, -2.08]
Result criterion2() {
    const Figure1Result r = reproduce_figure1();
    const Vec3 pe = r.backward.back().p;
    std::array<double, 3> sp{pe[0], pe[1], pe[2]};
    std::sort(sp.begin(), sp.end());
    const double te = r.backward_extrapolated_time;
    const bool ok = r.backward.termination == Termination::ReachedBoundary &&
                    r.backward.boundary_is_node && r.backward.node_vertex == 3 &&
                    sp[1] < 1e-3 && te >= -2.28 && te <= -2.08;
    return {ok, "node (0,0,1), two coordinates < 1e-3, extrapolated arrival t=" + fmt(te, 8)};
}

// 3. H = -0.05 and Hhat = 0.04 to 1e-12 with the published sign pattern
Result criterion3() {
    const Criteria c = criteria(kFig1Spec);
    const bool ok = std::abs(c.H - (-0.05)) <= 1e-12 && std::abs(c.Hhat - 0.04) <= 1e-12 &&
                    c.H < 0.0 && c.Hhat > 0.0;
    return {ok, "H=" + fmt(c.H, 17) + " Hhat=" + fmt(c.Hhat, 17)};
}

// 4. first-integral conservation over t in [0,100], 100 economies x gamma in
//    {0,1,2}, drift <= 1e-6, under 30 s
Result criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(424);
    double worst = 0.0;
    int runs = 0;
    for (int i = 0; i < 100; ++i) {
        const EndowmentMatrix A = from_params(sample_params(rng, Region::Any));
        const Vec3 p0 = sample_simplex_point(rng, 0.05);
        for (double gamma : {0.0, 1.0, 2.0}) {
            IntegrationConfig cfg;
            cfg.gamma = gamma;
            cfg.t1 = 100.0;
            cfg.convergence_radius = 1e-300;
            const Trajectory t =
                integrate(PriceVector::interior(p0[0], p0[1], p0[2]), A, cfg);
            if (t.termination == Termination::StepFailure)
                return {false, "step failure on economy " + std::to_string(i)};
            worst = std::max(worst, t.max_integral_drift);
            ++runs;
        }
    }
    const double wall = seconds_since(t0);
    return {worst <= 1e-6 && wall < 30.0, std::to_string(runs) + " runs, worst drift " +
                                              fmt(worst) + ", " + fmt(wall, 3) + " s"};
}

// 5. H > 0 implies convergence to the equilibrium ray with monotone phi.
//    The time budget is rate-adjusted per economy: the slow Jacobian
//    eigenvalue can be arbitrarily close to zero inside the region, so a
//    flat t=200 window cannot witness convergence for every draw; economies
//    converging within the plain window are reported separately.
Result criterion5() {
    SplitMix64 rng(425);
    constexpr double kRadius = 1e-6;
    int converged_plain = 0, total = 0;
    for (int i = 0; i < 100; ++i) {
        const EndowmentParams params = sample_params(rng, Region::GloballyStable);
        const EndowmentMatrix A = from_params(params);
        const auto ev = jacobian_eigenvalues(params);
        const double rate = -std::max(ev[0].real(), ev[1].real());
        if (!(rate > 0.0)) return {false, "nonpositive contraction rate in the H>0 region"};
        for (double gamma : {0.0, 1.0, 2.0}) {
            const Vec3 p0 = sample_simplex_point(rng, 0.05);
            const double d0 = ray_distance(p0, gamma);
            // the trajectory converges to the ray point c*(1,1,1) matching its
            // conserved integral, where the contraction rate is c^(gamma-1)
            // times the rate at (1,1,1), by degree-0 homogeneity of E
            const double c = (gamma == 2.0)
                                 ? std::cbrt(p0[0] * p0[1] * p0[2])
                                 : std::pow(first_integral(PriceVector::from_array(p0), gamma) / 3.0,
                                            1.0 / (2.0 - gamma));
            const double eff_rate = std::pow(c, gamma - 1.0) * rate;
            const double budget =
                std::max(200.0, 1.5 * (20.0 + std::log(d0 / kRadius) / eff_rate));
            IntegrationConfig cfg;
            cfg.gamma = gamma;
            cfg.t1 = budget;
            cfg.convergence_radius = kRadius;
            const Trajectory t =
                integrate(PriceVector::interior(p0[0], p0[1], p0[2]), A, cfg);
            ++total;
            if (t.termination != Termination::ConvergedToEquilibriumRay)
                return {false, "economy " + std::to_string(i) + " gamma " + fmt(gamma) +
                                   " ended " + to_string(t.termination) + " at t=" +
                                   fmt(t.back().t) + " (H=" + fmt(criteria(params).H) + ")"};
            if (!oracles::phi_non_increasing(t))
                return {false, "phi increased along economy " + std::to_string(i)};
            if (t.back().t <= 200.0) ++converged_plain;
        }
    }
    return {true, std::to_string(total) + "/300 converged with monotone phi (" +
                      std::to_string(converged_plain) + " within the plain t=200 window)"};
}

// 6. closed-form Jacobian eigenvalues match numeric eigensolving of the
//    finite-difference Jacobian of p_i^gamma E_i at p*, to 1e-6, for every
//    gamma — certifying gamma-independence
Result criterion6() {
    SplitMix64 rng(426);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const EndowmentParams params = sample_params(rng, Region::Any);
        const EndowmentMatrix A = from_params(params);
        const auto closed = jacobian_eigenvalues(params);
        for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
            const Mat3 Jfd = oracles::fd_jacobian(A, gamma, {1.0, 1.0, 1.0});
            const auto numeric = oracles::nonzero_eigenvalues(Jfd);
            for (int k = 0; k < 2; ++k)
                worst = std::max(worst, std::abs(closed[k] - numeric[k]));
        }
    }
    return {worst <= 1e-6, "100 economies x 4 gammas, worst eigenvalue gap " + fmt(worst)};
}

// 7. closed-form edge fixed points match bisection of E=0 on each edge to
//    1e-10; own-excess sign equals (Hhat > 0 or d_edge dominates)
Result criterion7() {
    SplitMix64 rng(427);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const EndowmentParams p = sample_params(rng, Region::Any);
        const Criteria c = criteria(p);
        const double ds[3] = {p.d1, p.d2, p.d3};
        for (int edge = 1; edge <= 3; ++edge) {
            const EdgeFixedPoint fp = edge_fixed_point(edge, p);
            const double w = oracles::bisect_edge_fixed_point(edge, p);
            worst = std::max(worst, std::abs(fp.point[edge % 3] - w));
            const int e = edge - 1;
            const bool pred = c.Hhat > 0.0 ||
                              (ds[e] - ds[(e + 1) % 3] - ds[(e + 2) % 3]) > 0.0;
            if ((fp.own_excess > 0.0) != pred)
                return {false, "sign mismatch at sample " + std::to_string(i) + " edge " +
                                   std::to_string(edge)};
        }
    }
    return {worst <= 1e-10, "3000 edge fixed points, worst point gap " + fmt(worst) +
                                ", all own-excess signs match the predicate"};
}

// 8. behavioral edge probes: Hhat < 0 economies have an attracting edge,
//    Hhat > 0 economies have none, and every verdict matches the own-excess
//    sign prediction
Result criterion8() {
    int probes = 0;
    SplitMix64 rng_neg(428);
    for (int i = 0; i < 50; ++i) {
        const EndowmentParams p = sample_params(rng_neg, Region::Unstable);
        bool any_attracting = false;
        for (int edge = 1; edge <= 3; ++edge) {
            const EdgeProbeResult r = edge_stability_probe(edge, p, 20000.0);
            ++probes;
            if (!r.matches_prediction)
                return {false, "verdict/prediction mismatch (Hhat<0 sample " +
                                   std::to_string(i) + " edge " + std::to_string(edge) +
                                   ": " + to_string(r.verdict) + ")"};
            any_attracting |= r.verdict == ProbeVerdict::Attracting;
        }
        if (!any_attracting)
            return {false, "no attracting edge for Hhat<0 sample " + std::to_string(i)};
    }
    SplitMix64 rng_pos(429);
    for (int i = 0; i < 50; ++i) {
        const EndowmentParams p = sample_params(
            rng_pos, [](const EndowmentParams& q) { return criteria(q).Hhat > 0.0; });
        for (int edge = 1; edge <= 3; ++edge) {
            const EdgeProbeResult r = edge_stability_probe(edge, p, 20000.0);
            ++probes;
            if (r.verdict != ProbeVerdict::Repelling || !r.matches_prediction)
                return {false, "expected repelling edge (Hhat>0 sample " + std::to_string(i) +
                                   " edge " + std::to_string(edge) + ": " +
                                   to_string(r.verdict) + ")"};
        }
    }
    return {true, std::to_string(probes) + " probes, verdicts match predictions in all cases"};
}

// 9. gamma = 0 escape demonstration for the benchmark parameters
Result criterion9() {
    const EscapeRecord rec = escape_demo(kFig1Spec);
    const bool ok = rec.traj.termination == Termination::PriceWentNegative &&
                    rec.traj.negative_index == rec.edge;
    return {ok, "edge " + std::to_string(rec.edge) + " (edge minimum " +
                    fmt(rec.edge_min_value) + "), price " +
                    std::to_string(rec.traj.negative_index) + " went negative at t=" +
                    fmt(rec.traj.back().t)};
}

// 10. conjecture sweep: 200 samples x 5 starts in the H<0, Hhat>0 region,
//     deterministic under the fixed seed (and across thread counts); every
//     trajectory classified; counterexamples surfaced rather than failing
Result criterion10() {
    SweepConfig cfg;
    cfg.sample_count = 200;
    cfg.starts_per_sample = 5;
    cfg.seed = 42;
    cfg.region = Region::Conjecture;
    cfg.t_max = 50000.0;
    cfg.jobs = 4;
    const SweepOutcome a = conjecture_sweep(cfg);
    SweepConfig serial = cfg;
    serial.jobs = 1;
    const SweepOutcome b = conjecture_sweep(serial);
    if (io::to_jsonl(a) != io::to_jsonl(b))
        return {false, "serialization differs between thread counts"};
    int classified = 0;
    for (const auto& rec : a.records) {
        if (!(rec.H < 0.0 && rec.Hhat > 0.0)) return {false, "record outside the region"};
        ++classified;
    }
    if (classified != 1000) return {false, "expected 1000 records"};
    std::ostringstream os;
    os << "deterministic; " << a.converged << "/1000 converged, " << a.time_exhausted
       << " inconclusive (time exhausted), " << a.cycle_suspected
       << " suspected cycles (counterexamples surfaced in the summary, not failed)";
    return {true, os.str()};
}

// 11. algebraic identity suite over 1e4 random instances, under 10 s
Result criterion11() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(430);
    for (int i = 0; i < 10000; ++i) {
        const EndowmentParams params = sample_params(rng, Region::Any);
        const EndowmentMatrix A = from_params(params);
        const Vec3 pv = {0.05 + 1.95 * rng.next_double(), 0.05 + 1.95 * rng.next_double(),
                         0.05 + 1.95 * rng.next_double()};
        const PriceVector p = PriceVector::from_array(pv);

        const Vec3 E = excess_demand(p, A);
        if (std::abs(dot(pv, E)) > 1e-12 * std::max(1.0, norm2(pv) * norm2(E)))
            return {false, "Walras law failed at instance " + std::to_string(i)};

        const double c = 0.1 + 9.9 * rng.next_double();
        const Vec3 Ec = excess_demand(PriceVector::from_array(scale(c, pv)), A);
        if (inf_norm(sub(E, Ec)) > 1e-12 * std::max(1.0, inf_norm(E)))
            return {false, "homogeneity failed at instance " + std::to_string(i)};

        const double lhs = weighted_excess_sum(p, A);
        const double rhs_ = excess_quadratic_form(p, A);
        const Mat3 C = c_matrix(params);
        const double via_c = dot(pv, C.mul(pv));
        const double scale_ = std::max(1.0, std::abs(lhs));
        if (std::abs(lhs - rhs_) > 1e-12 * scale_ || std::abs(lhs - via_c) > 1e-11 * scale_)
            return {false, "quadratic-form identity failed at instance " + std::to_string(i)};

        // Hhat via the determinant route: -S^2 + 4(sum of products) + (K-L)^2
        const Criteria cr = criteria(params);
        const double S = params.S();
        const double hhat2 = -S * S +
                             4.0 * (params.d1 * params.d2 + params.d2 * params.d3 +
                                    params.d3 * params.d1) +
                             (params.K - params.L) * (params.K - params.L);
        if (std::abs(cr.Hhat - hhat2) > 1e-12)
            return {false, "Hhat identity failed at instance " + std::to_string(i)};

        if (inf_norm(C.mul({1.0, 1.0, 1.0})) > 1e-12)
            return {false, "C u = 0 failed at instance " + std::to_string(i)};
        if (inf_norm(jacobian_at_equilibrium(A).mul({1.0, 1.0, 1.0})) > 1e-12)
            return {false, "J u = 0 failed at instance " + std::to_string(i)};

        // demand-share derivative sum rule at p*, by central differences
        const int j = static_cast<int>(rng.next_u64() % 3);
        const double h = 1e-5;
        Vec3 pp{1.0, 1.0, 1.0}, pm{1.0, 1.0, 1.0};
        pp[j] += h;
        pm[j] -= h;
        const DemandShares fp = demand_shares(PriceVector::from_array(pp), A);
        const DemandShares fm = demand_shares(PriceVector::from_array(pm), A);
        double sum = 0.0;
        for (int hh = 0; hh < 3; ++hh) sum += (fp[hh] - fm[hh]) / (2.0 * h);
        if (std::abs(sum) > 1e-10)
            return {false, "share-derivative sum rule failed at instance " + std::to_string(i)};
    }
    const double wall = seconds_since(t0);
    return {wall < 10.0, "10000 instances, " + fmt(wall, 3) + " s"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria_list = {
        {"benchmark forward convergence to (1/3,1/3,1/3)", criterion1},
        {"benchmark backward node arrival near t=-2.18", criterion2},
        {"criteria values H=-0.05, Hhat=0.04", criterion3},
        {"first-integral conservation, gamma in {0,1,2}", criterion4},
        {"H>0 global convergence with monotone phi", criterion5},
        {"Jacobian eigenvalues vs finite-difference oracle", criterion6},
        {"edge fixed points vs bisection oracle", criterion7},
        {"edge stability probes match own-excess signs", criterion8},
        {"gamma=0 boundary escape", criterion9},
        {"deterministic conjecture sweep", criterion10},
        {"algebraic identity suite", criterion11},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria_list.size(); ++i) {
        Result r;
        try {
            r = criteria_list[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        all = all && r.pass;
        std::printf("[%s] criterion %2zu: %s - %s\n", r.pass ? "PASS" : "FAIL", i + 1,
                    criteria_list[i].first.c_str(), r.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
