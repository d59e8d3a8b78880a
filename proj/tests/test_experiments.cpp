#include <doctest.h>

#include "scarfsim/experiments.hpp"
#include "scarfsim/io.hpp"

using namespace scarfsim;

namespace {
const EndowmentParams kFig1Spec{0.1, 0.1, 0.5, 0.0, 0.3};
const EndowmentParams kSymmetric{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0, 0.0};
}  // namespace

TEST_CASE("parameter sampler") {
    SUBCASE("deterministic given the seed") {
        SplitMix64 a(99), b(99);
        for (int i = 0; i < 50; ++i) {
            const EndowmentParams pa = sample_params(a, Region::Conjecture);
            const EndowmentParams pb = sample_params(b, Region::Conjecture);
            CHECK(pa.d1 == pb.d1);
            CHECK(pa.K == pb.K);
        }
    }
    SUBCASE("respects the constraint set and the region filters") {
        for (Region r : {Region::Any, Region::GloballyStable, Region::Conjecture,
                         Region::Unstable}) {
            SplitMix64 rng(7);
            for (int i = 0; i < 200; ++i) {
                const EndowmentParams p = sample_params(rng, r);
                CHECK(p.d1 >= 1e-3);
                CHECK(p.d2 >= 1e-3);
                CHECK(p.d3 >= 1e-3);
                CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
                CHECK(from_params(p).nonnegative());
                CHECK(region_accepts(r, p));
            }
        }
    }
    SUBCASE("impossible regions exhaust") {
        SplitMix64 rng(1);
        CHECK_THROWS_AS(
            sample_params(rng, [](const EndowmentParams&) { return false; }),
            SamplingExhausted);
    }
    SUBCASE("simplex starts stay interior") {
        SplitMix64 rng(2);
        for (int i = 0; i < 200; ++i) {
            const Vec3 p = sample_simplex_point(rng, 0.05);
            CHECK(min_elem(p) >= 0.05);
            CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("conjecture sweep") {
    SweepConfig cfg;
    cfg.sample_count = 6;
    cfg.starts_per_sample = 2;
    cfg.seed = 42;
    cfg.t_max = 2000.0;

    SUBCASE("deterministic serialization, independent of parallelism") {
        const SweepOutcome a = conjecture_sweep(cfg);
        SweepConfig cfg_par = cfg;
        cfg_par.jobs = 3;
        const SweepOutcome b = conjecture_sweep(cfg_par);
        CHECK(io::to_jsonl(a) == io::to_jsonl(b));
        CHECK(a.records.size() == 12);
    }
    SUBCASE("records satisfy the region predicate and count terminations") {
        const SweepOutcome out = conjecture_sweep(cfg);
        int counted = 0;
        for (const auto& rec : out.records) {
            CHECK(rec.H < 0.0);
            CHECK(rec.Hhat > 0.0);
            CHECK(rec.max_integral_drift <= 1e-6);
            ++counted;
        }
        CHECK(counted == out.converged + out.time_exhausted + out.cycle_suspected + out.other);
        CHECK(out.cycle_suspected == 0);
        CHECK(out.other == 0);
    }
    SUBCASE("globally stable region never demonstrates non-convergence") {
        SweepConfig st = cfg;
        st.region = Region::GloballyStable;
        st.sample_count = 5;
        const SweepOutcome out = conjecture_sweep(st);
        CHECK(out.other == 0);
        CHECK(out.cycle_suspected == 0);
        for (const auto& rec : out.records)
            CHECK((rec.termination == Termination::ConvergedToEquilibriumRay ||
                   rec.termination == Termination::TimeExhausted));
    }
}

TEST_CASE("benchmark experiment") {
    const Figure1Result r = reproduce_figure1();
    CHECK(r.pass);
    CHECK(std::abs(r.H - (-0.05)) <= 1e-12);
    CHECK(std::abs(r.Hhat - 0.04) <= 1e-12);
    CHECK(r.forward_final_distance < 1e-6);
    CHECK(r.backward.boundary_is_node);
    CHECK(r.backward.node_vertex == 3);
    CHECK(r.backward_extrapolated_time >= -2.28);
    CHECK(r.backward_extrapolated_time <= -2.08);
    const std::string js = io::to_json(r);
    CHECK(js.find("\"pass\":true") != std::string::npos);
}

TEST_CASE("escape demonstration") {
    SUBCASE("benchmark parameters escape through commodity 1") {
        const EscapeRecord rec = escape_demo(kFig1Spec);
        CHECK(rec.edge == 1);
        CHECK(rec.edge_min_value < 0.0);
        CHECK(rec.traj.termination == Termination::PriceWentNegative);
        CHECK(rec.traj.negative_index == 1);
    }
    SUBCASE("globally stable economies have no escape") {
        CHECK_THROWS_AS(escape_demo(kSymmetric), NotApplicable);
    }
    SUBCASE("every sampled H<0 economy escapes somewhere") {
        SplitMix64 rng(55);
        for (int i = 0; i < 20; ++i) {
            const EndowmentParams p = sample_params(
                rng, [](const EndowmentParams& q) { return criteria(q).H < 0.0; });
            const EscapeRecord rec = escape_demo(p);
            CHECK(rec.traj.termination == Termination::PriceWentNegative);
            CHECK(rec.traj.negative_index == rec.edge);
        }
    }
}

TEST_CASE("edge stability probe") {
    SUBCASE("benchmark edge 1 repels") {
        const EdgeProbeResult r = edge_stability_probe(1, kFig1Spec);
        CHECK(r.verdict == ProbeVerdict::Repelling);
        CHECK(r.matches_prediction);
    }
    SUBCASE("symmetric edges repel") {
        const EdgeProbeResult r = edge_stability_probe(1, kSymmetric);
        CHECK(r.verdict == ProbeVerdict::Repelling);
        CHECK(r.matches_prediction);
    }
    SUBCASE("an unstable economy has an attracting edge") {
        const EndowmentParams p{0.7, 0.15, 0.15, 0.0, 0.0};
        REQUIRE(criteria(p).Hhat < 0.0);
        const EdgeProbeResult r2 = edge_stability_probe(2, p);
        CHECK(r2.fixed_point.own_excess < 0.0);
        CHECK(r2.verdict == ProbeVerdict::Attracting);
        CHECK(r2.matches_prediction);
        const EdgeProbeResult r1 = edge_stability_probe(1, p);
        CHECK(r1.verdict == ProbeVerdict::Repelling);
        CHECK(r1.matches_prediction);
    }
}

TEST_CASE("uniqueness scan") {
    SUBCASE("benchmark economy: one zero at the barycenter") {
        const UniquenessReport rep = uniqueness_scan(kFig1Spec, 200);
        REQUIRE(rep.zeros.size() == 1);
        CHECK(inf_norm(sub(rep.zeros[0], Vec3{1.0 / 3, 1.0 / 3, 1.0 / 3})) <= 1e-9);
        CHECK(rep.zero_norms[0] <= 1e-8);
        CHECK(rep.min_norm_outside > 1e-4);
    }
    SUBCASE("symmetric economy") {
        const UniquenessReport rep = uniqueness_scan(kSymmetric, 40);
        REQUIRE(rep.zeros.size() == 1);
        CHECK(inf_norm(sub(rep.zeros[0], Vec3{1.0 / 3, 1.0 / 3, 1.0 / 3})) <= 1e-9);
    }
    SUBCASE("grid_n below 10 is rejected") {
        CHECK_THROWS_AS(uniqueness_scan(kFig1Spec, 9), PreconditionViolation);
    }
}
