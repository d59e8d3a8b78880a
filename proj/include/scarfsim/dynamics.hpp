#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "scarfsim/economy.hpp"
#include "scarfsim/stability.hpp"

namespace scarfsim {

// =============================================================================
// Numerical integration of dp_i/dt = p_i^gamma E_i(p) with event detection,
// first-integral and Lyapunov monitoring, and backward-time support.
// =============================================================================

struct IntegrationConfig {
    double gamma = 1.0;
    double t0 = 0.0;
    double t1 = 100.0;  // t1 < t0 integrates backward
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();

    // Stop when the k-th smallest initially-nonzero coordinate falls below the
    // floor (k = boundary_trigger_count); 0 disables the boundary stop.
    double boundary_floor = 1e-12;
    int boundary_trigger_count = 1;

    // Stop when the price is within this distance (infinity norm, matched by
    // invariant value) of the equilibrium ray {c(1,1,1)}.
    double convergence_radius = 1e-8;

    std::uint64_t max_samples = 2'000'000;

    // Rescale the state after every accepted step so the first integral stays
    // exactly at its initial value (off by default; drift is monitored, and
    // silent projection can mask integrator bugs).
    bool renormalize_invariant = false;

    void validate() const;
};

enum class Termination {
    ConvergedToEquilibriumRay,
    ReachedBoundary,
    PriceWentNegative,
    TimeExhausted,
    LimitCycleSuspected,
    StepFailure,
};

const char* to_string(Termination t);

struct Sample {
    double t = 0.0;
    Vec3 p{};
    Vec3 E{};
    double g = 0.0;    // first integral
    double phi = 0.0;  // Lyapunov value
};

struct Trajectory {
    std::vector<Sample> samples;
    Termination termination = Termination::TimeExhausted;

    // ReachedBoundary details: which coordinate hit the floor; whether the
    // endpoint is a node approach (two coordinates below the floor) and which
    // vertex; extrapolated true arrival time at the boundary.
    int boundary_index = -1;   // 1-based commodity index
    bool boundary_is_node = false;
    int node_vertex = -1;      // 1-based index of the surviving coordinate
    double extrapolated_boundary_time = std::numeric_limits<double>::quiet_NaN();

    int negative_index = -1;   // 1-based, for PriceWentNegative

    double max_integral_drift = 0.0;  // max |g - g0| / max(|g0|, eps)
    std::string message;

    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }
};

// The vector field p_i^gamma E_i(p). gamma = 0 reproduces the classical
// process (0^0 taken as 1, so a zero price can be pushed negative), gamma = 1
// the price-scaled process, gamma = 2 the product-conserving one.
Vec3 rhs(const PriceVector& p, double gamma, const EndowmentMatrix& A);

// Infinity-norm distance from p to the equilibrium ray, measured against the
// ray point with matching first integral.
double ray_distance(const Vec3& p, double gamma);

Trajectory integrate(const PriceVector& p0, const EndowmentMatrix& A,
                     const IntegrationConfig& cfg);

// --- Poincare-section cycle detection (gamma = 1 simplex flow) --------------

struct CycleReport {
    bool detected = false;
    double period_estimate = 0.0;
    std::vector<Vec3> section_points;
    double closure_residual = std::numeric_limits<double>::infinity();
    bool returns_shrinking = false;  // consecutive section radii decreasing
    int crossing_count = 0;
};

// Crossings of a fixed half-line section anchored at the simplex barycenter.
// detected = two consecutive returns coincide within tolerance while staying
// bounded away from the barycenter. Throws InsufficientCrossings if the path
// crosses the section fewer than 3 times.
CycleReport detect_limit_cycle(const Trajectory& traj);

}  // namespace scarfsim
