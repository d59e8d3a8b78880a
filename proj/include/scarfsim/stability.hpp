#pragma once

#include <complex>

#include "scarfsim/economy.hpp"

namespace scarfsim {

// =============================================================================
// Closed-form stability theory for the price dynamics dp_i/dt = p_i^gamma E_i.
//
// Two scalar criteria decide everything at the interior equilibrium ray:
//   H    = 4(d1 d2 + d2 d3 + d3 d1) - (d1+d2+d3)^2   (H > 0: global stability)
//   Hhat = H + (K-L)^2                               (Hhat > 0: local stability)
// The nonzero Jacobian eigenvalues at p* are the roots of t^2 + 2 S t + 3 Hhat
// divided by 4, with S = d1+d2+d3.
// =============================================================================

enum class LocalClass { StableFocus, StableNode, Saddle, Degenerate };

const char* to_string(LocalClass c);

struct Criteria {
    double H = 0.0;
    double Hhat = 0.0;
};

Criteria criteria(const EndowmentParams& params);

struct StabilityReport {
    double H = 0.0;
    double Hhat = 0.0;
    double S = 0.0;
    std::array<std::complex<double>, 2> jacobian_eigenvalues{};
    std::array<double, 2> C_eigenvalues{};  // nonzero eigenvalues of the Lyapunov form
    LocalClass local_class = LocalClass::Degenerate;
    bool globally_stable = false;
};

StabilityReport stability_report(const EndowmentParams& params);

// Both sides of the quadratic-form identity
//   [p2 p3, p1 p3, p1 p2] E(p) = p^T (A - B/2) p,
// which drives the Lyapunov derivative. They agree under condition A.
double weighted_excess_sum(const PriceVector& p, const EndowmentMatrix& A);
double excess_quadratic_form(const PriceVector& p, const EndowmentMatrix& A);

// Symmetric K,L-free matrix C with p^T C p equal to the quadratic form above;
// C u = 0, trace C = S, nonzero eigenvalues are the roots of t^2 - S t + (3/4)H.
Mat3 c_matrix(const EndowmentParams& params);
std::array<double, 2> c_eigenvalues(const EndowmentParams& params);

// Jacobian of p -> (p_i^gamma E_i) at p* = (1,1,1); independent of gamma.
// J_ij = (-2 a_ji + (1 - delta_ij)) / 4, and J u = 0.
Mat3 jacobian_at_equilibrium(const EndowmentMatrix& A, double tol = tolerances::identity);

// The two nonzero eigenvalues of J, always returned as complex numbers.
std::array<std::complex<double>, 2> jacobian_eigenvalues(const EndowmentParams& params);

LocalClass classify_local(const EndowmentParams& params,
                          double tol = tolerances::classify_degenerate);

// Conserved quantity of the gamma-family flow:
//   g_gamma = p1^(2-gamma) + p2^(2-gamma) + p3^(2-gamma)   (gamma != 2)
//   g_2     = p1 p2 p3
double first_integral(const PriceVector& p, double gamma);

// Lyapunov function, decreasing along orbits whenever H > 0:
//   phi_gamma = p1^-gamma + p2^-gamma + p3^-gamma  (gamma > 0),  -p1 p2 p3  (gamma = 0)
double lyapunov(const PriceVector& p, double gamma);

// --- Boundary (edge) analysis, classical gamma = 0 -------------------------

struct EdgeMinExcess {
    double min_value = 0.0;     // infimum of E_edge over the open edge
    double argmin_ratio = 0.0;  // minimizing ratio p_(edge+2)/p_(edge+1), cyclically
    bool positive_on_edge = false;
};

// Minimum of the edge commodity's own excess demand over the open edge
// {p_edge = 0}. For edge 1 the minimum is 2 sqrt(a22 a33) + a23 + a32 - 1 at
// p3/p2 = sqrt(a22/a33); edges 2 and 3 follow by cyclic rotation of indices.
// min > 0 iff (H > 0 or the edge's sign condition holds, e.g. -d1+d2+d3 < 0).
// Throws DegenerateEdge when a relevant diagonal entry is zero or negative.
EdgeMinExcess edge_min_excess(int edge, const EndowmentMatrix& A);

// --- Edge fixed points of the price-scaled (gamma = 1) simplex flow --------

struct EdgeFixedPoint {
    int edge = 1;                           // commodity with zero price (1-based)
    PriceVector point{};                    // on the unit simplex
    double own_excess = 0.0;                // E_edge at the fixed point
    bool locally_stable_on_simplex = false; // own_excess < 0
};

// Rest point of the gamma=1 flow on the open edge {p_edge = 0}: the unique
// point where the two other excess demands vanish. Closed form via the
// quadratic U^2 + (2 d3 + K - L) U - (-a21 + a31) a33 = 0 (edge 1; the other
// edges by cyclic permutation of (d1,d2,d3) with K, L fixed), positive
// square-root branch. own_excess = d_e - d_o1 - d_o2 + sqrt(4 d_o1 d_o2 + (K-L)^2).
// Requires d1, d2, d3 > 0.
EdgeFixedPoint edge_fixed_point(int edge, const EndowmentParams& params);

}  // namespace scarfsim
