#include "scarfsim/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace scarfsim {

const char* to_string(LocalClass c) {
    switch (c) {
        case LocalClass::StableFocus: return "StableFocus";
        case LocalClass::StableNode: return "StableNode";
        case LocalClass::Saddle: return "Saddle";
        case LocalClass::Degenerate: return "Degenerate";
    }
    return "?";
}

Criteria criteria(const EndowmentParams& params) {
    params.validate();
    const double d1 = params.d1, d2 = params.d2, d3 = params.d3;
    const double S = d1 + d2 + d3;
    const double H = 4.0 * (d1 * d2 + d2 * d3 + d3 * d1) - S * S;
    const double dKL = params.K - params.L;
    return Criteria{H, H + dKL * dKL};
}

double weighted_excess_sum(const PriceVector& p, const EndowmentMatrix& A) {
    const Vec3 E = excess_demand(p, A);
    const Vec3 w = {p.p2 * p.p3, p.p1 * p.p3, p.p1 * p.p2};
    return dot(w, E);
}

double excess_quadratic_form(const PriceVector& p, const EndowmentMatrix& A) {
    const Vec3 pv = p.as_array();
    Mat3 M = A.a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) -= 0.5 * kComplementB(i, j);
    return dot(pv, M.mul(pv));
}

Mat3 c_matrix(const EndowmentParams& params) {
    params.validate();
    const double d1 = params.d1, d2 = params.d2, d3 = params.d3;
    const double c12 = 0.5 * (d3 - d1 - d2);
    const double c13 = 0.5 * (d2 - d1 - d3);
    const double c23 = 0.5 * (d1 - d2 - d3);
    return Mat3{{{{d1, c12, c13}, {c12, d2, c23}, {c13, c23, d3}}}};
}

std::array<double, 2> c_eigenvalues(const EndowmentParams& params) {
    const Criteria c = criteria(params);
    const double S = params.S();
    // roots of t^2 - S t + (3/4) H; discriminant S^2 - 3H is a sum of squared
    // differences of the d_i, nonnegative by construction
    const double disc = std::max(0.0, S * S - 3.0 * c.H);
    const double r = std::sqrt(disc);
    return {0.5 * (S - r), 0.5 * (S + r)};
}

Mat3 jacobian_at_equilibrium(const EndowmentMatrix& A, double tol) {
    A.require_condition_a(tol);
    Mat3 J;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            J(i, j) = (-2.0 * A.a(j, i) + (i == j ? 0.0 : 1.0)) / 4.0;
    return J;
}

std::array<std::complex<double>, 2> jacobian_eigenvalues(const EndowmentParams& params) {
    const Criteria c = criteria(params);
    const double S = params.S();
    const double disc = S * S - 3.0 * c.Hhat;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {std::complex<double>((-S - r) / 4.0, 0.0),
                std::complex<double>((-S + r) / 4.0, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(-S / 4.0, -im / 4.0), std::complex<double>(-S / 4.0, im / 4.0)};
}

LocalClass classify_local(const EndowmentParams& params, double tol) {
    const Criteria c = criteria(params);
    const double S = params.S();
    if (S <= 1e-12) return LocalClass::Degenerate;
    if (std::abs(c.Hhat) <= 1e-12) return LocalClass::Degenerate;
    if (std::abs(3.0 * c.Hhat - S * S) <= tol) return LocalClass::Degenerate;
    if (3.0 * c.Hhat > S * S) return LocalClass::StableFocus;
    if (c.Hhat > 0.0) return LocalClass::StableNode;
    return LocalClass::Saddle;
}

StabilityReport stability_report(const EndowmentParams& params) {
    const Criteria c = criteria(params);
    StabilityReport r;
    r.H = c.H;
    r.Hhat = c.Hhat;
    r.S = params.S();
    r.jacobian_eigenvalues = jacobian_eigenvalues(params);
    r.C_eigenvalues = c_eigenvalues(params);
    r.local_class = classify_local(params);
    r.globally_stable = (c.H > 0.0 && r.S > 0.0);
    return r;
}

double first_integral(const PriceVector& p, double gamma) {
    if (gamma < 0.0) throw PreconditionViolation("gamma must be nonnegative");
    if (gamma == 2.0) return p.p1 * p.p2 * p.p3;
    const double e = 2.0 - gamma;
    return std::pow(p.p1, e) + std::pow(p.p2, e) + std::pow(p.p3, e);
}

double lyapunov(const PriceVector& p, double gamma) {
    if (gamma < 0.0) throw PreconditionViolation("gamma must be nonnegative");
    if (gamma == 0.0) return -p.p1 * p.p2 * p.p3;
    if (!(p.p1 > 0.0 && p.p2 > 0.0 && p.p3 > 0.0))
        throw DegenerateDenominator("lyapunov value requires interior prices for gamma > 0");
    return std::pow(p.p1, -gamma) + std::pow(p.p2, -gamma) + std::pow(p.p3, -gamma);
}

namespace {

void check_edge_index(int edge) {
    if (edge < 1 || edge > 3) throw PreconditionViolation("edge index must be 1, 2 or 3");
}

}  // namespace

EdgeMinExcess edge_min_excess(int edge, const EndowmentMatrix& A) {
    check_edge_index(edge);
    A.require_condition_a();
    const int e = edge - 1, j = (e + 1) % 3, k = (e + 2) % 3;
    // On the edge p_e = 0 with s = p_k/p_j:
    //   E_e(s) = a_kk s + a_jj / s + a_jk + a_kj - 1
    const double ajj = A.a(j, j), akk = A.a(k, k);
    if (akk < 0.0 || ajj < 0.0)
        throw DegenerateEdge("edge " + std::to_string(edge) +
                             ": negative diagonal endowment, excess demand unbounded below on the edge");
    if (akk == 0.0 || ajj == 0.0)
        throw DegenerateEdge("edge " + std::to_string(edge) +
                             ": zero diagonal endowment, infimum attained only at a corner");
    EdgeMinExcess m;
    m.min_value = 2.0 * std::sqrt(ajj * akk) + A.a(j, k) + A.a(k, j) - 1.0;
    m.argmin_ratio = std::sqrt(ajj / akk);
    m.positive_on_edge = m.min_value > 0.0;
    return m;
}

EdgeFixedPoint edge_fixed_point(int edge, const EndowmentParams& params) {
    check_edge_index(edge);
    params.validate();
    if (!(params.d1 > 0.0 && params.d2 > 0.0 && params.d3 > 0.0))
        throw PreconditionViolation("edge fixed points require d1, d2, d3 > 0");

    // Cyclic rotation maps edge e onto edge 1 with (d1,d2,d3) permuted and K, L
    // unchanged.
    const double ds[3] = {params.d1, params.d2, params.d3};
    const int e = edge - 1;
    const double de = ds[e], dj = ds[(e + 1) % 3], dk = ds[(e + 2) % 3];
    const double dKL = params.K - params.L;

    // The rotated-frame fixed point (0, u, 1-u) solves
    //   lead u^2 + (2 dk + dKL) u - dk = 0,  lead = dj - dk - dKL,
    // and the branch surviving the 0 < u < 1 constraint is, in rationalized
    // form, lead-free (which also covers the degenerate tie lead = 0 with the
    // linear equation's unique root):
    const double disc = 4.0 * dj * dk + dKL * dKL;
    const double root = std::sqrt(disc);
    const double u = 2.0 * dk / (2.0 * dk + dKL + root);

    EdgeFixedPoint fp;
    fp.edge = edge;
    fp.own_excess = de - dj - dk + root;
    fp.locally_stable_on_simplex = fp.own_excess < 0.0;

    Vec3 pt{};
    pt[e] = 0.0;
    pt[(e + 1) % 3] = u;
    pt[(e + 2) % 3] = 1.0 - u;
    fp.point = PriceVector::boundary(pt[0], pt[1], pt[2]);

    // Closed form and direct evaluation must agree; a mismatch indicates a
    // branch-selection bug.
    const Vec3 E = excess_demand(fp.point, from_params(params, false));
    if (std::abs(E[e] - fp.own_excess) > tolerances::edge_consistency)
        throw std::logic_error("edge_fixed_point: closed-form excess " +
                               format_double(fp.own_excess) + " disagrees with direct value " +
                               format_double(E[e]));
    return fp;
}

}  // namespace scarfsim
