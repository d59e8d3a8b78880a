#pragma once

#include "scarfsim/common.hpp"

namespace scarfsim {

// =============================================================================
// Exchange-economy model: three consumers, three commodities.
//
// Consumer h owns the endowment column a_h of the 3x3 matrix A and demands the
// two commodities it does not own in equal amounts (Leontief preferences), so
// demand is the closed-form share f_h = p^T a_h / p^T b_h along the complement
// vector b_h.
// =============================================================================

// The five scalars pinning the endowment matrix:
//   A = [ d1    d3+L  d2+K ]
//       [ d3+K  d2    d1+L ]
//       [ d2+L  d1+K  d3   ]
// subject to d_i >= 0 and d1+d2+d3+K+L = 1.
struct EndowmentParams {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double K = 0.0;
    double L = 0.0;

    double sum() const { return d1 + d2 + d3 + K + L; }
    double S() const { return d1 + d2 + d3; }

    // Throws ConstraintViolation if d_i < 0 or the sum constraint fails.
    void validate(double tol = tolerances::identity) const;
};

// 3x3 endowment matrix; a(i,j) is the endowment of commodity i held by
// consumer j. Row and column sums are all 1 ("condition A"), which places the
// interior equilibrium at p* = (1,1,1).
struct EndowmentMatrix {
    Mat3 a;

    Vec3 consumer_endowment(int h) const { return a.col(h); }  // h in 0..2
    double condition_a_residual() const;
    void require_condition_a(double tol = tolerances::identity) const;
    bool nonnegative() const;
};

// Strictly positive prices, or a boundary point with exactly one zero price.
// Two or more zeros are rejected (demand-share denominators vanish).
struct PriceVector {
    double p1 = 1.0;
    double p2 = 1.0;
    double p3 = 1.0;

    static PriceVector interior(double p1, double p2, double p3);
    static PriceVector boundary(double p1, double p2, double p3);
    static PriceVector raw(double p1, double p2, double p3);  // unchecked
    static PriceVector from_array(const Vec3& p) { return raw(p[0], p[1], p[2]); }
    static PriceVector equilibrium() { return PriceVector{1.0, 1.0, 1.0}; }

    Vec3 as_array() const { return {p1, p2, p3}; }
    double operator[](int i) const { return i == 0 ? p1 : (i == 1 ? p2 : p3); }
};

// Budget-share ratios f_h = p^T a_h / p^T b_h.
struct DemandShares {
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;

    Vec3 as_array() const { return {f1, f2, f3}; }
    double operator[](int i) const { return i == 0 ? f1 : (i == 1 ? f2 : f3); }
};

// Complement matrix B = [b1,b2,b3]; b_h has zeros on consumer h's own
// commodity and ones elsewhere.
inline constexpr Mat3 kComplementB{{{{0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}}}};

// Builds A from the five parameters. With strict (default) every entry must be
// >= 0 (endowments are physical quantities); pass strict=false to allow the
// parametrization's negative-entry corner cases.
EndowmentMatrix from_params(const EndowmentParams& params, bool strict = true,
                            double tol = tolerances::identity);

// Inverse of from_params: d_i = a_ii, K = a21 - a33, L = a12 - a33.
EndowmentParams to_params(const EndowmentMatrix& A, double tol = tolerances::identity);

DemandShares demand_shares(const PriceVector& p, const EndowmentMatrix& A,
                           double denom_floor = tolerances::denominator_floor);

// E(p) = B f - A u. Degree-0 homogeneous in p; satisfies Walras law p^T E = 0
// for every A. Under condition A also equals E_i = (f1+f2+f3) - f_i - 1.
Vec3 excess_demand(const PriceVector& p, const EndowmentMatrix& A);

// Optimal consumption bundles x_h = f_h b_h, h = 0..2.
std::array<Vec3, 3> consumption(const PriceVector& p, const EndowmentMatrix& A);

// Leontief utility of consumer h (1-based): min of the two consumption
// components other than the consumer's own commodity.
double utility(const Vec3& x, int consumer);

}  // namespace scarfsim
