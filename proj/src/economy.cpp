#include "scarfsim/economy.hpp"

#include <cmath>

namespace scarfsim {

void EndowmentParams::validate(double tol) const {
    if (d1 < 0.0 || d2 < 0.0 || d3 < 0.0)
        throw ConstraintViolation("EndowmentParams: diagonal endowments must be nonnegative, got d=(" +
                                  format_double(d1) + "," + format_double(d2) + "," +
                                  format_double(d3) + ")");
    const double s = sum();
    if (std::abs(s - 1.0) > tol)
        throw ConstraintViolation("EndowmentParams: d1+d2+d3+K+L must equal 1, got " +
                                  format_double(s));
}

double EndowmentMatrix::condition_a_residual() const {
    double r = 0.0;
    for (int i = 0; i < 3; ++i) {
        r = std::max(r, std::abs(a(i, 0) + a(i, 1) + a(i, 2) - 1.0));  // A u = u
        r = std::max(r, std::abs(a(0, i) + a(1, i) + a(2, i) - 1.0));  // u^T A = u^T
    }
    return r;
}

void EndowmentMatrix::require_condition_a(double tol) const {
    const double r = condition_a_residual();
    if (r > tol)
        throw ConditionAViolation("endowment matrix violates condition A (residual " +
                                  format_double(r) + ")");
}

bool EndowmentMatrix::nonnegative() const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a(i, j) < 0.0) return false;
    return true;
}

PriceVector PriceVector::interior(double p1, double p2, double p3) {
    if (!(p1 > 0.0 && p2 > 0.0 && p3 > 0.0))
        throw PreconditionViolation("interior price vector requires all prices > 0, got (" +
                                    format_double(p1) + "," + format_double(p2) + "," +
                                    format_double(p3) + ")");
    return PriceVector{p1, p2, p3};
}

PriceVector PriceVector::boundary(double p1, double p2, double p3) {
    int zeros = (p1 == 0.0) + (p2 == 0.0) + (p3 == 0.0);
    if (zeros != 1 || p1 < 0.0 || p2 < 0.0 || p3 < 0.0)
        throw PreconditionViolation(
            "boundary price vector requires exactly one zero price with the other two > 0");
    return PriceVector{p1, p2, p3};
}

PriceVector PriceVector::raw(double p1, double p2, double p3) { return PriceVector{p1, p2, p3}; }

EndowmentMatrix from_params(const EndowmentParams& params, bool strict, double tol) {
    params.validate(tol);
    const double d1 = params.d1, d2 = params.d2, d3 = params.d3, K = params.K, L = params.L;
    EndowmentMatrix A;
    A.a = Mat3{{{{d1, d3 + L, d2 + K}, {d3 + K, d2, d1 + L}, {d2 + L, d1 + K, d3}}}};
    if (strict && !A.nonnegative())
        throw NegativeEndowment("endowment matrix has a negative entry for params (d=(" +
                                format_double(d1) + "," + format_double(d2) + "," +
                                format_double(d3) + "), K=" + format_double(K) +
                                ", L=" + format_double(L) + ")");
    return A;
}

EndowmentParams to_params(const EndowmentMatrix& A, double tol) {
    A.require_condition_a(tol);
    EndowmentParams p;
    p.d1 = A.a(0, 0);
    p.d2 = A.a(1, 1);
    p.d3 = A.a(2, 2);
    p.K = A.a(1, 0) - A.a(2, 2);
    p.L = A.a(0, 1) - A.a(2, 2);
    return p;
}

DemandShares demand_shares(const PriceVector& p, const EndowmentMatrix& A, double denom_floor) {
    const Vec3 pv = p.as_array();
    double f[3];
    for (int h = 0; h < 3; ++h) {
        const double den = dot(pv, kComplementB.col(h));
        if (!(den > denom_floor))
            throw DegenerateDenominator("demand share denominator p^T b_" + std::to_string(h + 1) +
                                        " = " + format_double(den) + " is not positive");
        f[h] = dot(pv, A.a.col(h)) / den;
    }
    return DemandShares{f[0], f[1], f[2]};
}

Vec3 excess_demand(const PriceVector& p, const EndowmentMatrix& A) {
    const DemandShares f = demand_shares(p, A);
    const Vec3 bf = kComplementB.mul(f.as_array());
    const Vec3 au = A.a.mul({1.0, 1.0, 1.0});
    return sub(bf, au);
}

std::array<Vec3, 3> consumption(const PriceVector& p, const EndowmentMatrix& A) {
    const DemandShares f = demand_shares(p, A);
    return {scale(f.f1, kComplementB.col(0)), scale(f.f2, kComplementB.col(1)),
            scale(f.f3, kComplementB.col(2))};
}

double utility(const Vec3& x, int consumer) {
    if (consumer < 1 || consumer > 3)
        throw PreconditionViolation("consumer index must be 1, 2 or 3");
    const int own = consumer - 1;
    return std::min(x[(own + 1) % 3], x[(own + 2) % 3]);
}

}  // namespace scarfsim
