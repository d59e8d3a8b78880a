#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace scarfsim {

using Vec3 = std::array<double, 3>;

struct Mat3 {
    std::array<std::array<double, 3>, 3> a{};

    constexpr double operator()(int i, int j) const { return a[i][j]; }
    constexpr double& operator()(int i, int j) { return a[i][j]; }

    constexpr Vec3 row(int i) const { return {a[i][0], a[i][1], a[i][2]}; }
    constexpr Vec3 col(int j) const { return {a[0][j], a[1][j], a[2][j]}; }

    constexpr Vec3 mul(const Vec3& v) const {
        return {a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
                a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
                a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2]};
    }

    constexpr Mat3 transposed() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.a[i][j] = a[j][i];
        return t;
    }
};

inline constexpr double dot(const Vec3& x, const Vec3& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

inline constexpr Vec3 add(const Vec3& x, const Vec3& y) {
    return {x[0] + y[0], x[1] + y[1], x[2] + y[2]};
}

inline constexpr Vec3 sub(const Vec3& x, const Vec3& y) {
    return {x[0] - y[0], x[1] - y[1], x[2] - y[2]};
}

inline constexpr Vec3 scale(double c, const Vec3& x) {
    return {c * x[0], c * x[1], c * x[2]};
}

inline double inf_norm(const Vec3& x) {
    return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
}

inline double norm2(const Vec3& x) { return std::sqrt(dot(x, x)); }

inline double min_elem(const Vec3& x) { return std::min({x[0], x[1], x[2]}); }

inline int argmin(const Vec3& x) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (x[i] < x[k]) k = i;
    return k;
}

inline int argmax(const Vec3& x) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (x[i] > x[k]) k = i;
    return k;
}

// Module-wide default tolerances. Operations that validate take these as
// defaulted parameters, so callers can override per call.
namespace tolerances {
inline constexpr double identity = 1e-12;         // algebraic identities, constraint checks
inline constexpr double denominator_floor = 1e-300;
inline constexpr double eigen_match = 1e-10;
inline constexpr double classify_degenerate = 1e-10;
inline constexpr double edge_consistency = 1e-8;  // closed form vs direct E at edge fixed point
}  // namespace tolerances

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstraintViolation : public ModelError {
public:
    using ModelError::ModelError;
};

class NegativeEndowment : public ModelError {
public:
    using ModelError::ModelError;
};

class ConditionAViolation : public ModelError {
public:
    using ModelError::ModelError;
};

class DegenerateDenominator : public ModelError {
public:
    using ModelError::ModelError;
};

class DegenerateEdge : public ModelError {
public:
    using ModelError::ModelError;
};

class PreconditionViolation : public ModelError {
public:
    using ModelError::ModelError;
};

class SamplingExhausted : public ModelError {
public:
    using ModelError::ModelError;
};

class NotApplicable : public ModelError {
public:
    using ModelError::ModelError;
};

class InsufficientCrossings : public ModelError {
public:
    using ModelError::ModelError;
};

// 17-significant-digit decimal rendering; round-trips doubles exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace scarfsim
