#pragma once

#include <optional>

#include "medialkit/medial.hpp"

namespace medialkit {

inline std::vector<double> default_etas() { return {0.2, 0.1, 0.05}; }

struct RadiusSequence {
    std::vector<double> etas;
    std::vector<double> values;  // per-eta minima, t_max standing in for unbounded
    double liminf_estimate = 0.0;
    bool stabilized = false;
    int pair_count = 0;  // sampled (x, v_x) pairs behind the last value
};

struct RadiusReport {
    Vec base;
    std::optional<Vec> dir;
    double r_v = 0.0;  // only when dir is set
    RadiusSequence r_tilde;
    double r_weak = 0.0;
    double r_reach = 0.0;
    double r_bd = 0.0;
    int fan_size = 0;
};

struct FrontierVerdict {
    enum class Kind { InClosure, NotInClosure, Inconclusive };
    Vec query;
    Vec nearest;
    Vec dir;
    double d_x = 0.0;
    double r_tilde = 0.0;
    Kind verdict = Kind::Inconclusive;
};

// r_v(a): how far along v the point a stays nearest. Bracketed by doubling,
// sharpened by bisection; values at t_max report as unbounded.
double directional_radius(const Scene& s, const Vec& a, const Vec& v, const Tolerances& tol);

// liminf of directional radii over sampled (x, v_x) near (a, v).
RadiusSequence limiting_directional_radius(const Scene& s, const Vec& a, const Vec& v,
                                           const std::vector<double>& etas,
                                           const Tolerances& tol);

// r'(a): infimum over the sampled normal fan.
double weak_radius(const Scene& s, const Vec& a, const Tolerances& tol);

// r(a): infimum of limiting radii over the sampled limiting fan.
double reaching_radius(const Scene& s, const Vec& a, const Tolerances& tol);

// Birbrair-Denkowski radius via liminf of weak radii along X.
double bd_radius(const Scene& s, const Vec& a, const std::vector<double>& etas,
                 const Tolerances& tol);

RadiusReport radius_report(const Scene& s, const Vec& a, const std::optional<Vec>& dir,
                           const Tolerances& tol);

// Classify whether x sits in the closure of the medial axis by comparing d(x)
// with the limiting radius at its unique nearest point.
FrontierVerdict frontier_classify(const Scene& s, const Vec& x, const Tolerances& tol);

struct OffsetRadiusReport {
    double r_base = 0.0;
    double r_offset = 0.0;
    double eps = 0.0;
    bool pass = false;  // |r_base - (r_offset + eps)| <= 5e-2
};

OffsetRadiusReport offset_radius_check(const Scene& s, const Vec& a, const Vec& v, double eps,
                                       const Tolerances& tol);

struct ContinuityReport {
    std::vector<double> etas;
    std::vector<double> oscillation;  // max - min of weak radii per eta
    bool passed(double bound) const {
        return !oscillation.empty() && oscillation.back() <= bound;
    }
};

ContinuityReport radius_continuity_probe(const Scene& s, const Vec& a,
                                         const std::vector<double>& etas, const Tolerances& tol);

struct RhoReport {
    int fan_size = 0;
    std::vector<std::string> violations;  // persistent upward jumps
    bool passed() const { return violations.empty(); }
};

RhoReport rho_semicontinuity_probe(const Scene& s, const Vec& a, const Tolerances& tol);

struct DenkowskiReport {
    double r_reach = 0.0;
    double r_bd = 0.0;
    bool both_unbounded = false;
    bool pass = false;
};

DenkowskiReport denkowski_equality_check(const Scene& s, const Vec& a, const Tolerances& tol);

// Membership predicate behind the directional radius: d(a + t v) tracks t and
// a stays in the nearest set. Exposed for the interval property tests.
bool radius_membership(const Scene& s, const Vec& a, const Vec& v, double t,
                       const Tolerances& tol);

}  // namespace medialkit
