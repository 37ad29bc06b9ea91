#include "medialkit/reach.hpp"

#include <algorithm>
#include <map>

namespace medialkit {

namespace {

bool cluster_near(const NearestSet& ns, const Vec& a, double radius) {
    for (const auto& c : ns.clusters)
        for (const auto& m : c.members)
            if (dist(m, a) <= radius) return true;
    return false;
}

void require_on_x(const Scene& s, const Vec& a, const Tolerances& tol) {
    if (distance(s, a) > tol.eps_dist) throw NotOnX("base point is not on X");
}

}  // namespace

bool radius_membership(const Scene& s, const Vec& a, const Vec& v, double t,
                       const Tolerances& tol) {
    Vec q = a + t * v;
    NearestSet ns = nearest_set(s, q, tol);
    if (ns.distance < t - tol.eps_dist) return false;
    return cluster_near(ns, a, tol.eps_cluster);
}

double directional_radius(const Scene& s, const Vec& a, const Vec& v, const Tolerances& tol) {
    require_on_x(s, a, tol);
    if (std::abs(norm(v) - 1.0) > tol.eps_unit)
        throw ValidationError("radius direction must be a unit vector");
    Vec u = normalized(v);

    const double t0 = 1e-6;
    if (!radius_membership(s, a, u, t0, tol))
        throw NotNormal("direction leaves the normal set immediately");

    double lo = t0;
    double hi = t0;
    while (hi < tol.t_max) {
        double next = std::min(2.0 * hi, tol.t_max);
        if (radius_membership(s, a, u, next, tol)) {
            lo = hi = next;
        } else {
            hi = next;
            break;
        }
    }
    if (lo >= tol.t_max) return tol.t_max;  // unbounded

    while (hi - lo > tol.eps_dist) {
        double mid = 0.5 * (lo + hi);
        if (radius_membership(s, a, u, mid, tol))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// Shared sampling engine: base points near a with their normal fans and the
// directional radius along each fan ray.

namespace {

struct SampleFan {
    Vec x;
    std::vector<std::pair<Vec, double>> rays;  // (unit direction, radius)
};

std::vector<SampleFan> collect_sample_fans(const Scene& s, const Vec& a, double eta, int budget,
                                           const Tolerances& tol, bool include_base) {
    std::vector<Vec> pts;
    int per_prim = std::max<int>(8, budget / int(s.primitives.size()) + 1);
    for (const auto& p : s.primitives)
        for (const auto& q : primitive_sample_in_ball(p, a, eta, per_prim, tol)) {
            bool dup = false;
            for (const auto& e : pts)
                if (dist(e, q) <= 1e-9) {
                    dup = true;
                    break;
                }
            if (!dup) pts.push_back(q);
        }
    if (int(pts.size()) > budget) {
        std::vector<Vec> thin;
        size_t stride = pts.size() / budget + 1;
        for (size_t i = 0; i < pts.size(); i += stride) thin.push_back(pts[i]);
        pts.swap(thin);
    }
    if (include_base) pts.push_back(a);

    std::vector<SampleFan> out;
    for (const auto& x : pts) {
        SampleFan sf;
        sf.x = x;
        NormalFan fan;
        try {
            fan = normal_directions(s, x, tol);
        } catch (const NotOnX&) {
            continue;
        }
        for (const auto& w : fan.directions) {
            try {
                sf.rays.push_back({w, directional_radius(s, x, w, tol)});
            } catch (const NotNormal&) {
                // borderline fan sample; contributes nothing
            }
        }
        if (!sf.rays.empty()) out.push_back(sf);
    }
    return out;
}

double min_radius_toward(const std::vector<SampleFan>& fans, const Vec& v, double dir_window,
                         const Tolerances& tol, int* count = nullptr) {
    double best = tol.t_max;
    int n = 0;
    for (const auto& sf : fans)
        for (const auto& [w, r] : sf.rays)
            if (dist(w, v) < dir_window) {
                best = std::min(best, r);
                ++n;
            }
    if (count) *count = n;
    return best;
}

}  // namespace

RadiusSequence limiting_directional_radius(const Scene& s, const Vec& a, const Vec& v,
                                           const std::vector<double>& etas,
                                           const Tolerances& tol) {
    require_on_x(s, a, tol);
    for (size_t i = 0; i + 1 < etas.size(); ++i)
        if (!(etas[i] > etas[i + 1])) throw ValidationError("etas must be strictly decreasing");
    Vec u = normalized(v);

    NormalFan limit_fan = limiting_normals(s, a, etas.back(), tol);
    double best_angle = M_PI;
    for (const auto& w : limit_fan.directions) best_angle = std::min(best_angle, angle_between(u, w));
    if (best_angle > 0.05)
        throw DirectionNotLimiting("direction is not within 0.05 of the limiting fan");

    RadiusSequence seq;
    seq.etas = etas;
    for (double eta : etas) {
        auto fans = collect_sample_fans(s, a, eta, 32, tol, true);
        int count = 0;
        double val = min_radius_toward(fans, u, eta, tol, &count);
        seq.values.push_back(val);
        seq.pair_count = count;
    }
    seq.liminf_estimate = seq.values.back();
    if (seq.values.size() >= 2) {
        double a1 = seq.values[seq.values.size() - 2], a0 = seq.values.back();
        seq.stabilized = (is_unbounded(a0, tol) && is_unbounded(a1, tol)) ||
                         std::abs(a0 - a1) <= 1e-2;
    }
    return seq;
}

double weak_radius(const Scene& s, const Vec& a, const Tolerances& tol) {
    require_on_x(s, a, tol);
    NormalFan fan = normal_directions(s, a, tol);
    double best = tol.t_max;
    for (const auto& w : fan.directions) {
        try {
            best = std::min(best, directional_radius(s, a, w, tol));
        } catch (const NotNormal&) {
        }
    }
    return best;
}

double reaching_radius(const Scene& s, const Vec& a, const Tolerances& tol) {
    require_on_x(s, a, tol);
    std::vector<double> etas = default_etas();
    NormalFan limit_fan = limiting_normals(s, a, etas.back(), tol);

    double eta = etas.back();
    auto fans = collect_sample_fans(s, a, eta, 32, tol, true);
    double best = tol.t_max;
    for (const auto& v : limit_fan.directions)
        best = std::min(best, min_radius_toward(fans, v, eta, tol));
    return best;
}

double bd_radius(const Scene& s, const Vec& a, const std::vector<double>& etas,
                 const Tolerances& tol) {
    require_on_x(s, a, tol);
    double last = tol.t_max;
    for (double eta : etas) {
        auto fans = collect_sample_fans(s, a, eta, 32, tol, true);
        double val = tol.t_max;
        for (const auto& sf : fans) {
            double weak = tol.t_max;
            for (const auto& [w, r] : sf.rays) weak = std::min(weak, r);
            val = std::min(val, weak);
        }
        last = val;
    }
    return last;
}

RadiusReport radius_report(const Scene& s, const Vec& a, const std::optional<Vec>& dir,
                           const Tolerances& tol) {
    RadiusReport rep;
    rep.base = a;
    rep.dir = dir;
    if (dir) {
        Vec u = normalized(*dir);
        rep.r_v = directional_radius(s, a, u, tol);
        rep.r_tilde = limiting_directional_radius(s, a, u, default_etas(), tol);
    }
    rep.r_weak = weak_radius(s, a, tol);
    rep.r_reach = reaching_radius(s, a, tol);
    rep.r_bd = bd_radius(s, a, default_etas(), tol);
    rep.fan_size = int(normal_directions(s, a, tol).directions.size());
    return rep;
}

FrontierVerdict frontier_classify(const Scene& s, const Vec& x, const Tolerances& tol) {
    NearestSet ns = nearest_set(s, x, tol);
    if (ns.distance <= tol.eps_dist) throw OnX("frontier query lies on X");
    if (!singleton_at_resolution(ns, tol))
        throw OnMedial("frontier query already has a split nearest set");

    FrontierVerdict fv;
    fv.query = x;
    fv.nearest = ns.clusters.front().representative;
    fv.dir = normalized(x - fv.nearest);
    fv.d_x = ns.distance;
    RadiusSequence seq = limiting_directional_radius(s, fv.nearest, fv.dir, default_etas(), tol);
    fv.r_tilde = seq.liminf_estimate;
    if (fv.r_tilde <= tol.sep_tol)
        fv.verdict = FrontierVerdict::Kind::Inconclusive;
    else if (fv.d_x >= fv.r_tilde - 10.0 * tol.eps_dist)
        fv.verdict = FrontierVerdict::Kind::InClosure;
    else
        fv.verdict = FrontierVerdict::Kind::NotInClosure;
    return fv;
}

// ---------------------------------------------------------------------------
// Offset transport of the limiting radius

namespace {

bool offset_membership(const Scene& s, double eps, const Vec& a_eps, const Vec& v, double t,
                       const Tolerances& tol) {
    Vec q = a_eps + t * v;
    NearestSet ns = nearest_set(s, q, tol);
    double d = ns.distance;
    if (d - eps < t - tol.eps_dist) return false;
    if (d <= eps) return false;
    double ratio = (d - eps) / d;
    for (const auto& c : ns.clusters)
        for (const auto& m : c.members)
            if (dist(q + ratio * (m - q), a_eps) <= tol.eps_cluster) return true;
    return false;
}

double offset_directional_radius(const Scene& s, double eps, const Vec& a_eps, const Vec& v,
                                 const Tolerances& tol) {
    const double t0 = 1e-6;
    if (!offset_membership(s, eps, a_eps, v, t0, tol))
        throw NotNormal("offset direction leaves the normal set immediately");
    double lo = t0, hi = t0;
    while (hi < tol.t_max) {
        double next = std::min(2.0 * hi, tol.t_max);
        if (offset_membership(s, eps, a_eps, v, next, tol)) {
            lo = hi = next;
        } else {
            hi = next;
            break;
        }
    }
    if (lo >= tol.t_max) return tol.t_max;
    while (hi - lo > tol.eps_dist) {
        double mid = 0.5 * (lo + hi);
        if (offset_membership(s, eps, a_eps, v, mid, tol))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

OffsetRadiusReport offset_radius_check(const Scene& s, const Vec& a, const Vec& v, double eps,
                                       const Tolerances& tol) {
    require_on_x(s, a, tol);
    Vec u = normalized(v);
    RadiusSequence base = limiting_directional_radius(s, a, u, default_etas(), tol);
    OffsetRadiusReport rep;
    rep.eps = eps;
    rep.r_base = base.liminf_estimate;
    if (!(rep.r_base > eps + tol.sep_tol))
        throw RadiusTooSmall("limiting radius does not exceed eps + sep_tol");

    // transport the sampled pairs: (x, v_x) -> (x + eps v_x, v_x) on d^{-1}(eps)
    std::vector<double> etas = default_etas();
    double r_off = tol.t_max;
    double eta = etas.back();
    auto fans = collect_sample_fans(s, a, eta, 32, tol, true);
    for (const auto& sf : fans) {
        for (const auto& [w, r] : sf.rays) {
            if (dist(w, u) >= eta) continue;
            if (r <= eps) continue;  // the ray dies before reaching the offset surface
            try {
                r_off = std::min(r_off, offset_directional_radius(s, eps, sf.x + eps * w, w, tol));
            } catch (const NotNormal&) {
            }
        }
    }
    rep.r_offset = r_off;
    if (is_unbounded(rep.r_base, tol) && is_unbounded(r_off, tol))
        rep.pass = true;
    else
        rep.pass = std::abs(rep.r_base - (rep.r_offset + eps)) <= 5e-2;
    return rep;
}

ContinuityReport radius_continuity_probe(const Scene& s, const Vec& a,
                                         const std::vector<double>& etas, const Tolerances& tol) {
    require_on_x(s, a, tol);
    ContinuityReport rep;
    rep.etas = etas;
    for (double eta : etas) {
        std::vector<Vec> pts;
        int per_prim = std::max<int>(8, 16 / int(s.primitives.size()) + 1);
        for (const auto& p : s.primitives)
            for (const auto& q : primitive_sample_in_ball(p, a, eta, per_prim, tol))
                pts.push_back(q);
        pts.push_back(a);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& x : pts) {
            double r = weak_radius(s, x, tol);
            if (is_unbounded(r, tol)) continue;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        rep.oscillation.push_back(hi >= lo ? hi - lo : 0.0);
    }
    return rep;
}

RhoReport rho_semicontinuity_probe(const Scene& s, const Vec& a, const Tolerances& tol) {
    require_on_x(s, a, tol);
    NormalFan fan = normal_directions(s, a, tol);
    RhoReport rep;
    rep.fan_size = int(fan.directions.size());

    std::vector<double> rho(fan.directions.size(), tol.t_max);
    for (size_t i = 0; i < fan.directions.size(); ++i) {
        try {
            rho[i] = directional_radius(s, a, fan.directions[i], tol);
        } catch (const NotNormal&) {
        }
    }

    auto rho_at = [&](const Vec& w) -> std::optional<double> {
        try {
            return directional_radius(s, a, normalized(w), tol);
        } catch (const NotNormal&) {
            return std::nullopt;
        }
    };

    for (size_t i = 0; i < fan.directions.size(); ++i) {
        if (is_unbounded(rho[i], tol)) continue;  // nothing can jump above unbounded
        const Vec& v = fan.directions[i];
        for (size_t j = 0; j < fan.directions.size(); ++j) {
            if (i == j) continue;
            double ang = angle_between(v, fan.directions[j]);
            if (ang > 0.25 || ang < 1e-9) continue;
            if (rho[j] <= rho[i] + 0.05) continue;
            // a neighbor sits higher; upper semicontinuity only fails when the
            // exceedance survives the approach to v
            Vec t = fan.directions[j] - dot(fan.directions[j], v) * v;
            if (norm(t) < 1e-12) continue;
            t = normalized(t);
            bool persistent = true;
            for (double theta = 0.1; theta >= 1e-3; theta *= 0.5) {
                Vec w = std::cos(theta) * v + std::sin(theta) * t;
                auto r = rho_at(w);
                if (!r || *r <= rho[i] + 0.05) {
                    persistent = false;
                    break;
                }
            }
            if (persistent) {
                rep.violations.push_back("rho jumps up approaching " + to_string(v, s.ambient_dim));
                break;
            }
        }
    }
    return rep;
}

DenkowskiReport denkowski_equality_check(const Scene& s, const Vec& a, const Tolerances& tol) {
    DenkowskiReport rep;
    rep.r_reach = reaching_radius(s, a, tol);
    rep.r_bd = bd_radius(s, a, default_etas(), tol);
    rep.both_unbounded = is_unbounded(rep.r_reach, tol) && is_unbounded(rep.r_bd, tol);
    rep.pass = rep.both_unbounded || std::abs(rep.r_reach - rep.r_bd) <= 5e-2;
    return rep;
}

}  // namespace medialkit
