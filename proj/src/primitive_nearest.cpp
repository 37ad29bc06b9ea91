#include <algorithm>
#include <functional>
#include <optional>

#include "medialkit/scene.hpp"

namespace medialkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
    double dist = kInf;
    Vec point;
};

// A parametric curve with possible gaps (nullopt) used for constrained
// nearest-point search along patch boundaries.
struct CurveScan {
    std::function<std::optional<Vec>(double)> pos;
    double s0 = 0.0, s1 = 1.0;
    bool periodic = false;
};

using Validity = std::function<bool(const Vec&)>;

// stable roots of t^2 + 2 b t + c = 0; returns false when complex
bool quadratic_roots(double b, double c, double& r_lo, double& r_hi) {
    double disc = b * b - c;
    if (disc < 0) return false;
    double sq = std::sqrt(disc);
    double q = -(b + (b >= 0 ? sq : -sq));
    double r1 = q;
    double r2 = std::abs(q) > 1e-300 ? c / q : -b;
    r_lo = std::min(r1, r2);
    r_hi = std::max(r1, r2);
    return true;
}

double eval_curve(const CurveScan& c, const Validity& valid, const Vec& x, double s, Vec* out) {
    auto p = c.pos(s);
    if (!p || !valid(*p)) return kInf;
    if (out) *out = *p;
    return dist(x, *p);
}

// Grid-shrink minimisation over [lo, hi]; tolerant of gaps and kinks. Always
// contracts around the best parameter seen so far.
Candidate refine_bracket(const CurveScan& c, const Validity& valid, const Vec& x, double lo,
                         double hi) {
    Candidate best;
    double s_best = 0.5 * (lo + hi);
    for (int level = 0; level < 20; ++level) {
        const int m = 12;
        for (int k = 0; k <= m; ++k) {
            double s = lo + (hi - lo) * k / m;
            Vec p;
            double d = eval_curve(c, valid, x, s, &p);
            if (d < best.dist) {
                best = {d, p};
                s_best = s;
            }
        }
        if (best.dist == kInf) break;
        double step = (hi - lo) / m;
        lo = s_best - step;
        hi = s_best + step;
    }
    return best;
}

void scan_curve_candidates(const CurveScan& c, const Validity& valid, const Vec& x, int coarse_n,
                           std::vector<Candidate>& out) {
    const int n = coarse_n;
    std::vector<double> ss(n + 1), dd(n + 1);
    for (int i = 0; i <= n; ++i) {
        double s = c.s0 + (c.s1 - c.s0) * i / n;
        ss[i] = s;
        dd[i] = eval_curve(c, valid, x, s, nullptr);
    }
    auto at = [&](int i) {
        if (c.periodic) {
            int m = ((i % n) + n) % n;
            return dd[m];
        }
        if (i < 0 || i > n) return kInf;
        return dd[i];
    };
    int last = c.periodic ? n - 1 : n;
    for (int i = 0; i <= last; ++i) {
        if (dd[i] == kInf) continue;
        if (dd[i] <= at(i - 1) && dd[i] <= at(i + 1)) {
            double lo = ss[i] - (c.s1 - c.s0) / n;
            double hi = ss[i] + (c.s1 - c.s0) / n;
            out.push_back(refine_bracket(c, valid, x, lo, hi));
        }
    }
    // validity transitions: the constrained minimum can sit on the edge of a
    // gap; bisect to the valid-side limit
    for (int i = 0; i < last + (c.periodic ? 1 : 0); ++i) {
        double d0 = at(i), d1 = at(i + 1);
        if ((d0 == kInf) == (d1 == kInf)) continue;
        double a = ss[i % (n + 1)], b = ss[i % (n + 1)] + (c.s1 - c.s0) / n;
        bool a_valid = d0 != kInf;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (a + b);
            if ((eval_curve(c, valid, x, mid, nullptr) != kInf) == a_valid)
                a = mid;
            else
                b = mid;
        }
        double s = a_valid ? a : b;
        Vec p;
        double d = eval_curve(c, valid, x, s, &p);
        if (d < kInf) out.push_back({d, p});
    }
}

// ---------------------------------------------------------------------------
// Flat-valley spread. Around a refined minimum the eps_dist sublevel set can
// be genuinely wide (focal points); sample it so downstream clustering sees
// the near-minimal set rather than a single point.

template <class DistFn>
double sublevel_edge(DistFn&& f, double t0, double limit, double dstar, double eps) {
    double dir = limit >= t0 ? 1.0 : -1.0;
    double span = std::abs(limit - t0);
    if (span <= 0) return t0;
    double h = std::max(span / 4096.0, 1e-14);
    double inside = t0;
    while (true) {
        double t = inside + dir * h;
        if ((limit - t) * dir <= 0) {
            if (f(limit) <= dstar + eps) return limit;
            break;
        }
        if (f(t) <= dstar + eps) {
            inside = t;
            h *= 2.0;
        } else {
            break;
        }
    }
    double lo = inside, hi = inside + dir * std::min(h, std::abs(limit - inside));
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) <= dstar + eps)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

template <class DistFn, class PosFn>
void valley_reps(DistFn&& f, PosFn&& pos, double tstar, double dstar, double t_lo, double t_hi,
                 const Tolerances& tol, std::vector<Candidate>& out) {
    // stay strictly inside the eps_dist sublevel so spread points survive the
    // final |d - best| <= eps_dist filter
    double left = sublevel_edge(f, tstar, t_lo, dstar, 0.9 * tol.eps_dist);
    double right = sublevel_edge(f, tstar, t_hi, dstar, 0.9 * tol.eps_dist);
    Vec pl = pos(left), pr = pos(right);
    if (dist(pl, pr) >= 4.0 * tol.eps_cluster) {
        const int k = 9;
        for (int i = 0; i < k; ++i) {
            double t = left + (right - left) * i / (k - 1);
            out.push_back({f(t), pos(t)});
        }
    } else {
        out.push_back({f(tstar), pos(tstar)});
    }
}

// ---------------------------------------------------------------------------
// Aggregation

NearestResult gather(std::vector<Candidate>& cands, const Tolerances& tol,
                     const std::vector<Candidate>& continuum_cands) {
    NearestResult res;
    double best = kInf;
    for (const auto& c : cands) best = std::min(best, c.dist);
    for (const auto& c : continuum_cands) best = std::min(best, c.dist);
    res.distance = best;
    auto push = [&](const Candidate& c) {
        if (c.dist > best + tol.eps_dist) return;
        for (const auto& r : res.representatives)
            if (dist(r, c.point) <= 1e-8) return;
        if (res.representatives.size() < 4096) res.representatives.push_back(c.point);
    };
    for (const auto& c : cands) push(c);
    size_t before = res.representatives.size();
    for (const auto& c : continuum_cands) push(c);
    res.continuum = res.representatives.size() > before;
    return res;
}

// ---------------------------------------------------------------------------
// Point set / segment / line

NearestResult nearest_point_set(const PointSetPrim& p, const Vec& x, const Tolerances& tol) {
    std::vector<Candidate> cands;
    for (const auto& q : p.points) cands.push_back({dist(x, q), q});
    std::vector<Candidate> none;
    return gather(cands, tol, none);
}

NearestResult nearest_segment(const SegmentPrim& p, const Vec& x, const Tolerances& tol) {
    Vec d = p.b - p.a;
    double t = std::clamp(dot(x - p.a, d) / norm2(d), 0.0, 1.0);
    Vec foot = p.a + t * d;
    std::vector<Candidate> cands{{dist(x, foot), foot}}, none;
    return gather(cands, tol, none);
}

NearestResult nearest_line(const LinePrim& p, const Vec& x, const Tolerances& tol) {
    double t = std::clamp(dot(x - p.point, p.dir), p.t_min, p.t_max);
    Vec foot = p.point + t * p.dir;
    std::vector<Candidate> cands{{dist(x, foot), foot}}, none;
    return gather(cands, tol, none);
}

// ---------------------------------------------------------------------------
// Arc

double wrap_into(double theta, double lo) {
    while (theta < lo) theta += 2.0 * M_PI;
    while (theta >= lo + 2.0 * M_PI) theta -= 2.0 * M_PI;
    return theta;
}

NearestResult nearest_arc(const ArcPrim& p, const Vec& x, const Tolerances& tol, int rep_budget) {
    Vec w = x - p.center;
    double wu = dot(w, p.u), wv = dot(w, p.v);
    double rho = std::hypot(wu, wv);
    double h2 = norm2(w - wu * p.u - wv * p.v);  // off-plane residual, cancellation-free
    double span = p.ang1 - p.ang0;

    std::vector<Candidate> cands, cont;
    if (rho <= 1e-13) {
        // on the axis through the center: the whole arc is equidistant
        double d = std::sqrt(p.radius * p.radius + h2);
        int count = rep_budget > 0 ? rep_budget : int(std::ceil(span / 0.4)) + 1;
        count = std::max(count, 2);
        bool full = p.full_circle();
        int m = full ? count : count - 1;
        for (int i = 0; i < (full ? m : m + 1); ++i) {
            double th = p.ang0 + span * i / m;
            cont.push_back({d, p.at(th)});
        }
        return gather(cands, tol, cont);
    }

    double theta_star = std::atan2(wv, wu);
    auto fdist = [&](double th) {
        // grouped to avoid cancellation for queries near the carrier circle
        double sh = std::sin(0.5 * (th - theta_star));
        double d2 = (rho - p.radius) * (rho - p.radius) + 4.0 * p.radius * rho * sh * sh + h2;
        return std::sqrt(std::max(0.0, d2));
    };
    auto fpos = [&](double th) { return p.at(th); };

    if (p.full_circle()) {
        valley_reps(fdist, fpos, theta_star, fdist(theta_star), theta_star - M_PI,
                    theta_star + M_PI, tol, cands);
    } else {
        double th = wrap_into(theta_star, p.ang0);
        if (th <= p.ang1) {
            valley_reps(fdist, fpos, th, fdist(th), p.ang0, p.ang1, tol, cands);
        } else {
            // outside the angular range: candidates at both endpoints
            cands.push_back({fdist(p.ang0), p.at(p.ang0)});
            cands.push_back({fdist(p.ang1), p.at(p.ang1)});
        }
    }
    return gather(cands, tol, cont);
}

// ---------------------------------------------------------------------------
// Sphere patch

void sphere_trim_curves(const SpherePatchPrim& sp, const Trim& trim, std::vector<CurveScan>& out) {
    switch (trim.type) {
        case Trim::Type::Halfspace: {
            Vec n = trim.normal;
            double dpl = trim.offset - dot(sp.center, n);
            if (std::abs(dpl) > sp.radius) return;
            Vec c0 = sp.center + dpl * n;
            double rc = std::sqrt(std::max(0.0, sp.radius * sp.radius - dpl * dpl));
            Vec e1 = any_orthogonal(n), e2 = cross(n, e1);
            out.push_back({[=](double s) -> std::optional<Vec> {
                               return c0 + rc * (std::cos(s) * e1 + std::sin(s) * e2);
                           },
                           0.0, 2.0 * M_PI, true});
            return;
        }
        case Trim::Type::OutsideBall: {
            Vec w = trim.center - sp.center;
            double d = norm(w);
            if (d <= 1e-12) return;
            if (d > sp.radius + trim.radius || d < std::abs(sp.radius - trim.radius)) return;
            double a = (d * d + sp.radius * sp.radius - trim.radius * trim.radius) / (2.0 * d);
            double rc2 = sp.radius * sp.radius - a * a;
            if (rc2 <= 0) return;
            Vec axis = w / d;
            Vec c0 = sp.center + a * axis;
            double rc = std::sqrt(rc2);
            Vec e1 = any_orthogonal(axis), e2 = cross(axis, e1);
            out.push_back({[=](double s) -> std::optional<Vec> {
                               return c0 + rc * (std::cos(s) * e1 + std::sin(s) * e2);
                           },
                           0.0, 2.0 * M_PI, true});
            return;
        }
        case Trim::Type::OutsideCylinder: {
            Vec ad = trim.axis_dir;
            Vec cu = any_orthogonal(ad), cv = cross(ad, cu);
            Vec c = sp.center;
            double R = sp.radius, r = trim.radius;
            Vec ap = trim.axis_point;
            for (int branch = 0; branch <= 1; ++branch) {
                out.push_back({[=](double phi) -> std::optional<Vec> {
                                   Vec base = ap + r * (std::cos(phi) * cu + std::sin(phi) * cv);
                                   double beta = dot(base - c, ad);
                                   double gamma = norm2(base - c) - R * R;
                                   double lo, hi;
                                   if (!quadratic_roots(beta, gamma, lo, hi)) return std::nullopt;
                                   return base + (branch ? hi : lo) * ad;
                               },
                               0.0, 2.0 * M_PI, true});
            }
            return;
        }
        case Trim::Type::AnyOf:
            for (const auto& m : trim.members) sphere_trim_curves(sp, m, out);
            return;
    }
}

NearestResult nearest_sphere_patch(const SpherePatchPrim& p, const Vec& x, const Tolerances& tol,
                                   int rep_budget) {
    std::vector<Candidate> cands, cont;
    Validity valid = [&](const Vec& q) { return trims_contain(p.trims, q, 1e-9); };

    Vec w = x - p.center;
    double nw = norm(w);
    if (nw > 1e-13) {
        Vec proj = p.center + (p.radius / nw) * w;
        if (valid(proj)) cands.push_back({std::abs(nw - p.radius), proj});
    } else {
        int budget = std::max(rep_budget, 64);
        for (const auto& u : fibonacci_sphere(budget)) {
            Vec q = p.center + p.radius * u;
            if (valid(q)) cont.push_back({p.radius, q});
        }
    }

    std::vector<CurveScan> curves;
    for (const auto& t : p.trims) sphere_trim_curves(p, t, curves);
    for (const auto& c : curves) scan_curve_candidates(c, valid, x, 256, cands);
    return gather(cands, tol, cont);
}

// ---------------------------------------------------------------------------
// Cylinder patch

void cylinder_trim_curves(const CylinderPatchPrim& cp, const Trim& trim,
                          std::vector<CurveScan>& out, std::vector<Candidate>& direct,
                          const Vec& x, const Validity& valid) {
    auto line_candidate = [&](const Vec& base, const Vec& dir, double lo, double hi) {
        double t = std::clamp(dot(x - base, dir), lo, hi);
        Vec q = base + t * dir;
        if (valid(q)) direct.push_back({dist(x, q), q});
    };
    switch (trim.type) {
        case Trim::Type::Halfspace: {
            Vec n = trim.normal;
            double dn = dot(cp.axis_dir, n);
            double A = cp.radius * dot(cp.u, n), B = cp.radius * dot(cp.v, n);
            double C = trim.offset - dot(cp.axis_point, n);
            if (std::abs(dn) > 1e-9) {
                out.push_back({[=, &cp](double phi) -> std::optional<Vec> {
                                   double t = (C - A * std::cos(phi) - B * std::sin(phi)) / dn;
                                   return cp.at(phi, t);
                               },
                               0.0, 2.0 * M_PI, true});
            } else {
                double h = std::hypot(A, B);
                if (h < std::abs(C)) return;
                double base_ang = std::atan2(B, A);
                double da = std::acos(std::clamp(C / h, -1.0, 1.0));
                for (double phi : {base_ang + da, base_ang - da}) {
                    Vec base = cp.axis_point + cp.radius * (std::cos(phi) * cp.u + std::sin(phi) * cp.v);
                    line_candidate(base, cp.axis_dir, cp.t_min, cp.t_max);
                }
            }
            return;
        }
        case Trim::Type::OutsideBall: {
            Vec q = trim.center;
            double rho = trim.radius;
            for (int branch = 0; branch <= 1; ++branch) {
                out.push_back({[=, &cp](double phi) -> std::optional<Vec> {
                                   Vec base = cp.axis_point +
                                              cp.radius * (std::cos(phi) * cp.u + std::sin(phi) * cp.v);
                                   double beta = dot(base - q, cp.axis_dir);
                                   double gamma = norm2(base - q) - rho * rho;
                                   double lo, hi;
                                   if (!quadratic_roots(beta, gamma, lo, hi)) return std::nullopt;
                                   return base + (branch ? hi : lo) * cp.axis_dir;
                               },
                               0.0, 2.0 * M_PI, true});
            }
            return;
        }
        case Trim::Type::OutsideCylinder: {
            Vec q2 = trim.axis_point, d2 = trim.axis_dir;
            double rho2 = trim.radius;
            auto reject = [d2](const Vec& w) { return w - dot(w, d2) * d2; };
            Vec mad = reject(cp.axis_dir);
            double a2 = norm2(mad);
            if (a2 > 1e-12) {
                for (int branch = 0; branch <= 1; ++branch) {
                    out.push_back({[=, &cp](double phi) -> std::optional<Vec> {
                                       Vec base = cp.axis_point + cp.radius * (std::cos(phi) * cp.u +
                                                                               std::sin(phi) * cp.v);
                                       Vec mb = reject(base - q2);
                                       double bb = dot(mb, mad) / a2;
                                       double cc = (norm2(mb) - rho2 * rho2) / a2;
                                       double lo, hi;
                                       if (!quadratic_roots(bb, cc, lo, hi)) return std::nullopt;
                                       return base + (branch ? hi : lo) * cp.axis_dir;
                                   },
                                   0.0, 2.0 * M_PI, true});
                }
            } else {
                // parallel axes: boundary lines at angles where the wall touches
                // the trim cylinder
                const int n = 512;
                auto f = [&](double phi) {
                    Vec base = cp.axis_point + cp.radius * (std::cos(phi) * cp.u + std::sin(phi) * cp.v);
                    return norm(reject(base - q2)) - rho2;
                };
                double prev = f(0.0);
                for (int i = 1; i <= n; ++i) {
                    double phi = 2.0 * M_PI * i / n;
                    double cur = f(phi);
                    if ((prev <= 0) != (cur <= 0)) {
                        double lo = 2.0 * M_PI * (i - 1) / n, hi = phi;
                        for (int k = 0; k < 60; ++k) {
                            double mid = 0.5 * (lo + hi);
                            if ((f(mid) <= 0) == (prev <= 0))
                                lo = mid;
                            else
                                hi = mid;
                        }
                        Vec base = cp.axis_point +
                                   cp.radius * (std::cos(hi) * cp.u + std::sin(hi) * cp.v);
                        line_candidate(base, cp.axis_dir, cp.t_min, cp.t_max);
                    }
                    prev = cur;
                }
            }
            return;
        }
        case Trim::Type::AnyOf:
            for (const auto& m : trim.members) cylinder_trim_curves(cp, m, out, direct, x, valid);
            return;
    }
}

NearestResult nearest_cylinder_patch(const CylinderPatchPrim& p, const Vec& x,
                                     const Tolerances& tol, int rep_budget) {
    std::vector<Candidate> cands, cont;
    Validity valid = [&](const Vec& q) {
        double t = dot(q - p.axis_point, p.axis_dir);
        if (t < p.t_min - 1e-9 || t > p.t_max + 1e-9) return false;
        if (!p.full_angle()) {
            Vec w = q - p.axis_point - t * p.axis_dir;
            double th = wrap_into(std::atan2(dot(w, p.v), dot(w, p.u)), p.ang0);
            if (th > p.ang1 + 1e-9) return false;
        }
        return trims_contain(p.trims, q, 1e-9);
    };

    Vec w = x - p.axis_point;
    double t = dot(w, p.axis_dir);
    Vec radial = w - t * p.axis_dir;
    double rho = norm(radial);
    if (rho > 1e-13) {
        Vec proj = p.axis_point + t * p.axis_dir + (p.radius / rho) * radial;
        if (valid(proj)) cands.push_back({std::abs(rho - p.radius), proj});
    } else {
        double tc = std::clamp(t, p.t_min, p.t_max);
        double d = std::hypot(p.radius, t - tc);
        int count = std::max(rep_budget > 0 ? rep_budget : 16, 2);
        double span = p.ang1 - p.ang0;
        int m = p.full_angle() ? count : count - 1;
        for (int i = 0; i < (p.full_angle() ? m : m + 1); ++i) {
            double th = p.ang0 + span * i / m;
            Vec q = p.at(th, tc);
            if (valid(q)) cont.push_back({d, q});
        }
    }

    std::vector<CurveScan> curves;
    // axial rim circles
    for (double tr : {p.t_min, p.t_max}) {
        if (!std::isfinite(tr)) continue;
        double span = p.ang1 - p.ang0;
        curves.push_back({[=, &p](double phi) -> std::optional<Vec> { return p.at(phi, tr); },
                          p.ang0, p.ang1, p.full_angle() && span >= 2.0 * M_PI - 1e-12});
    }
    // angular edge lines
    if (!p.full_angle()) {
        for (double ae : {p.ang0, p.ang1}) {
            Vec base = p.axis_point + p.radius * (std::cos(ae) * p.u + std::sin(ae) * p.v);
            double tt = std::clamp(dot(x - base, p.axis_dir), p.t_min, p.t_max);
            Vec q = base + tt * p.axis_dir;
            if (valid(q)) cands.push_back({dist(x, q), q});
        }
    }
    for (const auto& trim : p.trims) cylinder_trim_curves(p, trim, curves, cands, x, valid);
    for (const auto& c : curves) scan_curve_candidates(c, valid, x, 256, cands);
    return gather(cands, tol, cont);
}

// ---------------------------------------------------------------------------
// Plane patch

bool polygon_contains(const std::vector<std::array<double, 2>>& poly, double px, double py) {
    bool in = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        double xi = poly[i][0], yi = poly[i][1];
        double xj = poly[j][0], yj = poly[j][1];
        bool crosses = (yi > py) != (yj > py);
        if (crosses && px < (xj - xi) * (py - yi) / (yj - yi) + xi) in = !in;
    }
    return in;
}

NearestResult nearest_plane_patch(const PlanePatchPrim& p, const Vec& x, const Tolerances& tol) {
    std::vector<Candidate> cands, cont;
    double h = dot(x - p.point, p.normal);
    Vec foot = x - h * p.normal;
    double pu = dot(foot - p.point, p.u), pv = dot(foot - p.point, p.v);
    if (polygon_contains(p.polygon, pu, pv)) cands.push_back({std::abs(h), foot});
    size_t n = p.polygon.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Vec a = p.point + p.polygon[j][0] * p.u + p.polygon[j][1] * p.v;
        Vec b = p.point + p.polygon[i][0] * p.u + p.polygon[i][1] * p.v;
        Vec d = b - a;
        double t = std::clamp(dot(x - a, d) / norm2(d), 0.0, 1.0);
        Vec q = a + t * d;
        cands.push_back({dist(x, q), q});
    }
    return gather(cands, tol, cont);
}

// ---------------------------------------------------------------------------
// Sampled curve (cubic spline interpolant)

NearestResult nearest_sampled_curve(const SampledCurvePrim& p, const Vec& x,
                                    const Tolerances& tol) {
    const CubicSpline& sp = *p.spline;
    auto f2 = [&](double t) { return norm2(sp.at(t) - x); };

    // coarse scan: knots and midpoints
    std::vector<double> ts;
    const auto& kn = sp.knots();
    ts.reserve(2 * kn.size());
    for (size_t i = 0; i + 1 < kn.size(); ++i) {
        ts.push_back(kn[i]);
        ts.push_back(0.5 * (kn[i] + kn[i + 1]));
    }
    ts.push_back(kn.back());

    std::vector<double> ds(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) ds[i] = f2(ts[i]);

    std::vector<double> minima;
    for (size_t i = 0; i < ts.size(); ++i) {
        double prev = i > 0 ? ds[i - 1] : kInf;
        double next = i + 1 < ts.size() ? ds[i + 1] : kInf;
        if (ds[i] > prev || ds[i] > next) continue;
        // Newton on g(t) = <gamma - x, gamma'>, bracketed
        double lo = i > 0 ? ts[i - 1] : ts[i];
        double hi = i + 1 < ts.size() ? ts[i + 1] : ts[i];
        double t = ts[i];
        int budget = std::max(8, p.refine_budget);
        for (int it = 0; it < budget; ++it) {
            Vec g = sp.at(t) - x, d1 = sp.deriv(t), d2 = sp.deriv2(t);
            double gp = dot(g, d1);
            double gpp = norm2(d1) + dot(g, d2);
            double step = gpp > 1e-300 ? gp / gpp : 0.0;
            double tn = std::clamp(t - step, lo, hi);
            if (std::abs(tn - t) < 1e-14 * std::max(1.0, std::abs(t))) {
                t = tn;
                break;
            }
            t = tn;
        }
        // fall back to a grid shrink when Newton stalls on a kinked bracket
        double ft = f2(t);
        if (ft > std::min(ds[i], std::min(prev, next))) {
            double a = lo, b = hi;
            double bd = kInf, bs = 0.5 * (a + b);
            for (int level = 0; level < 20; ++level) {
                const int m = 12;
                for (int k = 0; k <= m; ++k) {
                    double s = a + (b - a) * k / m;
                    double v = f2(s);
                    if (v < bd) {
                        bd = v;
                        bs = s;
                    }
                }
                double step = (b - a) / m;
                a = std::max(lo, bs - step);
                b = std::min(hi, bs + step);
            }
            t = bs;
        }
        minima.push_back(t);
    }
    minima.push_back(sp.t_begin());
    minima.push_back(sp.t_end());

    auto fd = [&](double t) { return std::sqrt(f2(t)); };
    auto fpos = [&](double t) { return sp.at(t); };
    double best = kInf;
    for (double t : minima) best = std::min(best, fd(t));

    std::vector<Candidate> cands, cont;
    for (double t : minima) {
        double d = fd(t);
        if (d <= best + tol.eps_cluster)
            valley_reps(fd, fpos, t, d, sp.t_begin(), sp.t_end(), tol, cands);
    }
    return gather(cands, tol, cont);
}

}  // namespace

NearestResult primitive_nearest(const Primitive& p, const Vec& x, const Tolerances& tol,
                                int rep_budget) {
    if (!is_finite(x)) throw ValidationError("query point must be finite");
    struct V {
        const Vec& x;
        const Tolerances& tol;
        int budget;
        NearestResult operator()(const PointSetPrim& s) const { return nearest_point_set(s, x, tol); }
        NearestResult operator()(const SegmentPrim& s) const { return nearest_segment(s, x, tol); }
        NearestResult operator()(const LinePrim& s) const { return nearest_line(s, x, tol); }
        NearestResult operator()(const ArcPrim& s) const { return nearest_arc(s, x, tol, budget); }
        NearestResult operator()(const SpherePatchPrim& s) const {
            return nearest_sphere_patch(s, x, tol, budget);
        }
        NearestResult operator()(const CylinderPatchPrim& s) const {
            return nearest_cylinder_patch(s, x, tol, budget);
        }
        NearestResult operator()(const PlanePatchPrim& s) const {
            return nearest_plane_patch(s, x, tol);
        }
        NearestResult operator()(const SampledCurvePrim& s) const {
            return nearest_sampled_curve(s, x, tol);
        }
    };
    return std::visit(V{x, tol, rep_budget}, p.shape);
}

}  // namespace medialkit
