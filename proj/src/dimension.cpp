#include "medialkit/dimension.hpp"

#include <algorithm>

namespace medialkit {

namespace {

// Jacobi eigenvalues of a symmetric 3x3 (2D data just leaves the z row zero).
std::array<double, 3> sym_eigenvalues(std::array<std::array<double, 3>, 3> m) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(m[0][1]) + std::abs(m[0][2]) + std::abs(m[1][2]);
        if (off < 1e-300) break;
        double scale = 0.0;
        for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(m[i][i]));
        if (off <= 1e-15 * std::max(scale, 1e-300)) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(m[p][q]) < 1e-300) continue;
                double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                std::array<std::array<double, 3>, 3> r = m;
                for (int k = 0; k < 3; ++k) {
                    r[p][k] = c * m[p][k] - s * m[q][k];
                    r[q][k] = s * m[p][k] + c * m[q][k];
                }
                m = r;
                for (int k = 0; k < 3; ++k) {
                    r[k][p] = c * m[k][p] - s * m[k][q];
                    r[k][q] = s * m[k][p] + c * m[k][q];
                }
                m = r;
            }
        }
    }
    std::array<double, 3> ev{m[0][0], m[1][1], m[2][2]};
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

std::vector<double> spectrum_at_scale(const std::vector<Vec>& points, const Vec& a, double r,
                                      int ambient_dim) {
    std::vector<Vec> in;
    for (const auto& p : points)
        if (dist(p, a) <= r) in.push_back(p);
    if (in.size() < 2) return {};
    Vec mean{0, 0, 0};
    for (const auto& p : in) mean += p;
    mean = mean / double(in.size());
    std::array<std::array<double, 3>, 3> cov{};
    for (const auto& p : in) {
        Vec d = p - mean;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += d[i] * d[j];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cov[i][j] /= double(in.size());
    auto ev = sym_eigenvalues(cov);
    std::vector<double> out(ev.begin(), ev.begin() + ambient_dim);
    return out;
}

int dim_from_spectrum(const std::vector<double>& ev, int ambient_dim) {
    if (ev.empty() || ev.front() <= 1e-30) return 0;
    int d = 0;
    for (double l : ev)
        if (l >= 0.01 * ev.front()) ++d;
    return std::min(d, ambient_dim - 1);
}

int count_within(const std::vector<Vec>& pts, const Vec& a, double r) {
    int n = 0;
    for (const auto& p : pts)
        if (dist(p, a) <= r) ++n;
    return n;
}

}  // namespace

DimensionEstimate local_dim(const std::vector<Vec>& points, const Vec& a,
                            const std::vector<double>& scales, const Tolerances& tol,
                            int ambient_dim) {
    (void)tol;
    if (scales.empty()) throw ValidationError("local_dim needs scales");
    for (size_t i = 0; i + 1 < scales.size(); ++i)
        if (!(scales[i] > scales[i + 1])) throw ValidationError("scales must be strictly decreasing");

    DimensionEstimate est;
    est.anchor = a;
    est.scales = scales;

    if (count_within(points, a, scales.back()) < 3) {
        est.dim = 0;  // isolated at the finest scale
        est.stable = true;
        return est;
    }
    if (count_within(points, a, scales.front()) < 8)
        throw TooFewSamples("fewer than 8 points within the largest scale");

    std::vector<int> dims;
    for (double r : scales) {
        auto ev = spectrum_at_scale(points, a, r, ambient_dim);
        est.pca_spectra.push_back(ev);
        dims.push_back(dim_from_spectrum(ev, ambient_dim));
    }
    est.dim = dims.back();
    est.stable = dims.size() < 2 || dims[dims.size() - 1] == dims[dims.size() - 2];
    return est;
}

DimensionEstimate dim_m(const Scene& s, const Vec& a, const Tolerances& tol) {
    NearestSet ns = nearest_set(s, a, tol);
    if (ns.distance <= tol.eps_dist) throw OnX("dim_m requested on X");

    std::vector<Vec> reps;
    if (ns.continuum) {
        NearestSet dense = nearest_set(s, a, tol, 128);
        for (const auto& c : dense.clusters)
            for (const auto& m : c.members) reps.push_back(m);
    } else {
        for (const auto& c : ns.clusters)
            for (const auto& m : c.members) reps.push_back(m);
    }

    DimensionEstimate est;
    est.anchor = a;
    if (reps.size() <= 4) {
        est.dim = 0;
        est.stable = true;
        return est;
    }

    double diam = 0.0;
    for (size_t i = 0; i < reps.size(); ++i)
        for (size_t j = i + 1; j < reps.size(); ++j) diam = std::max(diam, dist(reps[i], reps[j]));
    if (diam <= tol.sep_tol) {
        est.dim = 0;
        est.stable = true;
        return est;
    }
    std::vector<double> scales{0.2 * diam, 0.1 * diam, 0.05 * diam};

    // the set dimension is the max of local estimates over spread anchors
    int best = 0;
    bool stable = true;
    size_t stride = std::max<size_t>(1, reps.size() / 8);
    DimensionEstimate kept;
    for (size_t i = 0; i < reps.size(); i += stride) {
        DimensionEstimate e;
        try {
            e = local_dim(reps, reps[i], scales, tol, s.ambient_dim);
        } catch (const TooFewSamples&) {
            continue;
        }
        if (e.dim > best) {
            best = e.dim;
            stable = e.stable;
            kept = e;
        }
    }
    est = kept;
    est.anchor = a;
    est.scales = scales;
    est.dim = best;
    est.stable = stable;
    return est;
}

DimFormulaReport verify_dim_formula(const Scene& s, const MedialCloud& cloud, const Vec& a,
                                    double neighborhood, const Tolerances& tol) {
    DimFormulaReport rep;
    rep.anchor = a;
    rep.n = s.ambient_dim;

    std::vector<Vec> pts;
    pts.reserve(cloud.samples.size());
    for (const auto& m : cloud.samples) pts.push_back(m.point);
    std::vector<double> scales{0.4, 0.2, 0.1};
    rep.dim_a = local_dim(pts, a, scales, tol, s.ambient_dim).dim;
    rep.dim_m_pointwise = dim_m(s, a, tol).dim;

    std::vector<const MedialSample*> near;
    for (const auto& m : cloud.samples)
        if (dist(m.point, a) <= neighborhood) near.push_back(&m);
    if (near.empty()) throw EmptyCloud("no medial samples within the neighborhood");
    size_t stride = std::max<size_t>(1, near.size() / 200);
    int kmin = std::numeric_limits<int>::max();
    for (size_t i = 0; i < near.size(); i += stride)
        kmin = std::min(kmin, dim_m(s, near[i]->point, tol).dim);
    rep.k_min = kmin;
    rep.formula_holds = rep.dim_a + rep.k_min == rep.n - 1;
    rep.generic_point = rep.dim_a + rep.dim_m_pointwise == rep.n - 1;
    return rep;
}

GlobalDimReport global_dim(const Scene& s, const MedialCloud& cloud, const Tolerances& tol) {
    if (cloud.samples.empty()) throw EmptyCloud("global_dim needs a nonempty cloud");
    GlobalDimReport rep;
    rep.n = s.ambient_dim;

    std::vector<Vec> pts;
    pts.reserve(cloud.samples.size());
    for (const auto& m : cloud.samples) pts.push_back(m.point);

    std::vector<double> scales{0.4, 0.2, 0.1};
    size_t stride = std::max<size_t>(1, pts.size() / 64);
    int dmax = 0;
    for (size_t i = 0; i < pts.size(); i += stride) {
        try {
            dmax = std::max(dmax, local_dim(pts, pts[i], scales, tol, s.ambient_dim).dim);
        } catch (const TooFewSamples&) {
        }
    }
    rep.dim_medial = dmax;

    stride = std::max<size_t>(1, pts.size() / 200);
    int kmin = std::numeric_limits<int>::max();
    for (size_t i = 0; i < pts.size(); i += stride)
        kmin = std::min(kmin, dim_m(s, pts[i], tol).dim);
    rep.min_dim_m = kmin;
    rep.formula_holds = rep.dim_medial == rep.n - 1 - rep.min_dim_m;
    return rep;
}

}  // namespace medialkit
