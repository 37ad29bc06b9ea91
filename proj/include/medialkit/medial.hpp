#pragma once

#include "medialkit/nearest.hpp"

namespace medialkit {

struct Region {
    Vec lo, hi;
    double step = 0.1;
};

struct MedialSample {
    Vec point;
    double distance = 0.0;
    int multiplicity = 0;
    double diameter = 0.0;
    bool refined = false;
};

struct MedialCloud {
    std::string scene_name;
    Region region;
    std::vector<MedialSample> samples;
};

// Virtual offset X^eps = {d <= eps}. Distances shift by eps and nearest sets
// are homothety images of the base ones, so no new geometry is built.
struct OffsetView {
    const Scene* base = nullptr;
    double eps = 0.0;

    double field_distance(const Vec& x) const;
    NearestSet field_nearest(const Vec& x, const Tolerances& tol, int rep_budget = 0) const;
    int dim() const { return base->ambient_dim; }
};

OffsetView offset_view(const Scene& s, double eps);

// Grid scan flagging points whose nearest set splits at the separation
// threshold. Detected clouds are sep_tol-medial approximations.
MedialCloud scan_medial(const Scene& s, const Region& r, const Tolerances& tol);
MedialCloud scan_medial(const OffsetView& v, const Region& r, const Tolerances& tol);

// Bisection sharpening of a medial crossing along [x0, x1].
Vec refine_crossing(const Scene& s, const Vec& x0, const Vec& x1, const Tolerances& tol);

struct OffsetMedialReport {
    int base_count = 0, offset_count = 0;
    double hausdorff_base_to_offset = 0.0;
    double hausdorff_offset_to_base = 0.0;
    std::vector<std::string> discrepancies;
    bool passed(double bound) const {
        return hausdorff_base_to_offset <= bound && hausdorff_offset_to_base <= bound;
    }
};

// The medial axes of X and X^eps must agree where d > eps + sep_tol.
OffsetMedialReport offset_medial_check(const Scene& s, double eps, const Region& r,
                                       const Tolerances& tol);

struct GammaProbeResult {
    Vec probe;
    bool lipschitz_ok = true;
    bool segment_ok = true;
    bool epigraph_ok = true;
    std::vector<std::string> notes;
    bool ok() const { return lipschitz_ok && segment_ok && epigraph_ok; }
};

struct GammaReport {
    std::vector<GammaProbeResult> probes;
    int violation_count() const {
        int n = 0;
        for (const auto& p : probes)
            if (!p.ok()) ++n;
        return n;
    }
    bool passed() const { return violation_count() == 0; }
};

// Distance-graph checks at probe points: the Lipschitz cone, linear decay
// toward each nearest point, and the epigraph nearest-set case formula.
GammaReport gamma_checks(const Scene& s, const std::vector<Vec>& probes, const Tolerances& tol);

}  // namespace medialkit
