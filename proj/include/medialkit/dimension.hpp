#pragma once

#include "medialkit/medial.hpp"

namespace medialkit {

struct DimensionEstimate {
    Vec anchor;
    std::vector<double> scales;
    std::vector<std::vector<double>> pca_spectra;  // per scale, eigenvalues descending
    int dim = 0;
    bool stable = false;
};

// Multiscale PCA dimension of a sampled set at an anchor. Both sets this
// estimator is used on (medial clouds and nearest sets) have empty interior,
// so estimates are capped at ambient_dim - 1; a crossing of two sheets then
// reports the sheet dimension instead of a spurious full-dimensional blob.
DimensionEstimate local_dim(const std::vector<Vec>& points, const Vec& a,
                            const std::vector<double>& scales, const Tolerances& tol,
                            int ambient_dim);

// dim m(a): PCA dimension of the nearest-set representative cloud, continuum
// sets resampled to >= 64 points.
DimensionEstimate dim_m(const Scene& s, const Vec& a, const Tolerances& tol);

struct DimFormulaReport {
    Vec anchor;
    int n = 2;
    int dim_a = 0;            // local dimension of M_X at the anchor
    int dim_m_pointwise = 0;  // dim m(anchor)
    int k_min = 0;            // min dim m over medial samples near the anchor
    bool formula_holds = false;   // dim_a + k_min == n - 1
    bool generic_point = false;   // pointwise sum already equals n - 1
};

DimFormulaReport verify_dim_formula(const Scene& s, const MedialCloud& cloud, const Vec& a,
                                    double neighborhood, const Tolerances& tol);

struct GlobalDimReport {
    int n = 2;
    int dim_medial = 0;  // max local dimension over sampled anchors
    int min_dim_m = 0;
    bool formula_holds = false;  // dim_medial == n - 1 - min_dim_m
};

GlobalDimReport global_dim(const Scene& s, const MedialCloud& cloud, const Tolerances& tol);

}  // namespace medialkit
