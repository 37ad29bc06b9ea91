#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace medialkit {

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct OffPrimitive : Error { using Error::Error; };
struct NotOnX : Error { using Error::Error; };
struct OnX : Error { using Error::Error; };
struct OnMedial : Error { using Error::Error; };
struct NoCrossing : Error { using Error::Error; };
struct EmptyRegion : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };
struct EmptyCloud : Error { using Error::Error; };
struct BadWitness : Error { using Error::Error; };
struct ProbeOnX : Error { using Error::Error; };
struct NotNormal : Error { using Error::Error; };
struct DirectionNotLimiting : Error { using Error::Error; };
struct RadiusTooSmall : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Vectors. Scenes are 2- or 3-dimensional; 2D data keeps z == 0 so one vector
// type serves both ambient dimensions.

struct Vec {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec() = default;
    Vec(double x_, double y_) : x(x_), y(y_) {}
    Vec(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec operator-() const { return {-x, -y, -z}; }
    Vec& operator+=(const Vec& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec& operator-=(const Vec& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

inline double dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec cross(const Vec& a, const Vec& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec& v) { return dot(v, v); }
inline double norm(const Vec& v) { return std::sqrt(norm2(v)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

inline bool is_finite(const Vec& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

inline Vec normalized(const Vec& v) {
    double n = norm(v);
    if (n == 0.0) throw ValidationError("cannot normalize a zero vector");
    return v / n;
}

// Angle between two unit vectors, in radians.
inline double angle_between(const Vec& u, const Vec& v) {
    double c = dot(u, v);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}

// Deterministic unit vector orthogonal to d (d need not be unit).
inline Vec any_orthogonal(const Vec& d) {
    Vec e = std::abs(d.x) <= std::abs(d.y)
                ? (std::abs(d.x) <= std::abs(d.z) ? Vec{1, 0, 0} : Vec{0, 0, 1})
                : (std::abs(d.y) <= std::abs(d.z) ? Vec{0, 1, 0} : Vec{0, 0, 1});
    Vec w = e - d * (dot(e, d) / norm2(d));
    return normalized(w);
}

std::string to_string(const Vec& v, int dim = 3);

// ---------------------------------------------------------------------------
// Tolerance policy. One immutable bundle threaded through every query.

struct Tolerances {
    double eps_dist = 1e-9;     // distance agreement
    double eps_cluster = 1e-5;  // nearest-point cluster merge radius
    double eps_unit = 1e-6;     // unit-vector normalization slack
    double sep_tol = 1e-3;      // medial-axis separation threshold
    double t_max = 1e6;         // cap standing in for an unbounded radius
    std::uint64_t seed = 42;    // deterministic sampling

    void validate() const;
};

Tolerances default_tolerances();

inline bool is_unbounded(double r, const Tolerances& tol) { return r >= tol.t_max; }

// ---------------------------------------------------------------------------
// Deterministic sampling. splitmix64 keeps streams reproducible across
// platforms and standard libraries.

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vec in_box(const Vec& lo, const Vec& hi, int dim) {
        Vec p{uniform(lo.x, hi.x), uniform(lo.y, hi.y), 0.0};
        if (dim == 3) p.z = uniform(lo.z, hi.z);
        return p;
    }

    Vec unit_dir(int dim) {
        if (dim == 2) {
            double t = uniform() * 2.0 * M_PI;
            return {std::cos(t), std::sin(t)};
        }
        // Marsaglia-free: inverse-CDF on the sphere
        double zc = uniform(-1.0, 1.0);
        double t = uniform() * 2.0 * M_PI;
        double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        return {r * std::cos(t), r * std::sin(t), zc};
    }
};

// n evenly spread unit directions on the circle, phase 0 so the coordinate
// axes are included when 4 | n.
std::vector<Vec> circle_directions(int n);

// Deterministic Fibonacci-lattice sample of the unit 2-sphere.
std::vector<Vec> fibonacci_sphere(int n);

}  // namespace medialkit
