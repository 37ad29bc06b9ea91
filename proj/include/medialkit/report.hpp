#pragma once

#include <string>
#include <utility>
#include <vector>

#include "medialkit/cone.hpp"
#include "medialkit/medial.hpp"

namespace medialkit {

struct Assertion {
    std::string name;
    std::string expected;
    std::string actual;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::string command;
    std::string scene;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::pair<std::string, std::string>> results;
    std::vector<Assertion> assertions;

    void param(const std::string& k, const std::string& v) { parameters.push_back({k, v}); }
    void result(const std::string& k, const std::string& v) { results.push_back({k, v}); }
    void check(const std::string& name, double expected, double actual, double tolerance);
    void check_true(const std::string& name, bool ok, const std::string& detail = "");
    bool all_pass() const;
    std::string to_json() const;  // stable field order, deterministic formatting
};

std::string fmt(double v);
std::string fmt(const Vec& v, int dim);

// radius values at t_max print as "unbounded"
std::string fmt_radius(double r, const Tolerances& tol);

std::string medial_cloud_csv(const MedialCloud& cloud, int dim);
std::string spherical_cloud_csv(const SphericalCloud& cloud, int dim);

}  // namespace medialkit
