#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpca/model.hpp"
#include "tpca/tensor.hpp"

namespace tpca {

// L(T) = offset + sum_j w_j T[j] over flat cells j.
struct LinearFunctional {
    std::vector<std::pair<std::size_t, double>> terms;
    double offset = 0.0;

    double eval(const Tensor& t) const;
    double mean(const Tensor& mu) const;
    double weight_norm2() const;
};

// Under any Gaussian tensor law, L(T) ~ N(mean, sd^2).
struct GaussLaw {
    double mean = 0.0;
    double sd = 0.0;
};

GaussLaw law_of(const LinearFunctional& L, const DistributionSpec& spec);

enum class MapKind { Identity, IndicatorGt, IndicatorLt, Slab, NegSlab, Custom };

// A scalar map x -> h(x). Slab ramps from 0 at lo to 1 at hi; NegSlab ramps
// from 1 at lo to 0 at hi. With tau > 0 the map is pre-smoothed:
// h_tau(x) = E h(x + tau Z).
struct ScalarMap {
    MapKind kind = MapKind::Identity;
    double lo = 0.0;
    double hi = 0.0;
    double tau = 0.0;
    std::function<double(double)> custom;

    static ScalarMap identity() { return {}; }
    static ScalarMap gt(double t) { return {MapKind::IndicatorGt, t, t, 0.0, {}}; }
    static ScalarMap lt(double t) { return {MapKind::IndicatorLt, t, t, 0.0, {}}; }
    static ScalarMap slab(double lo, double hi) { return {MapKind::Slab, lo, hi, 0.0, {}}; }
    static ScalarMap neg_slab(double lo, double hi) { return {MapKind::NegSlab, lo, hi, 0.0, {}}; }

    double operator()(double x) const;
    // E h(X + tau Z) for X ~ N(m, s^2).
    double gauss_mean(double m, double s) const;
    // +1 increasing, -1 decreasing, 0 unknown.
    int monotone() const;
    bool bounded_unit() const { return kind != MapKind::Identity && kind != MapKind::Custom; }
};

// E g(m + s Z) by adaptive Gauss-Kronrod, absolute tolerance 1e-10.
double gaussian_expectation(const std::function<double(double)>& g, double m, double s);

enum class Codomain { Unit, Bounded };

// q(T) = post(inner(L(T))) where post is optional and has no smoothing.
struct Query {
    LinearFunctional L;
    ScalarMap inner;
    std::optional<ScalarMap> post;
    Codomain codomain = Codomain::Bounded;
    double B = 1.0;  // second-moment bound for Bounded queries
    std::string tag;
    int polarity = 1;

    double eval(const Tensor& t) const;
    double value_at(double x) const;  // q as a function of L(T)
    double mean(const DistributionSpec& spec) const;
    double mean(const GaussLaw& law) const;
    double second_moment(const GaussLaw& law) const;

    static Query linear(LinearFunctional L, double B, std::string tag);
};

// Unit query 'map(q)' for a query q with Identity inner map and no post.
Query derive_unit(const Query& q, const ScalarMap& map, std::string tag, int polarity);

}  // namespace tpca
