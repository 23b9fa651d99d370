#pragma once

#include <cstdint>

#include "toolcache/model.hpp"

namespace toolcache {

enum class Feature { Latency, Cost, Size };

struct Bounds {
    double min = 0.0;
    double max = 0.0;
    std::uint64_t count = 0;

    bool operator==(const Bounds&) const = default;
};

// All-history min/max of the fulfillment measurements, shared across tools.
struct FeatureRange {
    Bounds latency;
    Bounds cost;
    Bounds size;

    const Bounds& of(Feature f) const;
    bool operator==(const FeatureRange&) const = default;
};

// Widens the bounds to cover one observation. Throws NonFiniteFeature for
// NaN/inf or negative inputs.
FeatureRange observe(FeatureRange ranges, double latency_ms, double cost, double size_bytes);

// Min-max normalization clamped to [epsilon, 1]; a degenerate range maps to 1.
// Throws EmptyRange before the first observation.
double normalize(const FeatureRange& ranges, Feature f, double x, double epsilon);

// lambda1*latency + lambda2*cost/size - lambda3*exp(-ttl/tau), all inputs
// normalized. Finite because size >= epsilon.
double caching_value(const PolicyConfig& cfg, double norm_latency, double norm_cost, double norm_size,
                     double ttl_seconds);

}  // namespace toolcache
