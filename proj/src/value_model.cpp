#include "toolcache/value_model.hpp"

#include <algorithm>
#include <cmath>

#include "toolcache/errors.hpp"

namespace toolcache {

const Bounds& FeatureRange::of(Feature f) const {
    switch (f) {
        case Feature::Latency: return latency;
        case Feature::Cost: return cost;
        case Feature::Size: return size;
    }
    return latency;
}

namespace {

void extend(Bounds& b, double x) {
    if (b.count == 0) {
        b.min = b.max = x;
    } else {
        b.min = std::min(b.min, x);
        b.max = std::max(b.max, x);
    }
    ++b.count;
}

}  // namespace

FeatureRange observe(FeatureRange ranges, double latency_ms, double cost, double size_bytes) {
    for (double x : {latency_ms, cost, size_bytes}) {
        if (!std::isfinite(x) || x < 0.0) throw NonFiniteFeature("feature must be finite and >= 0");
    }
    extend(ranges.latency, latency_ms);
    extend(ranges.cost, cost);
    extend(ranges.size, size_bytes);
    return ranges;
}

double normalize(const FeatureRange& ranges, Feature f, double x, double epsilon) {
    const Bounds& b = ranges.of(f);
    if (b.count == 0) throw EmptyRange("no observations for feature");
    if (b.max == b.min) return 1.0;
    return std::clamp((x - b.min) / (b.max - b.min), epsilon, 1.0);
}

double caching_value(const PolicyConfig& cfg, double norm_latency, double norm_cost, double norm_size,
                     double ttl_seconds) {
    return cfg.lambda1 * norm_latency + cfg.lambda2 * (norm_cost / norm_size) -
           cfg.lambda3 * std::exp(-ttl_seconds / cfg.tau_s);
}

}  // namespace toolcache
