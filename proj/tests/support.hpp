#pragma once

// Small property-testing helpers: seeded generators and a for_all driver that
// reports the failing case index so a run can be replayed.

#include "plurilab/core.hpp"

#include <doctest.h>

#include <cstdint>
#include <string>

namespace testsupport {

using plurilab::Rng;

template <class Gen, class Prop>
void for_all(int runs, std::uint64_t seed, Gen gen, Prop prop) {
    Rng rng(seed);
    for (int i = 0; i < runs; ++i) {
        auto sample = gen(rng);
        INFO("case " << i << " (seed " << seed << ")");
        prop(sample);
    }
}

inline plurilab::Vec point_in_ball(int n, double radius, Rng& rng) {
    const double r = radius * std::pow(plurilab::uniform(rng), 1.0 / (2 * n));
    return r * plurilab::random_unit(n, rng);
}

}  // namespace testsupport
