#pragma once

#include <cstdint>
#include <random>

#include "rotsmag/fields.hpp"

namespace rotsmag::test {

/// Uniform fill of every stored entry in [-1, 1].
template <class Field>
void fill_random(Field& f, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int c = 0; c < f.components(); ++c)
        for (double& v : f.component(c).data) v = 2.0 * std::ldexp(static_cast<double>(rng() >> 11), -53) - 1.0;
}

}  // namespace rotsmag::test
