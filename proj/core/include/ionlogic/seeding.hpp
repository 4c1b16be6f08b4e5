#pragma once

#include <cstdint>

namespace ionlogic {

/// SplitMix64 finalizer; a bijective 64-bit mix.
std::uint64_t splitmix64(std::uint64_t x);

/// Independent seed for sub-stream `index` of a run seeded with `seed`.
/// Results depend only on (seed, index), never on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ionlogic
