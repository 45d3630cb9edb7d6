#pragma once

namespace iqae {

inline constexpr const char* kVersion = "0.1.0";

// Recorded in output metadata so results can be tied to the exact stream
// construction.
inline constexpr const char* kRngName = "xoshiro256++";
inline constexpr const char* kStreamDerivation =
    "stream_seed = splitmix64_mix(master_seed + 0x9E3779B97F4A7C15 * "
    "(task_index + 1)); state = four successive splitmix64 outputs";

}  // namespace iqae
