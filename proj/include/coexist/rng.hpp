#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace coexist {

// Labeled child streams derived from one root seed. Each subsystem draws from
// its own stream so that changing how often one subsystem draws never shifts
// another subsystem's sequence.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Combine a root seed with a label and up to two integer keys into a stream seed.
std::uint64_t stream_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t key_a = 0, std::uint64_t key_b = 0);

Rng make_stream(std::uint64_t root, std::string_view label,
                std::uint64_t key_a = 0, std::uint64_t key_b = 0);

// Standard labels used across the simulator.
namespace streams {
inline constexpr std::string_view kChannel = "channel";
inline constexpr std::string_view kFading = "fading";
inline constexpr std::string_view kTraffic = "traffic";
inline constexpr std::string_view kMobility = "mobility";
inline constexpr std::string_view kCompute = "compute";
inline constexpr std::string_view kGradientNoise = "gradient-noise";
inline constexpr std::string_view kTaskData = "task-data";
inline constexpr std::string_view kSelection = "selection";
inline constexpr std::string_view kAgentInit = "agent-init";
inline constexpr std::string_view kExploration = "exploration";
inline constexpr std::string_view kReplay = "replay-sampling";
inline constexpr std::string_view kLayout = "layout";
inline constexpr std::string_view kOutcome = "outcome";
inline constexpr std::string_view kScheduler = "scheduler";
}  // namespace streams

}  // namespace coexist
