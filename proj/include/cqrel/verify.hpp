#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqrel/channel.hpp"

namespace cqrel {

enum class SuiteLevel { fast, all };

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs every module's invariant suite. Randomized checks use fixed seeds;
/// channel-dependent checks run on the provided channel plus the built-in
/// bsc(0.1) and pure2(0.5) fixtures. `all` uses the full sample counts,
/// `fast` a reduced set.
std::vector<CheckResult> run_verification(const CqChannel& ch, SuiteLevel level,
                                          std::uint64_t seed = 0x5EEDBA5EULL);

}  // namespace cqrel
