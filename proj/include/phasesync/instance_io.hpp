#pragma once

#include <cstdint>
#include <string>

#include "phasesync/model.hpp"

namespace phasesync {

/// Text instance format:
///
///   phasesync-instance 1
///   n <n>
///   sigma <shortest round-trip decimal>
///   seed <u64>
///   truth 0|1
///   Y
///   <n lines, each 2n tokens: re im re im ... of one row>
///   z              (only when truth = 1)
///   <one line, 2n tokens>
///
/// Every token is the 16-digit hexadecimal IEEE-754 bit pattern of a double,
/// so files round-trip exactly.
struct InstanceFile {
    Observation obs;
    std::uint64_t seed = 0;
};

std::string format_instance(const Observation& obs, std::uint64_t seed);
/// Throws InputError on malformed text and DomainError when Y is not a valid observation.
InstanceFile parse_instance(const std::string& text);

void write_instance(const std::string& path, const Observation& obs, std::uint64_t seed);
InstanceFile read_instance(const std::string& path);

}  // namespace phasesync
