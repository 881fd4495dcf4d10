#pragma once

#include <cstdint>
#include <string>

namespace udcp {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a 64 over a byte string, as a 16-digit hex digest for run manifests.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace udcp
