#pragma once

#include <cstdint>
#include <string>

namespace crosswidth {

inline constexpr const char* kVersion = "1.0.0";

// 17 significant digits, so printed files reproduce the doubles exactly.
std::string num(double v);

// FNV-1a, for provenance hashes.
std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace crosswidth
