#pragma once

namespace ebt {

inline constexpr const char* kVersion = "1.0.0";

// Bumped whenever a CSV or JSON schema changes shape. Readers reject files
// whose recorded schema version does not match.
inline constexpr int kSchemaVersion = 1;

} // namespace ebt
