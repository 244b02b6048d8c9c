#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cellmix/footprint.hpp"

namespace cellmix::tensor_io {

/// Cache file layout (little-endian):
///   "CMFT" | u32 version | u32 k | u32 slots | u32 cells | u64 active
///   k x string codes | cells x string ids   (u32 length + bytes)
///   k x f64 totals | active x u32 slot | active x u32 cell | active*k x f64 counts
inline constexpr std::uint32_t kVersion = 1;

void write(std::ostream& out, const FootprintTensor& tensor);
/// Throws InputError on a bad magic, unknown version or truncated data.
FootprintTensor read(std::istream& in);

void save(const std::filesystem::path& path, const FootprintTensor& tensor);
FootprintTensor load(const std::filesystem::path& path);

/// Structured-text export for debugging.
std::string to_json_text(const FootprintTensor& tensor);

}  // namespace cellmix::tensor_io
