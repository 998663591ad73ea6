#pragma once

#include <filesystem>

#include "srf/grid.hpp"

namespace srf {

/// Metadata carried alongside the grid samples in a value-function file.
struct FieldMeta {
    double gamma = 0.0;    ///< exponential decay rate used for the solve
    double minval = 0.0;   ///< c, the minimum of the infinite-horizon value
    bool converged = false;
};

struct LoadedField {
    ScalarField field;
    FieldMeta meta;
};

/// Binary layout (little-endian): "SRFV", u32 version (=1), u32 dims,
/// dims x { f64 lower, f64 upper, u64 count }, f64 gamma, f64 minval,
/// u8 converged, then f64 values row-major. Round-trips bit-exactly.
void write_field(const std::filesystem::path& path, const ScalarField& field, const FieldMeta& meta);

/// Throws FormatError on bad magic/version, truncation, or trailing bytes.
LoadedField read_field(const std::filesystem::path& path);

inline constexpr std::uint32_t kFieldFormatVersion = 1;

}  // namespace srf
