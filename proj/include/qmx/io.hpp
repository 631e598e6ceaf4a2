#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qmx/grid.hpp"
#include "qmx/linear_solver.hpp"
#include "qmx/norms.hpp"

namespace qmx {

/// Binary field dump: 64-byte header (magic "QMXF", u32 version, u32 dims[3],
/// f64 spacing[3], f64 time, zero padding) followed by node-major little-endian
/// f64 values, six components per node.
void write_field_dump(const std::filesystem::path& path, const FieldState& state);
FieldState read_field_dump(const std::filesystem::path& path);

/// Norm time series CSV with header `t,norm_kind,order,gamma,value`.
class NormSeriesWriter {
public:
    void add(double t, const std::string& kind, int order, double gamma, double value);
    void write(const std::filesystem::path& path) const;

private:
    std::string rows_;
};

void write_energy_csv(const std::filesystem::path& path, const EnergyRecord& record);

/// Writes text atomically (temp file + rename).
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

/// FNV-1a 64-bit hash of a file's bytes, hex-encoded.
std::string file_hash_hex(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace qmx
