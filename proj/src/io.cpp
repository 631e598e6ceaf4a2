#include "qmx/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmx {

namespace {

constexpr char kMagic[4] = {'Q', 'M', 'X', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(char* dst, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}
std::uint32_t get_u32(const char* src) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    return v;
}
void put_f64(char* dst, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) dst[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
}
double get_f64(const char* src) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_field_dump(const std::filesystem::path& path, const FieldState& state) {
    char header[64] = {};
    std::memcpy(header, kMagic, 4);
    put_u32(header + 4, kVersion);
    for (int a = 0; a < 3; ++a)
        put_u32(header + 8 + 4 * a, static_cast<std::uint32_t>(state.grid().cells_per_axis[a]));
    for (int a = 0; a < 3; ++a) put_f64(header + 24 + 8 * a, state.grid().spacing[a]);
    put_f64(header + 48, state.time());

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_field_dump: cannot open " + path.string());
    os.write(header, sizeof header);
    std::vector<char> buf(state.values().size() * 8);
    for (std::size_t i = 0; i < state.values().size(); ++i) put_f64(buf.data() + 8 * i, state.values()[i]);
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw std::runtime_error("write_field_dump: write failed for " + path.string());
}

FieldState read_field_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_field_dump: cannot open " + path.string());
    char header[64];
    is.read(header, sizeof header);
    if (!is || std::memcmp(header, kMagic, 4) != 0)
        throw std::runtime_error("read_field_dump: bad magic in " + path.string());
    if (get_u32(header + 4) != kVersion)
        throw std::runtime_error("read_field_dump: unsupported version");

    GridSpec grid;
    for (int a = 0; a < 3; ++a) grid.cells_per_axis[a] = static_cast<int>(get_u32(header + 8 + 4 * a));
    for (int a = 0; a < 3; ++a) grid.spacing[a] = get_f64(header + 24 + 8 * a);
    const double time = get_f64(header + 48);

    FieldState state(grid, time);
    std::vector<char> buf(state.values().size() * 8);
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!is) throw std::runtime_error("read_field_dump: truncated data in " + path.string());
    for (std::size_t i = 0; i < state.values().size(); ++i) state.values()[i] = get_f64(buf.data() + 8 * i);
    return state;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void NormSeriesWriter::add(double t, const std::string& kind, int order, double gamma, double value) {
    rows_ += format_double(t) + "," + kind + "," + std::to_string(order) + "," +
             format_double(gamma) + "," + format_double(value) + "\n";
}

void NormSeriesWriter::write(const std::filesystem::path& path) const {
    atomic_write_text(path, "t,norm_kind,order,gamma,value\n" + rows_);
}

void write_energy_csv(const std::filesystem::path& path, const EnergyRecord& record) {
    std::string text = "t,energy,source_norm,boundary_norm,ratio\n";
    for (std::size_t i = 0; i < record.t.size(); ++i) {
        text += format_double(record.t[i]) + "," + format_double(record.energy[i]) + "," +
                format_double(record.source_norm[i]) + "," + format_double(record.boundary_norm[i]) +
                "," + format_double(record.ratio[i]) + "\n";
    }
    atomic_write_text(path, text);
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("atomic_write_text: cannot open " + tmp.string());
        os.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!os) throw std::runtime_error("atomic_write_text: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string file_hash_hex(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("file_hash_hex: cannot open " + path.string());
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (is) {
        is.read(buf, sizeof buf);
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace qmx
