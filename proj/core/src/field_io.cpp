#include "srf/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <optional>
#include <vector>

#include "srf/error.hpp"

namespace srf {

namespace {

static_assert(sizeof(double) == 8);

template <typename T>
void put(std::string& buf, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto* p = reinterpret_cast<unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
    }
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

class Reader {
public:
    Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

    template <typename T>
    T take() {
        if (pos_ + sizeof(T) > size_) throw FormatError("value-function file: truncated");
        T v;
        std::memcpy(&v, data_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        if constexpr (std::endian::native == std::endian::big) {
            auto* p = reinterpret_cast<unsigned char*>(&v);
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
        }
        return v;
    }

    std::size_t remaining() const { return size_ - pos_; }

private:
    const char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& field, const FieldMeta& meta) {
    const Grid& g = field.grid();
    std::string buf;
    buf.reserve(32 + 24 * g.dims() + 8 * g.total_nodes());
    buf.append("SRFV", 4);
    put<std::uint32_t>(buf, kFieldFormatVersion);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.dims()));
    for (int a = 0; a < g.dims(); ++a) {
        put<double>(buf, g.lower(a));
        put<double>(buf, g.upper(a));
        put<std::uint64_t>(buf, g.count(a));
    }
    put<double>(buf, meta.gamma);
    put<double>(buf, meta.minval);
    put<std::uint8_t>(buf, meta.converged ? 1 : 0);
    for (double v : field.values()) put<double>(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write failed for " + path.string());
}

LoadedField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 4 || std::memcmp(buf.data(), "SRFV", 4) != 0) {
        throw FormatError(path.string() + ": bad magic");
    }
    Reader r(buf.data() + 4, buf.size() - 4);
    const auto version = r.take<std::uint32_t>();
    if (version != kFieldFormatVersion) {
        throw FormatError(path.string() + ": unsupported format version " + std::to_string(version));
    }
    const auto dims = r.take<std::uint32_t>();
    if (dims == 0 || dims > static_cast<std::uint32_t>(kMaxDims)) {
        throw FormatError(path.string() + ": unsupported dimension count " + std::to_string(dims));
    }
    std::vector<double> lower(dims), upper(dims);
    std::vector<std::size_t> counts(dims);
    for (std::uint32_t a = 0; a < dims; ++a) {
        lower[a] = r.take<double>();
        upper[a] = r.take<double>();
        const auto c = r.take<std::uint64_t>();
        if (c < 3 || c > (std::uint64_t{1} << 32)) {
            throw FormatError(path.string() + ": implausible axis count");
        }
        counts[a] = static_cast<std::size_t>(c);
    }
    FieldMeta meta;
    meta.gamma = r.take<double>();
    meta.minval = r.take<double>();
    meta.converged = r.take<std::uint8_t>() != 0;

    std::optional<Grid> grid;
    try {
        grid.emplace(lower, upper, counts);
    } catch (const Error& e) {
        throw FormatError(path.string() + ": inconsistent header: " + e.what());
    }
    if (r.remaining() != 8 * grid->total_nodes()) {
        throw FormatError(path.string() + ": value payload size mismatch");
    }
    std::vector<double> values(grid->total_nodes());
    for (auto& v : values) v = r.take<double>();
    return LoadedField{ScalarField(std::move(*grid), std::move(values)), meta};
}

}  // namespace srf
