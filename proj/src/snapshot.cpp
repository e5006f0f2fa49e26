#include "rotsmag/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rotsmag/errors.hpp"

namespace rotsmag {

namespace {

std::filesystem::path component_path(const std::filesystem::path& stem, const std::string& tag) {
    return std::filesystem::path(stem.string() + "." + tag + ".bin");
}

std::string header(const Grid& g, const std::string& tag, const Array3& arr) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "rotsmag-field dims=%d cells=%d,%d,%d spacing=%.17g,%.17g,%.17g component=%s shape=%d,%d,%d\n",
                  g.dims(), g.cells(0), g.cells(1), g.cells(2), g.spacing(0), g.spacing(1), g.spacing(2),
                  tag.c_str(), arr.n[0], arr.n[1], arr.n[2]);
    return buf;
}

void write_array(const Grid& g, const Array3& arr, const std::filesystem::path& path, const std::string& tag) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArgumentError("cannot open '" + path.string() + "' for writing");
    os << header(g, tag, arr);
    for (double v : arr.data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!os) throw ArgumentError("write to '" + path.string() + "' failed");
}

void read_array(const Grid& g, Array3& arr, const std::filesystem::path& path, const std::string& tag) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArgumentError("cannot open snapshot '" + path.string() + "'");
    std::string line;
    std::getline(is, line);
    if (line + "\n" != header(g, tag, arr)) {
        throw ArgumentError("snapshot '" + path.string() + "' does not match the grid: " + line);
    }
    for (double& v : arr.data) {
        std::uint64_t bits;
        if (!is.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
            throw ArgumentError("snapshot '" + path.string() + "' is truncated");
        }
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        std::memcpy(&v, &bits, sizeof v);
    }
}

}  // namespace

std::string component_tag(bool vector, int c) { return vector ? "u" + std::to_string(c) : "q"; }

void write_snapshot(const VectorField& u, const std::filesystem::path& stem) {
    for (int c = 0; c < u.components(); ++c) {
        const std::string tag = component_tag(true, c);
        write_array(u.grid(), u.component(c), component_path(stem, tag), tag);
    }
}

void write_snapshot(const ScalarField& f, const std::filesystem::path& stem) {
    write_array(f.grid(), f.component(0), component_path(stem, "q"), "q");
}

VectorField read_vector_snapshot(const Grid& grid, const std::filesystem::path& stem) {
    VectorField u(grid);
    for (int c = 0; c < u.components(); ++c) {
        const std::string tag = component_tag(true, c);
        read_array(grid, u.component(c), component_path(stem, tag), tag);
    }
    return u;
}

ScalarField read_scalar_snapshot(const Grid& grid, const std::filesystem::path& stem) {
    ScalarField f(grid);
    read_array(grid, f.component(0), component_path(stem, "q"), "q");
    return f;
}

}  // namespace rotsmag
