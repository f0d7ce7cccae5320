#pragma once

// Binary snapshot persistence. Layout (all integers and doubles little-endian):
//   magic   8 bytes  "NLS6SNAP"
//   version u32      currently 1
//   type    u8       0 = radial grid, 1 = tensor grid
//   d       u32      spatial dimension
//   n       u64      cells (radial) or points per axis (tensor)
//   extent  f64      r_max (radial) or L (tensor)
//   kappa   f64
//   t       f64      simulation time of the sample
//   u       count complex values, (re, im) f64 interleaved
//   v       likewise
// where count = n for a radial grid and n^d for a tensor grid.
// Round-trip is bit-exact: doubles are persisted as raw IEEE-754 images.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nls6/field.hpp"
#include "nls6/grid.hpp"

namespace nls6 {

static_assert(std::endian::native == std::endian::little,
              "snapshot files are little-endian; this build targets LE hosts");

inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr char snapshot_magic[8] = {'N', 'L', 'S', '6', 'S', 'N', 'A', 'P'};

namespace detail {

template <class T>
void put_raw(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get_raw(std::istream& is, const char* what) {
    T value;
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw std::runtime_error(std::string("snapshot: truncated while reading ") + what);
    return value;
}

inline void put_field(std::ostream& os, const CField& f) {
    for (const Complex& z : f) {
        put_raw(os, z.real());
        put_raw(os, z.imag());
    }
}

inline CField get_field(std::istream& is, std::size_t count, const char* what) {
    CField f(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double re = get_raw<double>(is, what);
        const double im = get_raw<double>(is, what);
        f[i] = Complex{re, im};
    }
    return f;
}

inline void write_snapshot_header(std::ostream& os, std::uint8_t type, std::uint32_t d,
                                  std::uint64_t n, double extent, double kappa, double t) {
    os.write(snapshot_magic, sizeof(snapshot_magic));
    put_raw(os, snapshot_version);
    put_raw(os, type);
    put_raw(os, d);
    put_raw(os, n);
    put_raw(os, extent);
    put_raw(os, kappa);
    put_raw(os, t);
}

}  // namespace detail

struct LoadedSnapshot {
    std::uint8_t grid_type = 0;  // 0 radial, 1 tensor
    int d = 0;
    std::uint64_t n = 0;     // cells (radial) or points per axis (tensor)
    double extent = 0.0;     // r_max or L
    double kappa = 0.0;
    double t = 0.0;
    CField u, v;

    FieldPair<RadialGrid> as_radial_pair() const {
        if (grid_type != 0) throw std::runtime_error("snapshot: not a radial-grid snapshot");
        auto g = std::make_shared<const RadialGrid>(d, static_cast<std::size_t>(n), extent);
        return make_field_pair(std::move(g), u, v, kappa);
    }

    FieldPair<TensorGrid> as_tensor_pair() const {
        if (grid_type != 1) throw std::runtime_error("snapshot: not a tensor-grid snapshot");
        auto g = std::make_shared<const TensorGrid>(d, static_cast<std::size_t>(n), extent);
        return make_field_pair(std::move(g), u, v, kappa);
    }
};

inline void write_snapshot(const std::string& path, const FieldPair<RadialGrid>& fp, double t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("snapshot: cannot open for writing: " + path);
    const RadialGrid& g = *fp.grid;
    detail::write_snapshot_header(os, 0, static_cast<std::uint32_t>(g.d),
                                  static_cast<std::uint64_t>(g.n), g.r_max, fp.kappa, t);
    detail::put_field(os, fp.u);
    detail::put_field(os, fp.v);
    if (!os) throw std::runtime_error("snapshot: write failed: " + path);
}

inline void write_snapshot(const std::string& path, const FieldPair<TensorGrid>& fp, double t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("snapshot: cannot open for writing: " + path);
    const TensorGrid& g = *fp.grid;
    detail::write_snapshot_header(os, 1, static_cast<std::uint32_t>(g.d),
                                  static_cast<std::uint64_t>(g.m), g.L, fp.kappa, t);
    detail::put_field(os, fp.u);
    detail::put_field(os, fp.v);
    if (!os) throw std::runtime_error("snapshot: write failed: " + path);
}

inline LoadedSnapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, snapshot_magic, sizeof(magic)) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    const auto version = detail::get_raw<std::uint32_t>(is, "version");
    if (version != snapshot_version)
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
    LoadedSnapshot s;
    s.grid_type = detail::get_raw<std::uint8_t>(is, "grid type");
    if (s.grid_type > 1) throw std::runtime_error("snapshot: unknown grid type byte");
    s.d = static_cast<int>(detail::get_raw<std::uint32_t>(is, "dimension"));
    s.n = detail::get_raw<std::uint64_t>(is, "size");
    s.extent = detail::get_raw<double>(is, "extent");
    s.kappa = detail::get_raw<double>(is, "kappa");
    s.t = detail::get_raw<double>(is, "time");
    if (s.d < 1 || s.d > 6) throw std::runtime_error("snapshot: dimension out of range");
    std::size_t count = static_cast<std::size_t>(s.n);
    if (s.grid_type == 1) {
        count = 1;
        for (int a = 0; a < s.d; ++a) count *= static_cast<std::size_t>(s.n);
    }
    if (count == 0 || count > (std::size_t(1) << 30))
        throw std::runtime_error("snapshot: implausible field size");
    s.u = detail::get_field(is, count, "u field");
    s.v = detail::get_field(is, count, "v field");
    // must now be exactly at EOF
    is.peek();
    if (!is.eof()) throw std::runtime_error("snapshot: trailing bytes in " + path);
    return s;
}

}  // namespace nls6
