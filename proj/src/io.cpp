#include "patsvd/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "patsvd/error.hpp"

namespace patsvd::io {

namespace {

constexpr char kModeMagic[8] = {'P', 'A', 'T', 'M', 'O', 'D', 'E', '1'};
constexpr char kGridMagic[8] = {'P', 'A', 'T', 'G', 'R', 'I', 'D', '1'};
constexpr char kTraceMagic[8] = {'P', 'A', 'T', 'T', 'R', 'A', 'C', '1'};

class Writer {
public:
    explicit Writer(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }
    void magic(const char (&m)[8]) { out_.write(m, 8); }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) { le(v, 4); }
    void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v), 4); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void finish() {
        out_.flush();
        if (!out_) throw IoError("write to " + path_.string() + " failed");
    }

private:
    void le(std::uint64_t v, int bytes) {
        char buf[8];
        for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(buf, bytes);
    }
    fs::path path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open " + path.string());
    }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
    void magic(const char (&m)[8]) {
        char buf[8];
        bytes(buf, 8);
        if (std::memcmp(buf, m, 8) != 0)
            throw IoError(path_.string() + ": bad magic, expected " + std::string(m, 8));
    }
    std::uint8_t u8() {
        char c;
        bytes(&c, 1);
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(le(4))); }
    double f64() { return std::bit_cast<double>(le(8)); }

private:
    void bytes(char* buf, std::streamsize n) {
        in_.read(buf, n);
        if (in_.gcount() != n) throw IoError(path_.string() + ": truncated file");
    }
    std::uint64_t le(int n) {
        unsigned char buf[8];
        bytes(reinterpret_cast<char*>(buf), n);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    }
    fs::path path_;
    std::ifstream in_;
};

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    return out;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > 0xffffffffu) throw ShapeError(std::string(what) + " does not fit in 32 bits");
    return static_cast<std::uint32_t>(v);
}

} // namespace

void write_modes(const fs::path& path, std::span<const RadialMode> modes) {
    Writer w(path);
    for (const RadialMode& m : modes) {
        w.magic(kModeMagic);
        w.u32(static_cast<std::uint32_t>(m.dimension));
        w.i32(m.l);
        w.u32(static_cast<std::uint32_t>(m.k));
        w.u8(m.bc == BoundaryCondition::Neumann ? 0 : 1);
        w.f64(m.mu);
        w.u32(checked_u32(m.n_cells(), "mode length"));
        w.f64(m.boundary_value);
        w.f64(m.boundary_derivative);
        for (double v : m.values) w.f64(v);
    }
    w.finish();
}

std::vector<RadialMode> read_modes(const fs::path& path) {
    Reader r(path);
    std::vector<RadialMode> out;
    while (!r.at_end()) {
        r.magic(kModeMagic);
        RadialMode m;
        m.dimension = static_cast<int>(r.u32());
        m.l = r.i32();
        m.k = static_cast<int>(r.u32());
        const std::uint8_t bc = r.u8();
        if (bc > 1) throw IoError(path.string() + ": unknown boundary condition tag " + std::to_string(bc));
        m.bc = bc == 0 ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
        m.mu = r.f64();
        const std::uint32_t n = r.u32();
        m.boundary_value = r.f64();
        m.boundary_derivative = r.f64();
        m.values.resize(n);
        for (double& v : m.values) v = r.f64();
        out.push_back(std::move(m));
    }
    return out;
}

void write_grid(const fs::path& path, const GridFunction& g) {
    Writer w(path);
    w.magic(kGridMagic);
    w.u32(static_cast<std::uint32_t>(g.dimension()));
    w.u32(checked_u32(g.radial().size(), "radial size"));
    if (g.dimension() == 2) {
        w.u32(checked_u32(g.angular().size(), "angular size"));
    } else {
        w.u32(checked_u32(g.angular().n_colat(), "colatitude count"));
        w.u32(checked_u32(g.angular().n_azim(), "azimuth count"));
    }
    for (const complex& v : g.samples()) {
        w.f64(v.real());
        w.f64(v.imag());
    }
    w.finish();
}

GridFunction read_grid(const fs::path& path) {
    Reader r(path);
    r.magic(kGridMagic);
    const std::uint32_t dim = r.u32();
    const std::uint32_t n = r.u32();
    AngularGrid angular = AngularGrid::circle(1);
    if (dim == 2) {
        angular = AngularGrid::circle(r.u32());
    } else if (dim == 3) {
        const std::uint32_t nc = r.u32();
        angular = AngularGrid::sphere(nc, r.u32());
    } else {
        throw IoError(path.string() + ": unsupported dimension " + std::to_string(dim));
    }
    RadialGrid radial(n);
    std::vector<complex> samples(radial.size() * angular.size());
    for (complex& v : samples) {
        const double re = r.f64();
        v = complex(re, r.f64());
    }
    return GridFunction(radial, std::move(angular), std::move(samples));
}

void write_grid_csv(const fs::path& path, const GridFunction& g) {
    std::ofstream out = open_text(path);
    const bool three = g.dimension() == 3;
    out << (three ? "r,colatitude,azimuth,re,im\n" : "r,theta,re,im\n");
    for (std::size_t j = 0; j < g.radial().size(); ++j)
        for (std::size_t a = 0; a < g.angular().size(); ++a) {
            out << g.radial().node(j) << ',';
            if (three) out << g.angular().colatitude(a) << ',';
            const complex v = g.at(j, a);
            out << g.angular().azimuth(a) << ',' << v.real() << ',' << v.imag() << '\n';
        }
    if (!out) throw IoError("write to " + path.string() + " failed");
}

void write_trace(const fs::path& path, const BoundaryTrace& trace) {
    if (trace.angular().dimension() != 2) throw ShapeError("trace files hold 2D traces only");
    double peak = 0.0;
    for (const complex& v : trace.samples()) peak = std::max(peak, std::abs(v));
    if (trace.max_imag() > 1e-10 * std::max(peak, 1e-300))
        throw TypeError("trace has a non-negligible imaginary part (" + std::to_string(trace.max_imag()) +
                        "); trace files hold real data");
    Writer w(path);
    w.magic(kTraceMagic);
    w.u32(checked_u32(trace.angular().size(), "angular size"));
    w.u32(checked_u32(trace.n_steps(), "step count"));
    w.f64(trace.time().dt);
    for (const complex& v : trace.samples()) w.f64(v.real());
    w.finish();
}

BoundaryTrace read_trace(const fs::path& path) {
    Reader r(path);
    r.magic(kTraceMagic);
    const std::uint32_t n_theta = r.u32();
    const std::uint32_t n_steps = r.u32();
    const double dt = r.f64();
    if (n_theta == 0 || n_steps == 0 || !(dt > 0.0)) throw IoError(path.string() + ": invalid trace header");
    std::vector<complex> samples(static_cast<std::size_t>(n_theta) * n_steps);
    for (complex& v : samples) v = r.f64();
    return BoundaryTrace(AngularGrid::circle(n_theta), TimeGrid{dt, n_steps}, std::move(samples));
}

void write_trace_csv(const fs::path& path, const BoundaryTrace& trace) {
    std::ofstream out = open_text(path);
    out << "theta_index,time_index,value\n";
    for (std::size_t t = 0; t < trace.n_steps(); ++t)
        for (std::size_t a = 0; a < trace.angular().size(); ++a) out << a << ',' << t << ',' << trace.at(t, a).real() << '\n';
    if (!out) throw IoError("write to " + path.string() + " failed");
}

json to_json(const ModeIndex& index) {
    json j{{"dimension", index.dimension}, {"l", index.l}, {"k", index.k}};
    if (index.dimension == 3) j["m"] = index.m;
    return j;
}

ModeIndex mode_index_from_json(const json& j) {
    const int dim = j.value("dimension", 2);
    if (dim == 2) return ModeIndex::planar(j.at("l").get<int>(), j.at("k").get<int>());
    if (dim == 3) return ModeIndex::spatial(j.at("l").get<int>(), j.at("m").get<int>(), j.at("k").get<int>());
    throw ConfigError("mode index dimension must be 2 or 3");
}

json to_json(const ModalCoefficients& coeffs) {
    json list = json::array();
    for (const auto& [index, v] : coeffs.entries) {
        json e = to_json(index);
        e["re"] = v.real();
        e["im"] = v.imag();
        list.push_back(std::move(e));
    }
    return list;
}

ModalCoefficients coefficients_from_json(const json& j) {
    ModalCoefficients out;
    for (const json& e : j) {
        const ModeIndex i = mode_index_from_json(e);
        out.entries[i] = complex(e.value("re", 0.0), e.value("im", 0.0));
        out.truncation.l_max = std::max(out.truncation.l_max, std::abs(i.l));
        out.truncation.k_max = std::max(out.truncation.k_max, i.k);
    }
    return out;
}

json to_json(const ReconstructionReport& report) {
    json clusters = json::array();
    for (const auto& c : report.degenerate_clusters) {
        json members = json::array();
        for (const ModeIndex& i : c) members.push_back(to_json(i));
        clusters.push_back(std::move(members));
    }
    return json{{"coefficients", to_json(report.coefficients)},
                {"residual", report.residual},
                {"horizon", report.horizon},
                {"mode_count", report.mode_count},
                {"crosstalk_bound", report.crosstalk},
                {"method", report.method},
                {"regularization", report.regularization},
                {"degenerate_clusters", std::move(clusters)}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write to " + path.string() + " failed");
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("SHA-256 context setup failed");
    }
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

} // namespace patsvd::io
