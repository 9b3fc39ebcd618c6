#include "oamsim/field.hpp"
#include "oamsim/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace oamsim {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes little-endian host");

Field::Field(const Grid& g, double z_, double wavelength_)
    : n(g.n), extent(g.extent), z(z_), wavelength(wavelength_), L(size()), R(size()) {
    if (n < 64 || n % 2) throw DomainError("Field: n must be even and >= 64");
    if (!(extent > 0.0)) throw DomainError("Field: extent must be positive");
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
    const double tol = 1e-12;
    if (a.n != b.n || std::abs(a.extent - b.extent) > tol * a.extent ||
        std::abs(a.wavelength - b.wavelength) > tol * a.wavelength)
        throw GridMismatch(std::string(what) + ": fields live on different grids");
}

double power(const Field& f) {
    double s = 0.0;
    for (size_t i = 0; i < f.size(); ++i) s += std::norm(f.L[i]) + std::norm(f.R[i]);
    return s * f.cell_area();
}

cplx overlap(const Field& a, const Field& b) {
    require_same_grid(a, b, "overlap");
    cplx s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a.L[i]) * b.L[i] + std::conj(a.R[i]) * b.R[i];
    return s * a.cell_area();
}

double normalized_overlap(const Field& a, const Field& b) {
    const double d = std::sqrt(power(a) * power(b));
    if (d == 0.0) return 0.0;
    return std::abs(overlap(a, b)) / d;
}

Field scaled(const Field& f, cplx s) {
    Field o = f;
    for (auto& v : o.L) v *= s;
    for (auto& v : o.R) v *= s;
    return o;
}

Field normalized(const Field& f) {
    const double p = power(f);
    if (p <= 0.0) throw DomainError("normalized: zero-power field");
    return scaled(f, 1.0 / std::sqrt(p));
}

Field axpy(const Field& a, cplx s, const Field& b) {
    require_same_grid(a, b, "axpy");
    Field o = a;
    for (size_t i = 0; i < a.size(); ++i) {
        o.L[i] += s * b.L[i];
        o.R[i] += s * b.R[i];
    }
    return o;
}

Field analyzer(const Field& f, cplx jl, cplx jr) {
    const double nrm = std::sqrt(std::norm(jl) + std::norm(jr));
    jl /= nrm;
    jr /= nrm;
    Field o = f;
    for (size_t i = 0; i < f.size(); ++i) {
        const cplx a = std::conj(jl) * f.L[i] + std::conj(jr) * f.R[i];
        o.L[i] = a * jl;
        o.R[i] = a * jr;
    }
    return o;
}

Field analyzer_h(const Field& f) { return analyzer(f, 1.0, 1.0); }

std::vector<cplx> h_component(const Field& f) {
    std::vector<cplx> h(f.size());
    const double s = 1.0 / std::sqrt(2.0);
    for (size_t i = 0; i < f.size(); ++i) h[i] = s * (f.L[i] + f.R[i]);
    return h;
}

Field resample_centre(const Field& f, int n_new) {
    Field o(Grid{n_new, f.dx() * n_new}, f.z, f.wavelength);
    const int off = (f.n - n_new) / 2;  // source index = dest index + off
    for (int i = 0; i < n_new; ++i) {
        const int si = i + off;
        if (si < 0 || si >= f.n) continue;
        for (int j = 0; j < n_new; ++j) {
            const int sj = j + off;
            if (sj < 0 || sj >= f.n) continue;
            o.L[size_t(i) * n_new + j] = f.L[size_t(si) * f.n + sj];
            o.R[size_t(i) * n_new + j] = f.R[size_t(si) * f.n + sj];
        }
    }
    return o;
}

namespace {
constexpr char kMagic[8] = {'O', 'A', 'M', 'F', 'I', 'E', 'L', 'D'};
constexpr uint32_t kVersion = 1;
}  // namespace

void write_snapshot(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    unsigned char hdr[64] = {};
    std::memcpy(hdr, kMagic, 8);
    const uint32_t n = static_cast<uint32_t>(f.n);
    std::memcpy(hdr + 8, &kVersion, 4);
    std::memcpy(hdr + 12, &n, 4);
    std::memcpy(hdr + 16, &f.extent, 8);
    std::memcpy(hdr + 24, &f.z, 8);
    std::memcpy(hdr + 32, &f.wavelength, 8);
    os.write(reinterpret_cast<const char*>(hdr), 64);
    std::vector<float> buf(2 * f.size());
    for (const auto* plane : {&f.L, &f.R}) {
        for (size_t i = 0; i < f.size(); ++i) {
            buf[2 * i] = static_cast<float>((*plane)[i].real());
            buf[2 * i + 1] = static_cast<float>((*plane)[i].imag());
        }
        os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    }
    if (!os) throw IoError("write failed: " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    unsigned char hdr[64];
    is.read(reinterpret_cast<char*>(hdr), 64);
    if (!is || std::memcmp(hdr, kMagic, 8) != 0) throw IoError(path + ": not a field snapshot");
    uint32_t ver, n;
    double extent, z, wl;
    std::memcpy(&ver, hdr + 8, 4);
    std::memcpy(&n, hdr + 12, 4);
    std::memcpy(&extent, hdr + 16, 8);
    std::memcpy(&z, hdr + 24, 8);
    std::memcpy(&wl, hdr + 32, 8);
    if (ver != kVersion) throw IoError(path + ": unsupported snapshot version");
    Field f(Grid{int(n), extent}, z, wl);
    std::vector<float> buf(2 * f.size());
    for (auto* plane : {&f.L, &f.R}) {
        is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
        if (!is) throw IoError(path + ": truncated snapshot");
        for (size_t i = 0; i < f.size(); ++i) (*plane)[i] = {buf[2 * i], buf[2 * i + 1]};
    }
    return f;
}

}  // namespace oamsim
