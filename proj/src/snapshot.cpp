#include "couette/error.hpp"
#include "couette/fields.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace couette {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::vector<char>& buf, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    buf.insert(buf.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, std::size_t& pos, const std::string& path) {
    if (pos + sizeof(T) > buf.size()) throw IoError("snapshot " + path + ": truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failed: " + path);
}

Snapshot read_csv(const std::string& path, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    long nx = -1, ny = -1;
    double R = 0.0, t = 0.0;
    bool header_seen = false;
    std::vector<std::string> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
                try {
                    if (k == "nx") nx = std::stol(v);
                    else if (k == "ny") ny = std::stol(v);
                    else if (k == "R") R = std::stod(v);
                    else if (k == "t") t = std::stod(v);
                } catch (const std::exception&) {
                    throw IoError("snapshot " + path + ": bad meta value '" + tok + "'");
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("component", 0) != 0) throw IoError("snapshot " + path + ": missing CSV header");
            header_seen = true;
            continue;
        }
        rows.push_back(line);
    }
    if (nx <= 0 || ny <= 0) throw IoError("snapshot " + path + ": CSV lacks nx/ny meta line");
    GridPtr g;
    try {
        g = make_grid(static_cast<int>(nx), static_cast<int>(ny));
    } catch (const ArgumentError& e) {
        throw IoError("snapshot " + path + ": " + e.what());
    }
    if (rows.size() != static_cast<std::size_t>(2 * nx * ny))
        throw IoError("snapshot " + path + ": expected " + std::to_string(2 * nx * ny) + " coefficient rows");
    Snapshot s{VelocityField::zeros(g), R, t};
    std::vector<char> seen(2 * nx * ny, 0);
    for (const auto& r : rows) {
        std::istringstream ls(r);
        std::string c, js, ms, re, im;
        if (!std::getline(ls, c, ',') || !std::getline(ls, js, ',') || !std::getline(ls, ms, ',') ||
            !std::getline(ls, re, ',') || !std::getline(ls, im, ','))
            throw IoError("snapshot " + path + ": malformed row '" + r + "'");
        try {
            int comp = std::stoi(c), j = std::stoi(js), m = std::stoi(ms);
            int row = g->row_of_mode(j);
            if ((comp != 1 && comp != 2) || row < 0 || row >= nx || m < 0 || m >= ny) throw IoError("range");
            std::size_t idx = ((comp - 1) * nx + row) * ny + m;
            if (seen[idx]) throw IoError("duplicate");
            seen[idx] = 1;
            (comp == 1 ? s.u.u1 : s.u.u2).data(row, m) = cplx(std::stod(re), std::stod(im));
        } catch (const std::exception&) {
            throw IoError("snapshot " + path + ": bad row '" + r + "'");
        }
    }
    return s;
}

} // namespace

void write_snapshot(const std::string& path, const VelocityField& u, double R, double t) {
    const VelocityField s = u.spectral();
    const SpectralGrid& g = *u.grid();
    std::vector<char> buf;
    buf.insert(buf.end(), {'C', 'F', 'S', '1'});
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nx));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny));
    put<double>(buf, R);
    put<double>(buf, t);
    for (const ScalarField* c : {&s.u1, &s.u2})
        for (int r = 0; r < g.nx; ++r)
            for (int m = 0; m < g.ny; ++m) {
                put<double>(buf, c->data(r, m).real());
                put<double>(buf, c->data(r, m).imag());
            }
    write_all(path, std::string(buf.begin(), buf.end()));
}

void write_snapshot_csv(const std::string& path, const VelocityField& u, double R, double t) {
    const VelocityField s = u.spectral();
    const SpectralGrid& g = *u.grid();
    std::ostringstream os;
    os << std::setprecision(17);
    os << "# nx=" << g.nx << " ny=" << g.ny << " R=" << R << " t=" << t << "\n";
    os << "component,j,m,re,im\n";
    int comp = 1;
    for (const ScalarField* c : {&s.u1, &s.u2}) {
        for (int r = 0; r < g.nx; ++r)
            for (int m = 0; m < g.ny; ++m)
                os << comp << ',' << g.mode_index(r) << ',' << m << ',' << c->data(r, m).real() << ','
                   << c->data(r, m).imag() << "\n";
        ++comp;
    }
    write_all(path, os.str());
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot " + path);
    std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (buf.size() >= 4 && std::memcmp(buf.data(), "CFS1", 4) == 0) {
        std::size_t pos = 4;
        auto nx = get<std::uint32_t>(buf, pos, path);
        auto ny = get<std::uint32_t>(buf, pos, path);
        double R = get<double>(buf, pos, path);
        double t = get<double>(buf, pos, path);
        GridPtr g;
        try {
            g = make_grid(static_cast<int>(nx), static_cast<int>(ny));
        } catch (const ArgumentError& e) {
            throw IoError("snapshot " + path + ": " + e.what());
        }
        const std::size_t expect = pos + 2ull * nx * ny * 16ull;
        if (buf.size() != expect)
            throw IoError("snapshot " + path + ": size " + std::to_string(buf.size()) + " does not match header (" +
                          std::to_string(expect) + ")");
        Snapshot s{VelocityField::zeros(g), R, t};
        for (ScalarField* c : {&s.u.u1, &s.u.u2})
            for (std::uint32_t r = 0; r < nx; ++r)
                for (std::uint32_t m = 0; m < ny; ++m) {
                    double re = get<double>(buf, pos, path);
                    double im = get<double>(buf, pos, path);
                    c->data(r, m) = cplx(re, im);
                }
        return s;
    }
    return read_csv(path, std::string(buf.begin(), buf.end()));
}

} // namespace couette
