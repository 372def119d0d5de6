#include "tunnelwave/csvio.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "tunnelwave/errors.hpp"

namespace tw {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    return out;
}

// Doubles are serialized as raw little-endian 64-bit words. The build targets
// little-endian hosts; the guard keeps a port honest.
static_assert(std::endian::native == std::endian::little,
              "wavefield binary format assumes a little-endian host");

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path, std::ios::out);
    for (size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ConfigError("csv row width does not match the header: " + path);
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_g17(row[i]);
        out << "\n";
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_wavefield_csv(const std::string& path, const WaveField& field) {
    std::ofstream out = open_out(path, std::ios::out);
    out << "x,re,im\n";
    for (int j = 0; j < field.n; ++j) {
        const auto& v = field.values[static_cast<size_t>(j)];
        out << format_g17(field.x(j)) << ',' << format_g17(v.real()) << ','
            << format_g17(v.imag()) << "\n";
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_wavefield_binary(const std::string& path, const WaveField& field) {
    nlohmann::json header = {
        {"x_min", field.x_min}, {"dx", field.dx},     {"n", field.n},
        {"t", field.t},         {"hbar", field.hbar}, {"meta", field.meta},
    };
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    out << header.dump() << "\n";
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(cplx)));
    if (!out) throw ConfigError("write failed: " + path);
}

WaveField read_wavefield_binary(const std::string& path) {
    std::ifstream in(path, std::ios::in | std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("missing binary header: " + path);
    WaveField field;
    try {
        const nlohmann::json header = nlohmann::json::parse(line);
        field.x_min = header.at("x_min").get<double>();
        field.dx = header.at("dx").get<double>();
        field.n = header.at("n").get<int>();
        field.t = header.at("t").get<double>();
        field.hbar = header.at("hbar").get<double>();
        field.meta = header.at("meta").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad binary header in " + path + ": " + e.what());
    }
    if (field.n <= 0 || !(field.dx > 0.0))
        throw ConfigError("bad grid in binary header: " + path);
    field.values.resize(static_cast<size_t>(field.n));
    in.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(cplx)));
    if (in.gcount() != static_cast<std::streamsize>(field.values.size() * sizeof(cplx)))
        throw ConfigError("truncated wavefield payload: " + path);
    return field;
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw ConfigError("cannot create directory " + path + ": " + ec.message());
}

} // namespace tw
