#pragma once

#include <string>
#include <vector>

#include "tunnelwave/packets.hpp"

namespace tw {

// All numeric output uses %.17g: round-trip safe and bitwise reproducible.
std::string format_g17(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// x,re,im rows.
void write_wavefield_csv(const std::string& path, const WaveField& field);

// One JSON header line (grid spec, t, hbar, meta) followed by n
// little-endian float64 (re,im) pairs.
void write_wavefield_binary(const std::string& path, const WaveField& field);
WaveField read_wavefield_binary(const std::string& path);

void ensure_dir(const std::string& path);

} // namespace tw
