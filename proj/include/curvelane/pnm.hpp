#pragma once

#include <filesystem>
#include <string>

#include "curvelane/imaging.hpp"

namespace curvelane {

// Binary PGM (P5) and PPM (P6) with maxval <= 255. Samples map to [0, 1] as v / maxval.
Image read_pnm(const std::filesystem::path& path);
Image decode_pnm(const std::string& bytes);

// Writes P5 for single-channel images and P6 for three channels.
void write_pnm(const std::filesystem::path& path, const Image& img);
std::string encode_pnm(const Image& img);

}  // namespace curvelane
