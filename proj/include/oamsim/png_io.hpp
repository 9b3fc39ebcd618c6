#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oamsim {

struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 gray, 3 RGB
    std::vector<uint8_t> data;  // row-major, interleaved
};

void write_png(const Image8& img, const std::string& path);
Image8 read_png(const std::string& path);

}  // namespace oamsim
