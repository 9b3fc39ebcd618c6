#include "oamsim/png_io.hpp"
#include "oamsim/errors.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

namespace oamsim {

namespace {
struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;
}  // namespace

void write_png(const Image8& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3) throw IoError("write_png: 1 or 3 channels only");
    if (img.data.size() != size_t(img.width) * img.height * img.channels) throw IoError("write_png: size mismatch");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng write error: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    const size_t stride = size_t(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.data.data() + y * stride));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image8 read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng read error: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    Image8 img;
    img.width = int(png_get_image_width(png, info));
    img.height = int(png_get_image_height(png, info));
    const int ct = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) != 8 || (ct != PNG_COLOR_TYPE_RGB && ct != PNG_COLOR_TYPE_GRAY)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": only 8-bit gray/RGB supported");
    }
    img.channels = ct == PNG_COLOR_TYPE_RGB ? 3 : 1;
    img.data.resize(size_t(img.width) * img.height * img.channels);
    const size_t stride = size_t(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) png_read_row(png, img.data.data() + y * stride, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace oamsim
