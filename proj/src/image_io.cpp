// SPDX-License-Identifier: Apache-2.0
#include "srsr/image_io.hpp"

#include "srsr/errors.hpp"

#include <cmath>
#include <fstream>

namespace srsr {

namespace {

// skips whitespace and '#' comment lines between header fields
void skip_separators(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

std::size_t read_header_value(std::istream& in, const std::filesystem::path& path) {
    skip_separators(in);
    long long v = -1;
    in >> v;
    if (!in || v < 0) throw IoError("malformed NetPBM header in " + path.string());
    return static_cast<std::size_t>(v);
}

} // namespace

ImageGrid read_netpbm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char p = 0, kind = 0;
    in.get(p);
    in.get(kind);
    if (p != 'P' || (kind != '5' && kind != '6'))
        throw IoError("unsupported NetPBM magic in " + path.string() + " (need P5 or P6)");
    const std::size_t channels = kind == '6' ? 3 : 1;
    const std::size_t w = read_header_value(in, path);
    const std::size_t h = read_header_value(in, path);
    const std::size_t maxval = read_header_value(in, path);
    if (maxval != 255)
        throw IoError("only maxval 255 is supported, " + path.string() + " has " +
                      std::to_string(maxval));
    in.get(); // single whitespace byte before the raster

    std::vector<unsigned char> raster(w * h * channels);
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (static_cast<std::size_t>(in.gcount()) != raster.size())
        throw IoError("truncated raster in " + path.string());

    ImageGrid img(channels, h, w, 255.0);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < channels; ++c)
                img.at(c, y, x) = static_cast<double>(raster[(y * w + x) * channels + c]);
    return img;
}

ImageGrid quantize_to_u8(const ImageGrid& image) {
    if (image.max_value == 255.0) return image;
    ImageGrid out(image.channels, image.h, image.w, 255.0);
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        double v = std::round(image.values[i] * 255.0);
        out.values[i] = std::min(255.0, std::max(0.0, v));
    }
    return out;
}

void write_netpbm(const std::filesystem::path& path, const ImageGrid& image) {
    if (image.channels != 1 && image.channels != 3)
        throw IoError("NetPBM output needs 1 or 3 channels, got " +
                      std::to_string(image.channels));
    const ImageGrid u8 = quantize_to_u8(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << (image.channels == 3 ? "P6" : "P5") << "\n"
        << u8.w << " " << u8.h << "\n255\n";
    std::vector<unsigned char> raster(u8.w * u8.h * u8.channels);
    for (std::size_t y = 0; y < u8.h; ++y)
        for (std::size_t x = 0; x < u8.w; ++x)
            for (std::size_t c = 0; c < u8.channels; ++c)
                raster[(y * u8.w + x) * u8.channels + c] =
                    static_cast<unsigned char>(u8.at(c, y, x));
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError("short write to " + path.string());
}

BinaryGrid read_mask_image(const std::filesystem::path& path) {
    ImageGrid img = read_netpbm(path);
    if (img.channels != 1)
        throw IoError("mask image " + path.string() + " must be single-channel PGM");
    BinaryGrid mask(img.h, img.w);
    for (std::size_t i = 0; i < mask.v.size(); ++i) mask.v[i] = img.values[i] != 0.0 ? 1 : 0;
    return mask;
}

void write_mask_image(const std::filesystem::path& path, const BinaryGrid& mask) {
    ImageGrid img(1, mask.h, mask.w, 255.0);
    for (std::size_t i = 0; i < mask.v.size(); ++i) img.values[i] = mask.v[i] ? 255.0 : 0.0;
    write_netpbm(path, img);
}

} // namespace srsr
