// SPDX-License-Identifier: Apache-2.0
#include "srsr/metrics.hpp"

#include "srsr/errors.hpp"

#include <cmath>
#include <cstdio>

namespace srsr {

std::string PsnrValue::str() const {
    if (infinite) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", db);
    return buf;
}

namespace {

void check_images(const ImageGrid& a, const ImageGrid& b) {
    if (!a.same_shape(b)) throw DimensionError("metric inputs differ in shape");
    if (a.values.empty()) throw DimensionError("metric inputs are empty");
}

std::vector<double> gaussian_kernel(std::size_t window, double sigma) {
    std::vector<double> k(window * window);
    const double centre = (static_cast<double>(window) - 1.0) / 2.0;
    double sum = 0.0;
    for (std::size_t r = 0; r < window; ++r)
        for (std::size_t c = 0; c < window; ++c) {
            const double dy = static_cast<double>(r) - centre;
            const double dx = static_cast<double>(c) - centre;
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k[r * window + c] = v;
            sum += v;
        }
    for (double& v : k) v /= sum;
    return k;
}

// mean local SSIM over the window positions enabled by `accept`
template <typename AcceptWindow>
double ssim_over_windows(const ImageGrid& a, const ImageGrid& b, const SsimParams& p,
                         AcceptWindow accept, const char* empty_what) {
    check_images(a, b);
    if (a.h < p.window || a.w < p.window)
        throw DimensionError("image " + std::to_string(a.h) + "x" + std::to_string(a.w) +
                             " is smaller than the SSIM window");
    const ImageGrid ya = to_luma(a);
    const ImageGrid yb = to_luma(b);
    const std::vector<double> kernel = gaussian_kernel(p.window, p.sigma);
    const double L = a.max_value;
    const double c1 = (p.k1 * L) * (p.k1 * L);
    const double c2 = (p.k2 * L) * (p.k2 * L);

    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t y = 0; y + p.window <= a.h; ++y) {
        for (std::size_t x = 0; x + p.window <= a.w; ++x) {
            if (!accept(y, x)) continue;
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (std::size_t r = 0; r < p.window; ++r)
                for (std::size_t c = 0; c < p.window; ++c) {
                    const double wgt = kernel[r * p.window + c];
                    const double va = ya.at(0, y + r, x + c);
                    const double vb = yb.at(0, y + r, x + c);
                    mu_a += wgt * va;
                    mu_b += wgt * vb;
                    aa += wgt * va * va;
                    bb += wgt * vb * vb;
                    ab += wgt * va * vb;
                }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++windows;
        }
    }
    if (windows == 0) throw RegionError(empty_what);
    return total / static_cast<double>(windows);
}

} // namespace

ImageGrid to_luma(const ImageGrid& image) {
    if (image.channels == 1) return image;
    if (image.channels != 3)
        throw DimensionError("luma conversion expects 1 or 3 channels, got " +
                             std::to_string(image.channels));
    ImageGrid y(1, image.h, image.w, image.max_value);
    for (std::size_t r = 0; r < image.h; ++r)
        for (std::size_t c = 0; c < image.w; ++c)
            y.at(0, r, c) = kLumaWeights[0] * image.at(0, r, c) +
                            kLumaWeights[1] * image.at(1, r, c) +
                            kLumaWeights[2] * image.at(2, r, c);
    return y;
}

PsnrValue psnr(const ImageGrid& a, const ImageGrid& b, double max_val) {
    check_images(a, b);
    double sq = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(a.values.size());
    if (mse == 0.0) return {0.0, true};
    return {10.0 * std::log10(max_val * max_val / mse), false};
}

PsnrValue region_psnr(const ImageGrid& a, const ImageGrid& b, const BinaryGrid& region,
                      double max_val) {
    check_images(a, b);
    if (region.resolution() != a.resolution())
        throw DimensionError("region mask does not match the image resolution");
    double sq = 0.0;
    std::size_t count = 0;
    for (std::size_t y = 0; y < a.h; ++y)
        for (std::size_t x = 0; x < a.w; ++x) {
            if (!region.at(y, x)) continue;
            for (std::size_t c = 0; c < a.channels; ++c) {
                const double d = a.at(c, y, x) - b.at(c, y, x);
                sq += d * d;
            }
            ++count;
        }
    if (count == 0) throw RegionError("region PSNR over an empty region");
    const double mse = sq / static_cast<double>(count * a.channels);
    if (mse == 0.0) return {0.0, true};
    return {10.0 * std::log10(max_val * max_val / mse), false};
}

double ssim(const ImageGrid& a, const ImageGrid& b, const SsimParams& params) {
    return ssim_over_windows(
        a, b, params, [](std::size_t, std::size_t) { return true; },
        "SSIM over an image with no valid windows");
}

double region_ssim(const ImageGrid& a, const ImageGrid& b, const BinaryGrid& region,
                   const SsimParams& params) {
    if (region.resolution() != a.resolution())
        throw DimensionError("region mask does not match the image resolution");
    if (region.count_ones() == 0) throw RegionError("region SSIM over an empty region");
    auto window_inside = [&](std::size_t y, std::size_t x) {
        for (std::size_t r = 0; r < params.window; ++r)
            for (std::size_t c = 0; c < params.window; ++c)
                if (!region.at(y + r, x + c)) return false;
        return true;
    };
    return ssim_over_windows(a, b, params, window_inside,
                             "region SSIM: no window fits inside the region");
}

MetricValue region_metric(const ImageGrid& a, const ImageGrid& b, const BinaryGrid& region,
                          MetricKind kind, double max_val, const SsimParams& params) {
    if (kind == MetricKind::Psnr) {
        const PsnrValue p = region_psnr(a, b, region, max_val);
        return {p.db, p.infinite};
    }
    return {region_ssim(a, b, region, params), false};
}

} // namespace srsr
