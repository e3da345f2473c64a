#include "fpmod/segment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>

#include "fpmod/filters.hpp"

namespace fpmod {

namespace {

// Grid of per-block decisions, row-major.
struct BlockGrid {
    int cols = 0;
    int rows = 0;
    std::vector<std::uint8_t> on;

    bool get(int c, int r) const { return on[static_cast<std::size_t>(r) * cols + c] != 0; }
};

// Binary morphology on the block grid with a disc element; `outside` is the
// value assumed beyond the grid.
BlockGrid morph(const BlockGrid& g, int radius, bool dilate, bool outside) {
    BlockGrid out{g.cols, g.rows, std::vector<std::uint8_t>(g.on.size(), 0)};
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            bool acc = !dilate;
            for (int dr = -radius; dr <= radius && acc == !dilate; ++dr) {
                for (int dc = -radius; dc <= radius; ++dc) {
                    if (dr * dr + dc * dc > radius * radius) {
                        continue;
                    }
                    const int rr = r + dr;
                    const int cc = c + dc;
                    const bool v = (rr < 0 || cc < 0 || rr >= g.rows || cc >= g.cols) ? outside : g.get(cc, rr);
                    if (dilate && v) {
                        acc = true;
                        break;
                    }
                    if (!dilate && !v) {
                        acc = false;
                        break;
                    }
                }
            }
            out.on[static_cast<std::size_t>(r) * g.cols + c] = acc ? 1 : 0;
        }
    }
    return out;
}

BlockGrid largest_component(const BlockGrid& g) {
    std::vector<int> label(g.on.size(), -1);
    int best = -1;
    std::size_t best_size = 0;
    int next = 0;
    std::vector<int> stack;
    for (std::size_t seed = 0; seed < g.on.size(); ++seed) {
        if (!g.on[seed] || label[seed] >= 0) {
            continue;
        }
        std::size_t size = 0;
        stack.assign(1, static_cast<int>(seed));
        label[seed] = next;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            ++size;
            const int c = i % g.cols;
            const int r = i / g.cols;
            const int nbr[4][2] = {{c - 1, r}, {c + 1, r}, {c, r - 1}, {c, r + 1}};
            for (const auto& n : nbr) {
                if (n[0] < 0 || n[1] < 0 || n[0] >= g.cols || n[1] >= g.rows) {
                    continue;
                }
                const int j = n[1] * g.cols + n[0];
                if (g.on[j] && label[j] < 0) {
                    label[j] = next;
                    stack.push_back(j);
                }
            }
        }
        if (size > best_size) {
            best_size = size;
            best = next;
        }
        ++next;
    }
    BlockGrid out{g.cols, g.rows, std::vector<std::uint8_t>(g.on.size(), 0)};
    for (std::size_t i = 0; i < label.size(); ++i) {
        out.on[i] = (best >= 0 && label[i] == best) ? 1 : 0;
    }
    return out;
}

// 1D squared Euclidean distance transform (lower envelope of parabolas).
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf) {
            continue;
        }
        if (f[v[0]] == kInf) {
            v[0] = q;
            continue;
        }
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (k > 0 && s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (f[v[0]] == kInf) {
        std::fill(d, d + n, kInf);
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) {
            ++k;
        }
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

}  // namespace

std::size_t RegionMask::count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

RegionMask segment(const GrayImage& image, const SegmentConfig& cfg) {
    const int bs = std::max(1, cfg.block_size);
    const int cols = (image.width + bs - 1) / bs;
    const int rows = (image.height + bs - 1) / bs;
    const auto grad = filters::sobel(image.pixels, image.width, image.height);

    BlockGrid grid{cols, rows, std::vector<std::uint8_t>(static_cast<std::size_t>(cols) * rows, 0)};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double sum = 0.0;
            double sum2 = 0.0;
            std::complex<double> tensor{};
            double energy = 0.0;
            int n = 0;
            for (int y = r * bs; y < std::min(image.height, (r + 1) * bs); ++y) {
                for (int x = c * bs; x < std::min(image.width, (c + 1) * bs); ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * image.width + x;
                    const double v = image.pixels[i];
                    sum += v;
                    sum2 += v * v;
                    const double gx = grad.gx[i];
                    const double gy = grad.gy[i];
                    tensor += std::complex<double>(gx * gx - gy * gy, 2.0 * gx * gy);
                    energy += gx * gx + gy * gy;
                    ++n;
                }
            }
            const double mean = sum / n;
            const double stddev = std::sqrt(std::max(0.0, sum2 / n - mean * mean));
            const double coherence = energy > 0.0 ? std::abs(tensor) / energy : 0.0;
            grid.on[static_cast<std::size_t>(r) * cols + c] =
                (stddev > cfg.min_stddev && coherence > cfg.min_coherence) ? 1 : 0;
        }
    }

    if (cfg.closing_radius > 0) {
        grid = morph(morph(grid, cfg.closing_radius, true, false), cfg.closing_radius, false, true);
    }
    grid = largest_component(grid);

    RegionMask mask(image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            mask.set(x, y, grid.get(x / bs, y / bs));
        }
    }
    return mask;
}

RegionMask erode_mask(const RegionMask& mask, int margin, StructuringElement element) {
    if (margin < 0) {
        throw std::invalid_argument("erode_mask: negative margin");
    }
    if (margin == 0) {
        return mask;
    }
    const int w = mask.width;
    const int h = mask.height;
    RegionMask out(w, h);

    if (element == StructuringElement::Square) {
        // separable running minimum over a (2m+1) window; outside counts as background
        std::vector<std::uint8_t> tmp(mask.inside.size(), 0);
        for (int y = 0; y < h; ++y) {
            int run = 0;  // consecutive foreground pixels ending at x
            std::vector<int> runs(w);
            for (int x = 0; x < w; ++x) {
                run = mask.contains(x, y) ? run + 1 : 0;
                runs[x] = run;
            }
            for (int x = 0; x < w; ++x) {
                const int right = x + margin;
                tmp[static_cast<std::size_t>(y) * w + x] = (right < w && runs[right] >= 2 * margin + 1) ? 1 : 0;
            }
        }
        for (int x = 0; x < w; ++x) {
            std::vector<int> runs(h);
            int run = 0;
            for (int y = 0; y < h; ++y) {
                run = tmp[static_cast<std::size_t>(y) * w + x] ? run + 1 : 0;
                runs[y] = run;
            }
            for (int y = 0; y < h; ++y) {
                const int below = y + margin;
                out.set(x, y, below < h && runs[below] >= 2 * margin + 1);
            }
        }
        return out;
    }

    // disc: keep p iff the nearest background pixel (raster exterior included)
    // lies strictly farther than margin
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const int pw = w + 2;
    const int ph = h + 2;
    std::vector<double> f(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f[static_cast<std::size_t>(y + 1) * pw + x + 1] = mask.contains(x, y) ? kInf : 0.0;
        }
    }
    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> line(std::max(pw, ph));
    std::vector<double> dist(std::max(pw, ph));
    for (int x = 0; x < pw; ++x) {
        for (int y = 0; y < ph; ++y) {
            line[y] = f[static_cast<std::size_t>(y) * pw + x];
        }
        edt_1d(line.data(), dist.data(), ph, v, z);
        for (int y = 0; y < ph; ++y) {
            f[static_cast<std::size_t>(y) * pw + x] = dist[y];
        }
    }
    for (int y = 0; y < ph; ++y) {
        double* row = &f[static_cast<std::size_t>(y) * pw];
        std::copy(row, row + pw, line.begin());
        edt_1d(line.data(), row, pw, v, z);
    }
    const double limit = static_cast<double>(margin) * margin;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.set(x, y, f[static_cast<std::size_t>(y + 1) * pw + x + 1] > limit);
        }
    }
    return out;
}

void write_mask_pgm(const RegionMask& mask, const std::filesystem::path& path) {
    std::vector<double> px(mask.inside.size());
    std::transform(mask.inside.begin(), mask.inside.end(), px.begin(), [](std::uint8_t v) { return v ? 1.0 : 0.0; });
    write_pgm(GrayImage(mask.width, mask.height, std::move(px)), path);
}

RegionMask read_mask_pgm(const std::filesystem::path& path) {
    const GrayImage img = load_gray(path);
    RegionMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        mask.inside[i] = img.pixels[i] >= 0.5 ? 1 : 0;
    }
    return mask;
}

}  // namespace fpmod
