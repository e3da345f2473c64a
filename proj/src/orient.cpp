#include "fpmod/orient.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "fpmod/filters.hpp"

namespace fpmod {

namespace {

// Wrapped difference in (-pi, pi].
double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

constexpr double kZeroMagnitude = 1e-12;

}  // namespace

OrientationField::OrientationField(int w, int h)
    : width(w), height(h), doubled(static_cast<std::size_t>(w) * static_cast<std::size_t>(h)), mask(w, h, true) {
    if (w <= 0 || h <= 0) {
        throw InputError("input: zero dimensions");
    }
}

void OrientationField::set(int x, int y, double theta, double coherence) {
    doubled[index(x, y)] = std::polar(coherence, 2.0 * theta);
}

double OrientationField::theta(int x, int y) const {
    return canonical_orientation(0.5 * std::arg(at(x, y)));
}

double canonical_orientation(double theta) {
    double t = std::fmod(theta, kPi);
    if (t <= -kPi / 2) {
        t += kPi;
    } else if (t > kPi / 2) {
        t -= kPi;
    }
    return t;
}

OrientationField estimate_orientation(const GrayImage& image, const RegionMask& mask, const OrientConfig& cfg) {
    if (image.width != mask.width || image.height != mask.height) {
        throw InputError("input: image and mask dimensions differ");
    }
    const auto grad = filters::sobel(image.pixels, image.width, image.height);
    const std::size_t n = image.pixels.size();
    std::vector<Complex> tensor(n);
    std::vector<double> energy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gx = grad.gx[i];
        const double gy = grad.gy[i];
        tensor[i] = Complex(gx * gx - gy * gy, 2.0 * gx * gy);
        energy[i] = gx * gx + gy * gy;
    }
    tensor = filters::gaussian_blur(tensor, image.width, image.height, cfg.sigma);
    energy = filters::gaussian_blur(energy, image.width, image.height, cfg.sigma);

    OrientationField field(image.width, image.height);
    field.mask = mask;
    for (std::size_t i = 0; i < n; ++i) {
        // negating the doubled gradient direction turns it by a quarter turn
        field.doubled[i] = energy[i] > 1e-18 ? -tensor[i] / energy[i] : Complex{};
        const double mag = std::abs(field.doubled[i]);
        if (mag > 1.0) {
            field.doubled[i] /= mag;
        }
    }
    return field;
}

OrientationField smooth_field(const OrientationField& field, double sigma) {
    if (sigma < 0.0) {
        throw std::invalid_argument("smooth_field: negative sigma");
    }
    if (sigma == 0.0) {
        return field;
    }
    OrientationField out = field;
    out.doubled = filters::gaussian_blur(field.doubled, field.width, field.height, sigma);
    return out;
}

Complex sample_orientation(const OrientationField& field, Point p) {
    const auto v = sample_doubled(field, p);
    if (!v) {
        throw std::out_of_range("sample_orientation: point outside raster");
    }
    if (std::abs(*v) <= kZeroMagnitude) {
        throw std::domain_error("sample_orientation: zero-coherence neighborhood");
    }
    return *v;
}

SingularPointSet locate_singular_points(const OrientationField& field) {
    struct Detection {
        Point where;
        int half_turns;  // Poincare index times two
    };
    const auto smoothed = filters::gaussian_blur(field.doubled, field.width, field.height, 1.5);
    auto usable = [&](int x, int y) {
        return field.mask.contains(x, y) && std::abs(smoothed[field.index(x, y)]) > kZeroMagnitude;
    };

    std::vector<Detection> found;
    for (int y = 0; y + 1 < field.height; ++y) {
        for (int x = 0; x + 1 < field.width; ++x) {
            if (!usable(x, y) || !usable(x + 1, y) || !usable(x + 1, y + 1) || !usable(x, y + 1)) {
                continue;
            }
            const double a[4] = {std::arg(smoothed[field.index(x, y)]), std::arg(smoothed[field.index(x + 1, y)]),
                                 std::arg(smoothed[field.index(x + 1, y + 1)]),
                                 std::arg(smoothed[field.index(x, y + 1)])};
            double turn = 0.0;
            for (int k = 0; k < 4; ++k) {
                turn += wrap_angle(a[(k + 1) % 4] - a[k]);
            }
            const int half_turns = static_cast<int>(std::lround(turn / (2.0 * kPi)));
            if (half_turns != 0) {
                found.push_back({Point(x + 0.5, y + 0.5), half_turns});
            }
        }
    }

    // Symmetric singularities can cancel to zero after smoothing, leaving a
    // hole no 2x2 loop can see. Walk a ring around each hole instead and
    // keep whatever the small loops inside did not already account for.
    std::vector<int> label(field.doubled.size(), -1);
    int next_label = 0;
    for (int sy = 0; sy < field.height; ++sy) {
        for (int sx = 0; sx < field.width; ++sx) {
            if (!field.mask.contains(sx, sy) || usable(sx, sy) || label[field.index(sx, sy)] >= 0) {
                continue;
            }
            int x0 = sx, x1 = sx, y0 = sy, y1 = sy;
            std::vector<std::pair<int, int>> stack{{sx, sy}};
            label[field.index(sx, sy)] = next_label;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
                const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
                for (const auto& n : nb) {
                    if (field.mask.contains(n[0], n[1]) && !usable(n[0], n[1]) && label[field.index(n[0], n[1])] < 0) {
                        label[field.index(n[0], n[1])] = next_label;
                        stack.emplace_back(n[0], n[1]);
                    }
                }
            }
            ++next_label;
            --x0;
            --y0;
            ++x1;
            ++y1;
            if (x0 < 0 || y0 < 0 || x1 >= field.width || y1 >= field.height ||
                (x1 - x0) > 4 * static_cast<int>(kSingularMergeRadius) ||
                (y1 - y0) > 4 * static_cast<int>(kSingularMergeRadius)) {
                continue;
            }
            std::vector<std::pair<int, int>> ring;
            for (int x = x0; x < x1; ++x) ring.emplace_back(x, y0);
            for (int y = y0; y < y1; ++y) ring.emplace_back(x1, y);
            for (int x = x1; x > x0; --x) ring.emplace_back(x, y1);
            for (int y = y1; y > y0; --y) ring.emplace_back(x0, y);
            bool closed = true;
            for (const auto& [x, y] : ring) {
                closed = closed && usable(x, y);
            }
            if (!closed) {
                continue;
            }
            double turn = 0.0;
            for (std::size_t k = 0; k < ring.size(); ++k) {
                const auto [ax, ay] = ring[k];
                const auto [bx, by] = ring[(k + 1) % ring.size()];
                turn += wrap_angle(std::arg(smoothed[field.index(bx, by)]) - std::arg(smoothed[field.index(ax, ay)]));
            }
            int half_turns = static_cast<int>(std::lround(turn / (2.0 * kPi)));
            for (const auto& d : found) {
                if (d.where.real() > x0 && d.where.real() < x1 && d.where.imag() > y0 && d.where.imag() < y1) {
                    half_turns -= d.half_turns;
                }
            }
            if (half_turns != 0) {
                found.push_back({Point(0.5 * (x0 + x1), 0.5 * (y0 + y1)), half_turns});
            }
        }
    }

    // single-linkage clustering
    std::vector<std::size_t> parent(found.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto root = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < found.size(); ++i) {
        for (std::size_t j = i + 1; j < found.size(); ++j) {
            if (std::abs(found[i].where - found[j].where) <= kSingularMergeRadius) {
                parent[root(j)] = root(i);
            }
        }
    }

    SingularPointSet out;
    for (std::size_t r = 0; r < found.size(); ++r) {
        if (root(r) != r) {
            continue;
        }
        Point centroid{};
        int members = 0;
        int total = 0;
        for (std::size_t i = 0; i < found.size(); ++i) {
            if (root(i) == r) {
                centroid += found[i].where;
                total += found[i].half_turns;
                ++members;
            }
        }
        centroid /= static_cast<double>(members);
        const SingularType type = total > 0 ? SingularType::Core : SingularType::Delta;
        for (int k = 0; k < std::abs(total); ++k) {
            out.push_back({centroid, type, total > 0 ? 0.5 : -0.5});
        }
    }
    return out;
}

double frame_winding(const OrientationField& field) {
    std::vector<std::pair<int, int>> loop;
    for (int x = 0; x < field.width - 1; ++x) {
        loop.emplace_back(x, 0);
    }
    for (int y = 0; y < field.height - 1; ++y) {
        loop.emplace_back(field.width - 1, y);
    }
    for (int x = field.width - 1; x > 0; --x) {
        loop.emplace_back(x, field.height - 1);
    }
    for (int y = field.height - 1; y > 0; --y) {
        loop.emplace_back(0, y);
    }
    double turn = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const auto [x0, y0] = loop[k];
        const auto [x1, y1] = loop[(k + 1) % loop.size()];
        turn += wrap_angle(std::arg(field.at(x1, y1)) - std::arg(field.at(x0, y0)));
    }
    return std::round(turn / (2.0 * kPi)) / 2.0;
}

void write_orientation_csv(const OrientationField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    out << "width,height\n" << field.width << ',' << field.height << "\nx,y,theta_radians,coherence\n";
    char buf[64];
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (!field.mask.contains(x, y)) {
                continue;
            }
            std::string row = std::to_string(x) + ',' + std::to_string(y) + ',';
            auto end = std::to_chars(buf, buf + sizeof(buf), field.theta(x, y)).ptr;
            row.append(buf, end);
            row += ',';
            end = std::to_chars(buf, buf + sizeof(buf), field.coherence(x, y)).ptr;
            row.append(buf, end);
            row += '\n';
            out << row;
        }
    }
    if (!out) {
        throw std::runtime_error("output: write failed for " + path.string());
    }
}

OrientationField read_orientation_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("input: unreadable");
    }
    std::string line;
    if (!std::getline(in, line) || line != "width,height") {
        throw InputError("input: orientation CSV lacks width,height header");
    }
    int w = 0;
    int h = 0;
    if (!std::getline(in, line) || std::sscanf(line.c_str(), "%d,%d", &w, &h) != 2 || w <= 0 || h <= 0) {
        throw InputError("input: malformed orientation CSV dimensions");
    }
    if (!std::getline(in, line) || line != "x,y,theta_radians,coherence") {
        throw InputError("input: orientation CSV lacks column header");
    }
    OrientationField field(w, h);
    field.mask = RegionMask(w, h, false);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        int x = 0;
        int y = 0;
        double theta = 0.0;
        double coherence = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &x, &y, &theta, &coherence) != 4 || x < 0 || y < 0 ||
            x >= w || y >= h) {
            throw InputError("input: malformed orientation CSV row");
        }
        field.set(x, y, theta, coherence);
        field.mask.set(x, y, true);
    }
    return field;
}

}  // namespace fpmod
