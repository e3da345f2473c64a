#include <gtest/gtest.h>

#include "fpmod/segment.hpp"
#include "test_util.hpp"

using namespace fpmod;

TEST(Segment, ConstantImageIsEmpty) {
    const GrayImage img(64, 48, std::vector<double>(64 * 48, 0.4));
    EXPECT_TRUE(segment(img).empty());
}

TEST(Segment, FullFrameStripesCoverInterior) {
    const auto img = testutil::stripes(256, 256, 0.4, 8.0);
    const auto mask = segment(img);
    std::size_t inside = 0, total = 0;
    for (int y = 16; y < 240; ++y) {
        for (int x = 16; x < 240; ++x) {
            ++total;
            inside += mask.contains(x, y);
        }
    }
    EXPECT_GE(static_cast<double>(inside) / static_cast<double>(total), 0.95);
}

TEST(Segment, HalfPatternStaysLeft) {
    auto img = testutil::stripes(256, 128, 0.0, 8.0);
    for (int y = 0; y < 128; ++y) {
        for (int x = 128; x < 256; ++x) {
            img.pixels[static_cast<std::size_t>(y) * 256 + x] = 0.5;
        }
    }
    const SegmentConfig cfg;
    const auto mask = segment(img, cfg);
    EXPECT_FALSE(mask.empty());
    for (int y = 0; y < 128; ++y) {
        for (int x = 128 + cfg.block_size; x < 256; ++x) {
            EXPECT_FALSE(mask.contains(x, y)) << x << "," << y;
        }
    }
}

TEST(Segment, KeepsLargestComponentOnly) {
    // two separate patches: a large one left, a small one far right
    auto img = GrayImage(320, 128, std::vector<double>(320 * 128, 0.5));
    const auto st = testutil::stripes(320, 128, 0.0, 8.0);
    for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 320; ++x) {
            if (x < 160 || (x >= 272 && y >= 48 && y < 96)) {
                img.pixels[static_cast<std::size_t>(y) * 320 + x] = st.pixels[static_cast<std::size_t>(y) * 320 + x];
            }
        }
    }
    const auto mask = segment(img);
    EXPECT_TRUE(mask.contains(64, 64));
    EXPECT_FALSE(mask.contains(290, 70));
}

TEST(Segment, ThresholdMonotonicity) {
    auto img = testutil::stripes(192, 192, 0.7, 9.0);
    // fade contrast towards the right edge
    for (int y = 0; y < 192; ++y) {
        for (int x = 0; x < 192; ++x) {
            double& v = img.pixels[static_cast<std::size_t>(y) * 192 + x];
            v = 0.5 + (v - 0.5) * (1.0 - x / 192.0);
        }
    }
    SegmentConfig a;
    SegmentConfig b = a;
    b.min_stddev = 0.1;
    SegmentConfig c = a;
    c.min_coherence = 0.6;
    const auto ma = segment(img, a);
    for (const auto& tighter : {segment(img, b), segment(img, c)}) {
        for (std::size_t i = 0; i < ma.inside.size(); ++i) {
            EXPECT_TRUE(!tighter.inside[i] || ma.inside[i]);
        }
    }
}

TEST(ErodeMask, MarginZeroIsIdentity) {
    RegionMask m(10, 8);
    m.set(3, 3, true);
    m.set(4, 3, true);
    EXPECT_EQ(erode_mask(m, 0), m);
}

TEST(ErodeMask, RectangleShrinks) {
    RegionMask m(40, 30, true);
    const auto e = erode_mask(m, 5);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 40; ++x) {
            const bool want = x >= 5 && x < 35 && y >= 5 && y < 25;
            EXPECT_EQ(e.contains(x, y), want) << x << "," << y;
        }
    }
    const auto s = erode_mask(m, 5, StructuringElement::Square);
    EXPECT_EQ(s, e);
}

TEST(ErodeMask, EmptyStaysEmptyAndSubset) {
    RegionMask empty(20, 20);
    EXPECT_TRUE(erode_mask(empty, 3).empty());
    RegionMask blob(30, 30);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
            blob.set(x, y, (x - 15) * (x - 15) + (y - 14) * (y - 14) < 120);
        }
    }
    const auto e = erode_mask(blob, 2);
    for (std::size_t i = 0; i < blob.inside.size(); ++i) {
        EXPECT_TRUE(!e.inside[i] || blob.inside[i]);
    }
}

TEST(ErodeMask, SquareComposes) {
    RegionMask m(50, 40);
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 50; ++x) {
            m.set(x, y, (x > 4 && x < 45 && y > 3 && y < 36) && !(x > 20 && x < 26 && y > 10));
        }
    }
    for (int a = 0; a <= 3; ++a) {
        for (int b = 0; b <= 3; ++b) {
            EXPECT_EQ(erode_mask(m, a + b, StructuringElement::Square),
                      erode_mask(erode_mask(m, a, StructuringElement::Square), b, StructuringElement::Square));
        }
    }
}

TEST(MaskPgm, RoundTrip) {
    testutil::TempDir dir("segment");
    RegionMask m(7, 5);
    m.set(1, 1, true);
    m.set(6, 4, true);
    write_mask_pgm(m, dir / "m.pgm");
    EXPECT_EQ(read_mask_pgm(dir / "m.pgm"), m);
    const auto img = load_gray(dir / "m.pgm");
    EXPECT_EQ(img.at(1, 1), 1.0);
    EXPECT_EQ(img.at(0, 0), 0.0);
}
