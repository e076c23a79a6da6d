#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "panolum/png_io.hpp"
#include "panolum/rgbe.hpp"
#include "support.hpp"

using namespace panolum;

namespace {

std::string minimal_hdr(const std::string& extra_header,
                        const std::array<std::uint8_t, 4>& quad) {
    std::string s = "#?RADIANCE\n";
    s += extra_header;
    s += "FORMAT=32-bit_rle_rgbe\n\n-Y 1 +X 1\n";
    s.append(reinterpret_cast<const char*>(quad.data()), 4);
    return s;
}

HdrImage random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 50.0f);
    HdrImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (auto& v : img.pixels)
        v = dist(rng);
    return img;
}

double max_roundtrip_error(const HdrImage& a, const HdrImage& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        const float* pa = a.pixels.data() + i * 3;
        const float* pb = b.pixels.data() + i * 3;
        double maxc = std::max({pa[0], pa[1], pa[2]});
        if (maxc <= 0.0)
            continue;
        for (int c = 0; c < 3; ++c)
            worst = std::max(worst, std::fabs(double(pa[c]) - pb[c]) / maxc);
    }
    return worst;
}

} // namespace

TEST_CASE("rgbe decode reference values") {
    auto black = decode_rgbe({0, 0, 0, 0});
    CHECK(black[0] == 0.0f);
    CHECK(black[1] == 0.0f);
    CHECK(black[2] == 0.0f);

    auto one = decode_rgbe({128, 128, 128, 129});
    CHECK(one[0] == doctest::Approx(1.00390625).epsilon(1e-12));
    CHECK(one[1] == doctest::Approx(1.00390625).epsilon(1e-12));

    auto red = decode_rgbe({255, 0, 0, 136});
    CHECK(red[0] == doctest::Approx(255.5).epsilon(1e-12));
    CHECK(red[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(red[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rgbe encode reference values") {
    CHECK(encode_rgbe(0, 0, 0) == std::array<std::uint8_t, 4>{0, 0, 0, 0});
    CHECK(encode_rgbe(1, 1, 1) == std::array<std::uint8_t, 4>{128, 128, 128, 129});
}

TEST_CASE("rgbe decode(encode) error bound over magnitude grid") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(0.0, 1.0);
    for (int e = -120; e <= 120; e += 4) {
        for (int i = 0; i < 64; ++i) {
            double scale = std::ldexp(1.0, e);
            float r = static_cast<float>((0.5 + 0.5 * mant(rng)) * scale);
            float g = static_cast<float>(mant(rng) * scale);
            float b = static_cast<float>(mant(rng) * scale);
            auto back = decode_rgbe(encode_rgbe(r, g, b));
            double maxc = std::max({r, g, b});
            for (int c = 0; c < 3; ++c) {
                double err = std::fabs(double(back[c]) -
                                       double(c == 0 ? r : (c == 1 ? g : b))) / maxc;
                CHECK(err <= 1.0 / 256.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("read_hdr parses a minimal flat file") {
    auto quad = encode_rgbe(1, 1, 1);
    std::istringstream in(minimal_hdr("", quad));
    HdrImage img = read_hdr(in);
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    CHECK(img.pixels[0] == doctest::Approx(1.00390625).epsilon(1e-9));
    CHECK(img.exposure == doctest::Approx(1.0));
}

TEST_CASE("read_hdr divides by cumulative exposure") {
    auto quad = encode_rgbe(1, 1, 1);
    std::istringstream one(minimal_hdr("EXPOSURE=2.0\n", quad));
    HdrImage half = read_hdr(one);
    CHECK(half.pixels[0] == doctest::Approx(1.00390625 / 2.0).epsilon(1e-9));
    CHECK(half.exposure == doctest::Approx(2.0));

    // stacked EXPOSURE lines multiply
    std::istringstream two(minimal_hdr("EXPOSURE=2.0\nEXPOSURE=3.0\n", quad));
    HdrImage sixth = read_hdr(two);
    CHECK(sixth.pixels[0] == doctest::Approx(1.00390625 / 6.0).epsilon(1e-6));
    CHECK(sixth.exposure == doctest::Approx(6.0));
}

TEST_CASE("read_hdr header errors") {
    auto quad = encode_rgbe(1, 1, 1);
    {
        std::istringstream in("nonsense\n");
        CHECK_THROWS_WITH_AS(read_hdr(in), doctest::Contains("magic"), Error);
    }
    {
        std::string s = "#?RADIANCE\n\n-Y 1 +X 1\n";
        s.append(reinterpret_cast<const char*>(quad.data()), 4);
        std::istringstream in(s);
        try {
            read_hdr(in);
            FAIL("expected malformed_header");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::malformed_header);
        }
    }
    {
        std::string s = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n+Y 1 +X 1\n";
        s.append(reinterpret_cast<const char*>(quad.data()), 4);
        std::istringstream in(s);
        try {
            read_hdr(in);
            FAIL("expected unsupported_orientation");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::unsupported_orientation);
        }
    }
    {
        std::string s = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 2 +X 2\n";
        s.append(reinterpret_cast<const char*>(quad.data()), 4); // one of four pixels
        std::istringstream in(s);
        try {
            read_hdr(in);
            FAIL("expected truncated_scanline");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::truncated_scanline);
        }
    }
}

TEST_CASE("write_hdr roundtrip is identity within quantization") {
    HdrImage img = random_image(16, 8, 42);
    std::ostringstream out;
    write_hdr(img, out);
    std::istringstream in(out.str());
    HdrImage back = read_hdr(in);
    REQUIRE(back.width == 16);
    REQUIRE(back.height == 8);
    CHECK(max_roundtrip_error(img, back) <= 1.0 / 256.0 + 1e-9);
}

TEST_CASE("write_hdr black image roundtrips exactly") {
    HdrImage img = HdrImage::filled(1, 1, 0, 0, 0);
    std::ostringstream out;
    write_hdr(img, out);
    std::istringstream in(out.str());
    HdrImage back = read_hdr(in);
    CHECK(back.pixels[0] == 0.0f);
    CHECK(back.pixels[1] == 0.0f);
    CHECK(back.pixels[2] == 0.0f);
}

TEST_CASE("write_hdr uses RLE for constant images") {
    HdrImage img = HdrImage::filled(64, 32, 0.25f, 0.5f, 0.75f);
    std::ostringstream out;
    write_hdr(img, out);
    CHECK(out.str().size() < 4u * 64 * 32); // far below the flat payload alone
    std::istringstream in(out.str());
    HdrImage back = read_hdr(in);
    CHECK(max_roundtrip_error(img, back) <= 1.0 / 256.0 + 1e-9);
}

TEST_CASE("write_hdr falls back to flat scanlines for narrow images") {
    HdrImage img = random_image(4, 3, 9);
    std::ostringstream out;
    write_hdr(img, out);
    std::istringstream in(out.str());
    HdrImage back = read_hdr(in);
    CHECK(max_roundtrip_error(img, back) <= 1.0 / 256.0 + 1e-9);
}

TEST_CASE("write_hdr keeps opaque header lines and re-export is stable") {
    auto quad = encode_rgbe(2, 2, 2);
    std::istringstream in(
        minimal_hdr("# a comment\nPRIMARIES=0.64 0.33 0.3 0.6 0.15 0.06 0.3127 0.329\n",
                    quad));
    HdrImage img = read_hdr(in);
    REQUIRE(img.header_lines.size() == 2);
    std::ostringstream out1, out2;
    write_hdr(img, out1);
    write_hdr(img, out2);
    CHECK(out1.str() == out2.str());
    CHECK(out1.str().find("PRIMARIES=") != std::string::npos);
    CHECK(out1.str().find("EXPOSURE=1.0") != std::string::npos);
}

TEST_CASE("png writer output decodes to the source raster") {
    Raster8 raster(1, 1);
    raster.at(0, 0)[0] = 255;

    auto bytes = encode_png(raster);
    auto probe = testsupport::parse_png(bytes);
    REQUIRE(probe.width == 1);
    REQUIRE(probe.height == 1);
    CHECK(probe.rgb[0] == 255);
    CHECK(probe.rgb[1] == 0);
    CHECK(probe.rgb[2] == 0);

    CHECK(encode_png(raster) == bytes); // deterministic
}

TEST_CASE("png writer reports io failures") {
    Raster8 raster(2, 2);
    try {
        write_raster_png(raster, "/nonexistent-dir/out.png");
        FAIL("expected io_failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io_failure);
    }
}

TEST_CASE("png file writing works end to end") {
    namespace fs = std::filesystem;
    Raster8 raster(3, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
            raster.at(x, y)[1] = static_cast<std::uint8_t>(40 * (x + y));
    fs::path path = fs::temp_directory_path() / "panolum_png_test.png";
    write_raster_png(raster, path.string());
    std::ifstream in(path, std::ios::binary);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    auto probe = testsupport::parse_png(bytes);
    CHECK(probe.width == 3);
    CHECK(probe.height == 2);
    CHECK(probe.rgb == raster.data);
    fs::remove(path);
}
