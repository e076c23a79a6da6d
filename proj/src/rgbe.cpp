#include "panolum/rgbe.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace panolum {

std::array<float, 3> decode_rgbe(const std::array<std::uint8_t, 4>& quad) {
    if (quad[3] == 0)
        return {0.0f, 0.0f, 0.0f};
    double scale = std::ldexp(1.0, static_cast<int>(quad[3]) - 128) / 256.0;
    return {static_cast<float>((quad[0] + 0.5) * scale),
            static_cast<float>((quad[1] + 0.5) * scale),
            static_cast<float>((quad[2] + 0.5) * scale)};
}

std::array<std::uint8_t, 4> encode_rgbe(float r, float g, float b) {
    double maxc = std::max({static_cast<double>(r), static_cast<double>(g),
                            static_cast<double>(b)});
    if (!(maxc > 0.0))
        return {0, 0, 0, 0};
    int e = 0;
    std::frexp(maxc, &e);
    // Exponent byte stores e+128; below the representable range everything
    // quantizes to black, above it we saturate.
    if (e < -127)
        return {0, 0, 0, 0};
    if (e > 127)
        return {255, 255, 255, 255};
    double scale = std::ldexp(1.0, -e) * 256.0;
    auto quant = [&](double v) {
        int m = static_cast<int>(v * scale);
        return static_cast<std::uint8_t>(m > 255 ? 255 : m);
    };
    return {quant(r), quant(g), quant(b), static_cast<std::uint8_t>(e + 128)};
}

namespace {

constexpr int kMinRleWidth = 8;
constexpr int kMaxRleWidth = 32767;

bool read_line(std::istream& in, std::string& line) {
    line.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '\n') {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            return true;
        }
        line.push_back(static_cast<char>(c));
    }
    return !line.empty();
}

void decode_scanline_pixels(const std::vector<std::uint8_t>& quads, int width,
                            float* out) {
    for (int x = 0; x < width; ++x) {
        std::array<std::uint8_t, 4> q{quads[x * 4 + 0], quads[x * 4 + 1],
                                      quads[x * 4 + 2], quads[x * 4 + 3]};
        auto rgb = decode_rgbe(q);
        out[x * 3 + 0] = rgb[0];
        out[x * 3 + 1] = rgb[1];
        out[x * 3 + 2] = rgb[2];
    }
}

void read_scanline(std::istream& in, int width, float* out) {
    std::vector<std::uint8_t> quads(static_cast<std::size_t>(width) * 4);
    std::array<char, 4> head{};
    in.read(head.data(), 4);
    if (in.gcount() != 4)
        fail(Errc::truncated_scanline, "unexpected end of file in scanline");

    auto h = [&](int i) { return static_cast<std::uint8_t>(head[i]); };
    bool rle = width >= kMinRleWidth && width <= kMaxRleWidth && h(0) == 2 &&
               h(1) == 2 && (h(2) & 0x80) == 0;
    if (rle) {
        int marked = (h(2) << 8) | h(3);
        if (marked != width)
            fail(Errc::truncated_scanline, "RLE scanline width mismatch");
        for (int ch = 0; ch < 4; ++ch) {
            int x = 0;
            while (x < width) {
                int code = in.get();
                if (code == EOF)
                    fail(Errc::truncated_scanline, "truncated RLE scanline");
                if (code > 128) {
                    int run = code - 128;
                    int value = in.get();
                    if (value == EOF || x + run > width)
                        fail(Errc::truncated_scanline, "bad RLE run");
                    for (int i = 0; i < run; ++i)
                        quads[(x + i) * 4 + ch] = static_cast<std::uint8_t>(value);
                    x += run;
                } else if (code > 0) {
                    if (x + code > width)
                        fail(Errc::truncated_scanline, "bad RLE literal");
                    for (int i = 0; i < code; ++i) {
                        int value = in.get();
                        if (value == EOF)
                            fail(Errc::truncated_scanline, "truncated RLE literal");
                        quads[(x + i) * 4 + ch] = static_cast<std::uint8_t>(value);
                    }
                    x += code;
                } else {
                    fail(Errc::truncated_scanline, "zero-length RLE code");
                }
            }
        }
    } else {
        quads[0] = h(0);
        quads[1] = h(1);
        quads[2] = h(2);
        quads[3] = h(3);
        std::size_t rest = quads.size() - 4;
        in.read(reinterpret_cast<char*>(quads.data() + 4),
                static_cast<std::streamsize>(rest));
        if (static_cast<std::size_t>(in.gcount()) != rest)
            fail(Errc::truncated_scanline, "truncated flat scanline");
    }
    decode_scanline_pixels(quads, width, out);
}

void write_rle_component(std::ostream& out, const std::vector<std::uint8_t>& data) {
    constexpr int kMinRun = 4;
    const int n = static_cast<int>(data.size());
    int pos = 0;
    while (pos < n) {
        // Find the next run of at least kMinRun identical bytes.
        int run_start = pos;
        int run_len = 0;
        while (run_start < n) {
            run_len = 1;
            while (run_len < 127 && run_start + run_len < n &&
                   data[run_start + run_len] == data[run_start])
                ++run_len;
            if (run_len >= kMinRun)
                break;
            run_start += run_len;
        }
        if (run_start >= n)
            run_len = 0;
        // Emit literals up to the run.
        int lit = run_start - pos;
        while (lit > 0) {
            int chunk = lit > 128 ? 128 : lit;
            out.put(static_cast<char>(chunk));
            out.write(reinterpret_cast<const char*>(data.data() + pos), chunk);
            pos += chunk;
            lit -= chunk;
        }
        if (run_len >= kMinRun) {
            out.put(static_cast<char>(128 + run_len));
            out.put(static_cast<char>(data[run_start]));
            pos = run_start + run_len;
        }
    }
}

} // namespace

HdrImage read_hdr(std::istream& in) {
    std::string line;
    if (!read_line(in, line) ||
        (line.rfind("#?RADIANCE", 0) != 0 && line.rfind("#?RGBE", 0) != 0))
        fail(Errc::malformed_header, "missing #?RADIANCE magic");

    HdrImage img;
    bool format_seen = false;
    double exposure = 1.0;
    for (;;) {
        if (!read_line(in, line))
            fail(Errc::malformed_header, "header ended before blank line");
        if (line.empty())
            break;
        if (line.rfind("FORMAT=", 0) == 0) {
            if (line.substr(7) != "32-bit_rle_rgbe")
                fail(Errc::malformed_header, "unsupported FORMAT: " + line);
            format_seen = true;
        } else if (line.rfind("EXPOSURE=", 0) == 0) {
            std::size_t used = 0;
            double e = 0.0;
            try {
                e = std::stod(line.substr(9), &used);
            } catch (const std::exception&) {
                fail(Errc::malformed_header, "bad EXPOSURE value: " + line);
            }
            if (!(e > 0.0) || !std::isfinite(e))
                fail(Errc::malformed_header, "non-positive EXPOSURE: " + line);
            exposure *= e;
        } else {
            img.header_lines.push_back(line);
        }
    }
    if (!format_seen)
        fail(Errc::malformed_header, "missing FORMAT=32-bit_rle_rgbe");

    if (!read_line(in, line))
        fail(Errc::malformed_header, "missing resolution line");
    int w = 0, h = 0;
    char sign1 = 0, axis1 = 0, sign2 = 0, axis2 = 0;
    std::istringstream res(line);
    std::string tok1, tok2;
    if (!(res >> tok1 >> h >> tok2 >> w) || tok1.size() != 2 || tok2.size() != 2)
        fail(Errc::malformed_header, "unparseable resolution line: " + line);
    sign1 = tok1[0];
    axis1 = tok1[1];
    sign2 = tok2[0];
    axis2 = tok2[1];
    if (sign1 != '-' || axis1 != 'Y' || sign2 != '+' || axis2 != 'X')
        fail(Errc::unsupported_orientation,
             "only -Y H +X W orientation is supported, got: " + line);
    if (w <= 0 || h <= 0)
        fail(Errc::malformed_header, "non-positive resolution");

    img.width = w;
    img.height = h;
    img.exposure = exposure;
    img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y)
        read_scanline(in, w, img.at(0, y));

    float inv = static_cast<float>(1.0 / exposure);
    for (float& v : img.pixels)
        v *= inv;
    return img;
}

HdrImage read_hdr_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::io_failure, "cannot open " + path);
    return read_hdr(in);
}

void write_hdr(const HdrImage& img, std::ostream& out) {
    out << "#?RADIANCE\n";
    for (const std::string& line : img.header_lines)
        out << line << "\n";
    out << "FORMAT=32-bit_rle_rgbe\n";
    out << "EXPOSURE=1.0\n\n";
    out << "-Y " << img.height << " +X " << img.width << "\n";

    const bool rle = img.width >= kMinRleWidth && img.width <= kMaxRleWidth;
    std::vector<std::uint8_t> comp[4];
    for (int y = 0; y < img.height; ++y) {
        const float* row = img.at(0, y);
        if (rle) {
            for (auto& c : comp)
                c.assign(static_cast<std::size_t>(img.width), 0);
            for (int x = 0; x < img.width; ++x) {
                auto q = encode_rgbe(row[x * 3], row[x * 3 + 1], row[x * 3 + 2]);
                for (int ch = 0; ch < 4; ++ch)
                    comp[ch][x] = q[ch];
            }
            out.put(2);
            out.put(2);
            out.put(static_cast<char>((img.width >> 8) & 0x7f));
            out.put(static_cast<char>(img.width & 0xff));
            for (const auto& c : comp)
                write_rle_component(out, c);
        } else {
            for (int x = 0; x < img.width; ++x) {
                auto q = encode_rgbe(row[x * 3], row[x * 3 + 1], row[x * 3 + 2]);
                out.write(reinterpret_cast<const char*>(q.data()), 4);
            }
        }
    }
}

void write_hdr_file(const HdrImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(Errc::io_failure, "cannot open " + path + " for writing");
    write_hdr(img, out);
    out.flush();
    if (!out)
        fail(Errc::io_failure, "write failed: " + path);
}

} // namespace panolum
