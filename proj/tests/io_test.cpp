#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <regex>
#include <sstream>

#include "ffac/io.hpp"
#include "ffac/synth.hpp"

using namespace ffac;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ffac_io_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    detail::write_file(p, std::vector<std::uint8_t>(text.begin(), text.end()));
}

}  // namespace

TEST(Pgm, TinyBinaryRoundTrip) {
    const fs::path dir = scratch_dir("pgm");
    const std::string raw = std::string("P5\n# comment\n2 2\n255\n") + std::string("\x00\x40\x80\xff", 4);
    write_text(dir / "a.pgm", raw);
    const GrayImage img = load_gray(dir / "a.pgm");
    ASSERT_EQ(img.width(), 2);
    ASSERT_EQ(img.height(), 2);
    EXPECT_DOUBLE_EQ(img(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(img(1, 0), 64.0 / 255.0);
    EXPECT_DOUBLE_EQ(img(0, 1), 128.0 / 255.0);
    EXPECT_DOUBLE_EQ(img(1, 1), 1.0);
    save_gray(img, dir / "b.pgm");
    EXPECT_EQ(load_gray(dir / "b.pgm"), img);
}

TEST(Pgm, SixteenBitScaledToEightBits) {
    const fs::path dir = scratch_dir("pgm16");
    write_text(dir / "a.pgm", std::string("P5 2 1 65535\n") + std::string("\x00\x00\xff\xff", 4));
    const GrayImage img = load_gray(dir / "a.pgm");
    EXPECT_DOUBLE_EQ(img(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(img(1, 0), 1.0);
}

TEST(Pgm, AsciiVariantRejected) {
    const fs::path dir = scratch_dir("pgm_ascii");
    write_text(dir / "a.pgm", "P2\n3 1\n10\n0 5 10\n");
    EXPECT_THROW(load_gray(dir / "a.pgm"), DecodeError);
}

TEST(Png, WhiteIsOne) {
    const fs::path dir = scratch_dir("png");
    save_gray(GrayImage(5, 4, 1.0), dir / "w.png");
    const GrayImage img = load_gray(dir / "w.png");
    EXPECT_EQ(img.width(), 5);
    EXPECT_EQ(img.height(), 4);
    for (double v : img.data()) EXPECT_EQ(v, 1.0);
}

TEST(Png, EightBitRoundTripIsExact) {
    const fs::path dir = scratch_dir("png_rt");
    std::mt19937_64 rng(71);
    GrayImage img(37, 23);
    for (auto& v : img.data()) v = static_cast<double>(rng() % 256) / 255.0;
    save_gray(img, dir / "r.png");
    EXPECT_EQ(load_gray(dir / "r.png"), img);
}

TEST(Png, SyntheticBytesAreStable) {
    const fs::path dir = scratch_dir("png_stable");
    save_gray(make_synthetic("two-holes", 160, 120).image, dir / "a.png");
    save_gray(make_synthetic("two-holes", 160, 120).image, dir / "b.png");
    EXPECT_EQ(detail::read_file(dir / "a.png"), detail::read_file(dir / "b.png"));
}

TEST(Mask, RoundTrips) {
    const fs::path dir = scratch_dir("mask");
    std::mt19937_64 rng(72);
    RegionMask random(31, 17);
    for (auto& v : random.data()) v = rng() % 2;
    for (const RegionMask& m : {RegionMask(31, 17, 0), RegionMask(31, 17, 1), random}) {
        save_mask(m, dir / "m.png");
        EXPECT_EQ(load_mask(dir / "m.png"), m);
    }
}

TEST(Decode, Errors) {
    const fs::path dir = scratch_dir("decode");
    EXPECT_THROW(load_gray(dir / "missing.png"), DecodeError);
    write_text(dir / "junk.png", "definitely not an image");
    EXPECT_THROW(load_gray(dir / "junk.png"), DecodeError);
    write_text(dir / "short.pgm", "P5\n4 4\n255\n\x01\x02");
    EXPECT_THROW(load_gray(dir / "short.pgm"), DecodeError);
    std::vector<std::uint8_t> png = detail::encode_png(detail::gray_pixels(GrayImage(8, 8, 0.5)));
    png.resize(png.size() / 2);
    detail::write_file(dir / "trunc.png", png);
    EXPECT_THROW(load_gray(dir / "trunc.png"), DecodeError);
}

TEST(Overlay, OnePathPerPatch) {
    const GrayImage img(100, 80, 0.5);
    const std::vector<FreeFormContour> comps{make_circle_contour({50, 40}, 30, 8),
                                             make_circle_contour({50, 40}, 10, 5)};
    const std::string svg = overlay_svg(img, comps);
    const std::regex path_re("<path class=\"c[0-9]+\"[^>]*stroke=\"red\"");
    const auto n = std::distance(std::sregex_iterator(svg.begin(), svg.end(), path_re), std::sregex_iterator());
    EXPECT_EQ(n, 13);
    EXPECT_NE(svg.find(" C "), std::string::npos);
}

TEST(Overlay, NonCubicPatchesAreDensePolylines) {
    const GrayImage img(100, 80, 0.5);
    const std::string svg = overlay_svg(img, {make_circle_contour({50, 40}, 30, 6, 4)});
    EXPECT_EQ(svg.find(" C "), std::string::npos);
    EXPECT_NE(svg.find(" L "), std::string::npos);
}

TEST(Overlay, NoComponentsIsPlainImage) {
    const GrayImage img(20, 10, 0.25);
    EXPECT_EQ(overlay_svg(img, {}).find("<path"), std::string::npos);
    const Pixels8 px = overlay_pixels(img, {});
    ASSERT_EQ(px.channels, 3);
    for (std::size_t i = 0; i < px.data.size(); i += 3) {
        EXPECT_EQ(px.data[i], px.data[i + 1]);
        EXPECT_EQ(px.data[i], px.data[i + 2]);
    }
}

TEST(Overlay, RedPixelsFollowTheCurve) {
    const GrayImage img(120, 100, 0.5);
    const FreeFormContour c = make_circle_contour({60, 50}, 35, 8);
    const Pixels8 px = overlay_pixels(img, {c});
    const auto dense = sample_contour(c, 400);
    auto near_curve = [&](double x, double y) {
        double best = 1e300;
        for (const auto& q : dense) best = std::min(best, distance(q, {x, y}));
        return best;
    };
    std::size_t red = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * img.width() + x) * 3;
            if (px.data[i] == 255 && px.data[i + 1] == 0 && px.data[i + 2] == 0) {
                ++red;
                EXPECT_LE(near_curve(x, y), 1.0);
            }
        }
    // Every dense sample lands on a red pixel.
    for (const auto& q : dense) {
        const std::size_t i = (static_cast<std::size_t>(std::lround(q.y)) * img.width() + std::lround(q.x)) * 3;
        EXPECT_EQ(px.data[i], 255);
        EXPECT_EQ(px.data[i + 1], 0);
    }
    EXPECT_GT(red, 150u);
}

TEST(Overlay, RenderWritesSvgAndPng) {
    const fs::path dir = scratch_dir("render");
    render_overlay(GrayImage(40, 30, 0.5), {make_circle_contour({20, 15}, 8, 4)}, dir / "ov");
    EXPECT_TRUE(fs::exists(dir / "ov.svg"));
    const Pixels8 px = load_pixels(dir / "ov.png", true);
    EXPECT_EQ(px.width, 40);
    EXPECT_EQ(px.channels, 3);
}

TEST(Json, ContourRoundTripIsExact) {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    FreeFormContour c = make_circle_contour({u(rng), u(rng)}, 123.456789, 11, 4);
    const FreeFormContour back = contour_from_json(json::parse(contour_to_json(c).dump()));
    EXPECT_EQ(back, c);
}

TEST(Json, ComponentSetRoundTrip) {
    ComponentSet set;
    set.outer = make_circle_contour({0, 0}, 50, 8);
    set.inner = {make_circle_contour({10, 0}, 5, 4), make_circle_contour({-10, 0}, 5, 4)};
    for (auto& c : set.inner) c.reverse();
    set.flips = 2;
    const fs::path dir = scratch_dir("json");
    save_json(components_to_json(set), dir / "c.json");
    const ComponentSet back = components_from_json(load_json(dir / "c.json"));
    EXPECT_EQ(back.outer, set.outer);
    ASSERT_EQ(back.inner.size(), 2u);
    EXPECT_EQ(back.inner[1], set.inner[1]);
    EXPECT_EQ(back.flips, 2u);
}

TEST(Json, MalformedContoursRejected) {
    EXPECT_THROW(contour_from_json(json::parse(R"({"degree": 3})")), DecodeError);
    EXPECT_THROW(contour_from_json(json::parse(R"({"degree": 1, "patches": [[[0,0],[1,0],[2,0]]]})")), DecodeError);
    EXPECT_THROW(contour_from_json(json::parse(R"({"degree": 1, "patches": [[[0,0],[1]]]})")), DecodeError);
    // Well-formed but open chain.
    EXPECT_THROW(contour_from_json(json::parse(R"({"degree": 1, "patches": [[[0,0],[1,0]],[[1,0],[1,1]],[[1,1],[0,2]]]})")),
                 StructuralError);
    const fs::path dir = scratch_dir("json_bad");
    write_text(dir / "bad.json", "{ not json");
    EXPECT_THROW(load_json(dir / "bad.json"), DecodeError);
}

TEST(AltitudeCsv, ParsesRows) {
    std::istringstream in("x, y, altitude_m\r\n1,2,0.5\n\n 3.5 ,4,-0.25\n");
    const auto rows = parse_altitude_csv(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].position, (Point2{1, 2}));
    EXPECT_DOUBLE_EQ(rows[0].altitude, 0.5);
    EXPECT_EQ(rows[1].position, (Point2{3.5, 4}));
    EXPECT_DOUBLE_EQ(rows[1].altitude, -0.25);
}

TEST(AltitudeCsv, Errors) {
    for (const char* text : {"", "a,b,c\n1,2,3\n", "x,y,altitude_m\n1,2\n", "x,y,altitude_m\n1,2,3,4\n",
                             "x,y,altitude_m\n1,two,3\n", "x,y,altitude_m\n1,2,3m\n"}) {
        std::istringstream in(text);
        EXPECT_THROW(parse_altitude_csv(in), DecodeError) << text;
    }
}

TEST(AltitudeCsv, FileRoundTrip) {
    const fs::path dir = scratch_dir("csv");
    const std::vector<AltitudeSample> rows{{{1.25, 2.5}, 0.3}, {{100, 7}, 1.0 / 3.0}};
    save_altitude_csv(rows, dir / "a.csv");
    const auto back = load_altitude_csv(dir / "a.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].position, rows[1].position);
    EXPECT_EQ(back[1].altitude, rows[1].altitude);
}
