#include <gtest/gtest.h>

#include <random>

#include "fsvd/device.hpp"
#include "fsvd/io.hpp"
#include "fsvd/pgm.hpp"
#include "fsvd/plan_json.hpp"

using namespace fsvd;

namespace {

pgm::Image random_image(std::mt19937_64& gen) {
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    std::uniform_int_distribution<unsigned> mv(1, 65535);
    pgm::Image img;
    img.width = dim(gen);
    img.height = dim(gen);
    img.maxval = gen() % 3 == 0 ? 255 : mv(gen);
    std::uniform_int_distribution<unsigned> px(0, img.maxval);
    for (std::size_t i = 0; i < img.width * img.height; ++i) img.pixels.push_back(static_cast<std::uint16_t>(px(gen)));
    return img;
}

FramePlan random_plan(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FramePlan p;
    p.frame_time = std::abs(u(gen)) + 1e-3;
    p.pulse_period = 1e-3 * (1 + std::abs(u(gen)));
    p.dots_per_pulse = static_cast<long long>(gen() % 5 + 1);
    p.voxel_count = gen() % 50;
    for (int h = 0; h < static_cast<int>(gen() % 4); ++h) {
        HologramPattern pat{h, {}};
        for (int k = 0; k < static_cast<int>(gen() % 5); ++k) pat.offsets.emplace_back(u(gen) * 1e-4, u(gen) * 1e-4);
        p.holograms.push_back(pat);
    }
    for (int s = 0; s < static_cast<int>(gen() % 20); ++s) {
        PlanSlot slot{u(gen), {u(gen) * 0.17, u(gen) * 0.17}, 0.08 + u(gen) * 0.03, static_cast<int>(gen() % 4), {}};
        for (int k = 0; k < static_cast<int>(gen() % 5); ++k) slot.voxels.push_back(gen() % 50);
        p.slots.push_back(slot);
    }
    return p;
}

template <typename Fn>
void expect_format_error(Fn&& fn, int line, const char* fragment) {
    try {
        fn();
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.line(), line) << e.what();
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

} // namespace

// ---------------------------------------------------------------------------
// PGM

TEST(Pgm, RoundTripIsByteExact) {
    std::mt19937_64 gen(51);
    for (int i = 0; i < 500; ++i) {
        const auto img = random_image(gen);
        const auto bytes = pgm::encode(img);
        const auto back = pgm::decode(bytes);
        EXPECT_EQ(back.pixels, img.pixels);
        EXPECT_EQ(pgm::encode(back), bytes);
    }
}

TEST(Pgm, HeaderCommentsAndBigEndian) {
    const std::string bytes = std::string("P5\n# made by hand\n2 1 # w h\n65535\n") + '\x12' + '\x34' + '\xff' + '\x00';
    const auto img = pgm::decode(bytes);
    EXPECT_EQ(img.width, 2u);
    EXPECT_EQ(img.pixels[0], 0x1234);
    EXPECT_EQ(img.pixels[1], 0xff00);
}

TEST(Pgm, MalformedInputs) {
    EXPECT_THROW(pgm::decode("P2\n1 1\n255\n0"), FormatError);
    EXPECT_THROW(pgm::decode("P5\n1 1\n70000\n\0\0"), FormatError);
    EXPECT_THROW(pgm::decode("P5\n1 1\n0\n\0"), FormatError);
    EXPECT_THROW(pgm::decode("P5\n2 2\n255\n\x01\x02"), FormatError);
    EXPECT_THROW(pgm::decode(std::string("P5\n1 1\n200\n") + '\xff'), FormatError);
    EXPECT_THROW(pgm::decode("P5\n0 1\n255\n"), FormatError);
    EXPECT_THROW(pgm::decode("P5\nx 1\n255\n\0"), FormatError);
    EXPECT_THROW(pgm::decode("P5\n99999999 99999999\n255\n\0"), FormatError);
    EXPECT_THROW(pgm::decode(""), FormatError);
}

TEST(Pgm, FuzzedBytesNeverCrash) {
    std::mt19937_64 gen(52);
    const auto good = pgm::encode(random_image(gen));
    for (int i = 0; i < 2000; ++i) {
        std::string b = good;
        const int edits = 1 + static_cast<int>(gen() % 4);
        for (int e = 0; e < edits; ++e) {
            const auto pos = gen() % b.size();
            switch (gen() % 3) {
            case 0: b[pos] = static_cast<char>(gen()); break;
            case 1: b.erase(pos, 1); break;
            default: b.insert(pos, 1, static_cast<char>(gen())); break;
            }
        }
        try {
            const auto img = pgm::decode(b);
            EXPECT_EQ(img.pixels.size(), img.width * img.height);
        } catch (const FormatError&) {
        }
    }
}

TEST(PhaseMap, LevelMapping) {
    EXPECT_EQ(pgm::phase_to_level(0.0), 0);
    EXPECT_EQ(pgm::phase_to_level(std::numbers::pi), 32768);
    EXPECT_EQ(pgm::phase_to_level(kTwoPi - 1e-12), 0);
    EXPECT_EQ(pgm::phase_to_level(-kTwoPi / 65536), 65535);
    for (unsigned v = 0; v < 65536; v += 97)
        EXPECT_EQ(pgm::phase_to_level(pgm::level_to_phase(static_cast<std::uint16_t>(v))), v);
}

TEST(PhaseMap, RoundTripIsByteExact) {
    std::mt19937_64 gen(53);
    std::uniform_real_distribution<double> ph(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 2 * (1 + gen() % 24);
        std::vector<double> phases(n * n);
        for (auto& p : phases) p = ph(gen);
        const auto bytes = pgm::encode(pgm::from_phase({n, 20e-6, phases}));
        const auto holo = pgm::to_phase(pgm::decode(bytes));
        EXPECT_EQ(pgm::encode(pgm::from_phase(holo)), bytes);
        for (std::size_t k = 0; k < phases.size(); ++k) {
            const double d = std::abs(wrap_phase(phases[k]) - holo.phases()[k]);
            EXPECT_LE(std::min(d, kTwoPi - d), kTwoPi / 65536 / 2 + 1e-12);
        }
    }
}

TEST(PhaseMap, StrictGeometry) {
    EXPECT_THROW(pgm::to_phase({4, 4, 255, std::vector<std::uint16_t>(16)}), FormatError);
    EXPECT_THROW(pgm::to_phase({4, 2, 65535, std::vector<std::uint16_t>(8)}), FormatError);
    EXPECT_THROW(pgm::to_phase({3, 3, 65535, std::vector<std::uint16_t>(9)}), FormatError);
}

TEST(IntensityMap, PeakScaling) {
    Grid<double> g(2, std::vector<double>{0.0, 1.0, 2.0, 4.0});
    pgm::Image img;
    EXPECT_DOUBLE_EQ(pgm::from_intensity(g, img), 4.0);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{0, 16384, 32768, 65535}));
    Grid<double> z(2, 0.0);
    EXPECT_DOUBLE_EQ(pgm::from_intensity(z, img), 0.0);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>(4, 0)));
}

// ---------------------------------------------------------------------------
// Spots

TEST(Spots, ParseAndFormat) {
    const auto s = io::parse_spots("# comment\n3 0 1\n\n  10\t12 0.5 80  # trailing\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1].vx, 10);
    EXPECT_EQ(s[1].vy, 12);
    EXPECT_DOUBLE_EQ(s[1].desired_intensity, 0.5);
    EXPECT_NEAR(*s[1].axial_focus_f, 0.08, 1e-15);
    EXPECT_FALSE(s[0].axial_focus_f);
    EXPECT_EQ(io::format_spots(s), "# vx_px vy_px intensity_rel focal_f_mm\n3 0 1\n10 12 0.5 80\n");
}

TEST(Spots, RoundTripIsByteExact) {
    std::mt19937_64 gen(54);
    std::uniform_real_distribution<double> u(1e-3, 10.0), f(-500.0, 500.0);
    for (int i = 0; i < 300; ++i) {
        std::vector<SpotTarget> spots;
        for (int k = 0; k < static_cast<int>(gen() % 10); ++k) {
            SpotTarget t{static_cast<int>(gen() % 256), static_cast<int>(gen() % 256), u(gen), {}};
            if (gen() % 2) t.axial_focus_f = f(gen) * 1e-3;
            spots.push_back(t);
        }
        const auto text = io::format_spots(spots);
        EXPECT_EQ(io::format_spots(io::parse_spots(text)), text);
    }
}

TEST(Spots, ErrorsCarryLineNumbers) {
    expect_format_error([] { io::parse_spots("1 2 1\n1 x 1\n"); }, 2, "invalid vy");
    expect_format_error([] { io::parse_spots("# h\n\n1 2\n"); }, 3, "expected");
    expect_format_error([] { io::parse_spots("1 2 1 4 5\n"); }, 1, "expected");
    expect_format_error([] { io::parse_spots("1 2 nan\n"); }, 1, "intensity");
}

// ---------------------------------------------------------------------------
// Clouds

TEST(Cloud, ParseAndFormat) {
    const auto c = io::parse_cloud("x_mm,y_mm,z_mm,weight\n1, 2, -3, 0.5\n# skip\n0,0,0,1\n", Bounds3{});
    ASSERT_EQ(c.points.size(), 2u);
    EXPECT_NEAR(c.points[0].position.x, 1e-3, 1e-18);
    EXPECT_NEAR(c.points[0].position.z, -3e-3, 1e-18);
    EXPECT_DOUBLE_EQ(c.points[0].weight, 0.5);
    EXPECT_EQ(io::format_cloud(c, true), "x_mm,y_mm,z_mm,weight\n1,2,-3,0.5\n0,0,0,1\n");
    EXPECT_TRUE(io::parse_cloud("", Bounds3{}).points.empty());
}

TEST(Cloud, RoundTripIsByteExact) {
    std::mt19937_64 gen(55);
    std::uniform_real_distribution<double> u(-5e-3, 5e-3);
    for (int i = 0; i < 200; ++i) {
        VoxelCloud c;
        for (int k = 0; k < static_cast<int>(gen() % 30); ++k) c.points.push_back({{u(gen), u(gen), u(gen)}, 1.0});
        const auto text = io::format_cloud(c);
        EXPECT_EQ(io::format_cloud(io::parse_cloud(text, Bounds3{})), text);
    }
}

TEST(Cloud, Errors) {
    expect_format_error([] { io::parse_cloud("x,y,z\n", Bounds3{}); }, 1, "header");
    expect_format_error([] { io::parse_cloud("x_mm,y_mm,z_mm\n1,2\n", Bounds3{}); }, 2, "columns");
    expect_format_error([] { io::parse_cloud("x_mm,y_mm,z_mm\n1,2,q\n", Bounds3{}); }, 2, "z_mm");
    EXPECT_THROW(io::parse_cloud("x_mm,y_mm,z_mm\n6,0,0\n", Bounds3{}), DomainError);
    EXPECT_THROW(io::parse_cloud("x_mm,y_mm,z_mm,weight\n0,0,0,-1\n", Bounds3{}), DomainError);
}

// ---------------------------------------------------------------------------
// Plans

TEST(PlanJson, RoundTripIsByteExact) {
    std::mt19937_64 gen(56);
    for (int i = 0; i < 300; ++i) {
        const auto plan = random_plan(gen);
        const auto text = plan_to_string(plan);
        const auto back = plan_from_string(text);
        EXPECT_EQ(back, plan);
        EXPECT_EQ(plan_to_string(back), text);
    }
}

TEST(PlanJson, Errors) {
    EXPECT_THROW(plan_from_string("{"), FormatError);
    EXPECT_THROW(plan_from_string("{\"schema_version\": 2, \"kind\": \"frame_plan\"}"), FormatError);
    EXPECT_THROW(plan_from_string("{\"schema_version\": 1, \"kind\": \"other\"}"), FormatError);
    EXPECT_THROW(plan_from_string("{\"schema_version\": 1, \"kind\": \"frame_plan\"}"), FormatError);
    auto j = plan_to_json(FramePlan{});
    j["slots"] = ojson::array({{{"time_s", "soon"}}});
    EXPECT_THROW(plan_from_json(j), FormatError);
}

// ---------------------------------------------------------------------------
// Device profiles

TEST(Profile, FormatParseRoundTrip) {
    for (const auto& p : {system_a_profile(), system_b_profile()}) {
        const auto text = format_profile(p);
        const auto back = parse_profile(text);
        EXPECT_EQ(format_profile(back), text);
        EXPECT_EQ(back.name, p.name);
        EXPECT_EQ(back.has_slm, p.has_slm);
        EXPECT_DOUBLE_EQ(back.laser.repetition_rate, p.laser.repetition_rate);
    }
}

TEST(Profile, BaseOverride) {
    const auto p = parse_profile("base = system_a\n# faster SLM\nslm_response_s = 0.01\nname = fast\n");
    EXPECT_EQ(p.name, "fast");
    EXPECT_DOUBLE_EQ(p.slm_response, 0.01);
    EXPECT_DOUBLE_EQ(p.galvano_rate, 1e3);
}

TEST(Profile, Errors) {
    expect_format_error([] { parse_profile("base = system_a\nbogus = 1\n"); }, 2, "unknown key");
    expect_format_error([] { parse_profile("base = system_a\nslm_response_s = fast\n"); }, 2, "invalid number");
    expect_format_error([] { parse_profile("name = x\nbase = system_a\n"); }, 2, "first");
    expect_format_error([] { parse_profile("base = system_a\nslm_response_s = 1\nslm_response_s = 2\n"); }, 3, "duplicate");
    expect_format_error([] { parse_profile("base = system_c\n"); }, 1, "unknown base");
    expect_format_error([] { parse_profile("base = system_a\nhas_slm = maybe\n"); }, 2, "has_slm");
    expect_format_error([] { parse_profile("name = partial\n"); }, 0, "missing key");
    expect_format_error([] { parse_profile("base = system_a\nslm_response_s = -1\n"); }, 0, "invalid profile");
}

TEST(Profile, PresetFilesMatchBuiltins) {
    const char* dir = std::getenv(kPresetDirEnv);
    if (!dir) GTEST_SKIP() << "preset directory not configured";
    for (const auto& name : builtin_profile_names())
        EXPECT_EQ(format_profile(load_profile(name)), format_profile(*builtin_profile(name))) << name;
}

// ---------------------------------------------------------------------------
// Image -> spots

TEST(ImageToSpots, BlackImageGivesNone) {
    const pgm::Image img{8, 8, 255, std::vector<std::uint16_t>(64, 0)};
    EXPECT_TRUE(io::image_to_spots(img, 32, 0.5).empty());
}

TEST(ImageToSpots, SingleBrightPixel) {
    pgm::Image img{8, 8, 255, std::vector<std::uint16_t>(64, 0)};
    img.pixels[3 * 8 + 5] = 200;
    const auto s = io::image_to_spots(img, 32, 0.5);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].vx, 5);
    EXPECT_EQ(s[0].vy, 3);
    EXPECT_NEAR(s[0].desired_intensity, 200.0 / 255.0, 1e-15);
}

TEST(ImageToSpots, CheckerboardCounting) {
    pgm::Image img{8, 8, 255, {}};
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x) img.pixels.push_back((x + y) % 2 == 0 ? 255 : 0);
    const auto all = io::image_to_spots(img, 1000, 0.5);
    EXPECT_EQ(all.size(), 32u);
    const auto capped = io::image_to_spots(img, 10, 0.5);
    EXPECT_EQ(capped.size(), 10u);
    for (const auto& s : capped) EXPECT_EQ((s.vx + s.vy) % 2, 0);
    EXPECT_THROW(io::image_to_spots(img, 10, 1.0), DomainError);
}
