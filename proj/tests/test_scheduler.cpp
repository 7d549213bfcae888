#include <gtest/gtest.h>

#include <random>

#include "fsvd/scheduler.hpp"

using namespace fsvd;

namespace {

// 100 copies of one 2x2 cluster (0.1 mm pitch) on a 0.8 mm lattice, z = 0.
VoxelCloud clusters400() {
    VoxelCloud c;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (auto [dx, dy] : {std::pair{0.0, 0.0}, {1e-4, 0.0}, {0.0, 1e-4}, {1e-4, 1e-4}})
                c.points.push_back({{-4e-3 + i * 0.8e-3 + dx, -4e-3 + j * 0.8e-3 + dy, 0.0}, 1.0});
    return c;
}

VoxelCloud random_cloud(std::size_t count, std::uint64_t seed, double z_span = 5e-3) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> xy(-5e-3, 5e-3), z(-z_span, z_span);
    VoxelCloud c;
    for (std::size_t i = 0; i < count; ++i) c.points.push_back({{xy(gen), xy(gen), z(gen)}, 1.0});
    return c;
}

EnergyBudget budget_for(const DeviceProfile& p, double e_lbd) {
    return {p.laser.pulse_energy, e_lbd, p.slm_efficiency, p.train_efficiency};
}

// Loose device used for random-cloud properties: fast SLM, many layers fit.
DeviceProfile loose_profile() {
    DeviceProfile p = system_a_profile();
    p.slm_response = 1e-3;
    p.varifocal_response = 1e-3;
    return p;
}

PlannerOptions allow_changes() {
    PlannerOptions o;
    o.allow_hologram_change = true;
    return o;
}

} // namespace

TEST(Galvano, LinearMap) {
    const auto p = system_a_profile();
    EXPECT_EQ(xy_to_galvano(0, 0, p), (GalvanoAngles{0, 0}));
    const auto c = xy_to_galvano(5e-3, 5e-3, p);
    EXPECT_NEAR(c.x, 0.17, 1e-15);
    EXPECT_NEAR(c.y, 0.17, 1e-15);
    EXPECT_THROW(xy_to_galvano(5.1e-3, 0, p), DomainError);
    EXPECT_THROW(galvano_to_xy({0.2, 0}, p), DomainError);
}

TEST(Galvano, RoundTrip) {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> d(-5e-3, 5e-3);
    for (const auto& p : {system_a_profile(), system_b_profile()})
        for (int i = 0; i < 1000; ++i) {
            const double x = d(gen), y = d(gen);
            const auto [bx, by] = galvano_to_xy(xy_to_galvano(x, y, p), p);
            EXPECT_NEAR(bx, x, 1e-9 * 5e-3);
            EXPECT_NEAR(by, y, 1e-9 * 5e-3);
        }
}

TEST(PlanFrame, FourHundredVoxelsInHundredSlots) {
    const auto p = system_a_profile();
    const auto plan = plan_frame(clusters400(), p, budget_for(p, 0.2e-3), 0.1);
    EXPECT_EQ(plan.dots_per_pulse, 4);
    EXPECT_EQ(plan.slots.size(), 100u);
    EXPECT_EQ(plan.holograms.size(), 1u);
    EXPECT_LE(plan.duration(), 0.1 * (1 + 1e-9));
    EXPECT_TRUE(validate_plan(plan, p).empty());
    for (std::size_t k = 1; k < plan.slots.size(); ++k) EXPECT_NEAR(plan.slots[k].time - plan.slots[k - 1].time, 1e-3, 1e-12);
}

TEST(PlanFrame, EmptyCloud) {
    const auto p = system_a_profile();
    const auto plan = plan_frame({}, p, budget_for(p, 0.2e-3), 0.1);
    EXPECT_TRUE(plan.slots.empty());
    EXPECT_EQ(plan.duration(), 0.0);
    EXPECT_TRUE(validate_plan(plan, p).empty());
}

TEST(PlanFrame, DistinctHologramsAreSlmBound) {
    const auto p = system_a_profile();
    const auto cloud = random_cloud(40, 42, 0.0);
    for (const auto& opt : {PlannerOptions{}, allow_changes()}) {
        try {
            plan_frame(cloud, p, budget_for(p, 0.2e-3), 0.1, opt);
            FAIL() << "expected InfeasibleError";
        } catch (const InfeasibleError& e) {
            EXPECT_EQ(e.bottleneck(), "slm");
        }
    }
}

TEST(PlanFrame, NoEnergyIsLaserBound) {
    const auto p = system_a_profile();
    try {
        plan_frame(clusters400(), p, budget_for(p, 1.0), 0.1);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.bottleneck(), "laser");
    }
}

TEST(PlanFrame, TooManyPulsesForFrame) {
    const auto p = system_a_profile();
    EXPECT_THROW(plan_frame(clusters400(), p, budget_for(p, 0.2e-3), 0.05), InfeasibleError);
}

TEST(PlanFrame, RejectsOutOfWorkspace) {
    const auto p = system_a_profile();
    VoxelCloud c;
    c.points.push_back({{6e-3, 0, 0}, 1.0});
    EXPECT_THROW(plan_frame(c, p, budget_for(p, 0.2e-3), 0.1), DomainError);
    EXPECT_THROW(plan_frame({}, p, budget_for(p, 0.2e-3), 0.0), DomainError);
}

TEST(PlanFrame, WithoutSlmOneVoxelPerPulse) {
    const auto p = system_b_profile();
    const auto plan = plan_frame(random_cloud(500, 43, 0.0), p, budget_for(p, 1e-6), 0.01);
    EXPECT_EQ(plan.dots_per_pulse, 1);
    EXPECT_EQ(plan.slots.size(), 500u);
    EXPECT_TRUE(validate_plan(plan, p).empty());
}

TEST(PlanFrame, SelfValidatesOnRandomClouds) {
    const auto p = loose_profile();
    std::mt19937_64 gen(44);
    std::uniform_int_distribution<std::size_t> count(1, 1000);
    for (int trial = 0; trial < 40; ++trial) {
        const auto cloud = random_cloud(count(gen), gen());
        const auto plan = plan_frame(cloud, p, budget_for(p, 0.2e-3), 10.0, allow_changes());
        const auto violations = validate_plan(plan, p);
        EXPECT_TRUE(violations.empty()) << violations.front();
        for (const auto& s : plan.slots) EXPECT_LE(static_cast<long long>(s.voxels.size()), plan.dots_per_pulse);
    }
}

TEST(PlanFrame, Deterministic) {
    const auto p = loose_profile();
    const auto cloud = random_cloud(300, 45);
    EXPECT_EQ(plan_frame(cloud, p, budget_for(p, 0.2e-3), 10.0, allow_changes()),
              plan_frame(cloud, p, budget_for(p, 0.2e-3), 10.0, allow_changes()));
}

TEST(GreedyOrder, NeverLongerThanInputOrder) {
    std::mt19937_64 gen(46);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cloud = random_cloud(1 + trial % 60, gen(), 0.0);
        std::vector<std::size_t> members(cloud.points.size());
        std::iota(members.begin(), members.end(), 0);
        auto order = detail::greedy_order(cloud.points, members);
        if (detail::path_length(cloud.points, members) < detail::path_length(cloud.points, order)) order = members;
        EXPECT_LE(detail::path_length(cloud.points, order), detail::path_length(cloud.points, members) + 1e-15);
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        EXPECT_EQ(sorted, members);
    }
}

TEST(PlanFrame, GalvanoTravelNotWorseThanInputOrder) {
    const auto p = system_b_profile();
    const auto cloud = random_cloud(400, 47, 0.0);
    const auto plan = plan_frame(cloud, p, budget_for(p, 1e-6), 0.1);
    double input = 0;
    for (std::size_t i = 1; i < cloud.points.size(); ++i) {
        const auto a = xy_to_galvano(cloud.points[i - 1].position.x, cloud.points[i - 1].position.y, p);
        const auto b = xy_to_galvano(cloud.points[i].position.x, cloud.points[i].position.y, p);
        input += std::hypot(a.x - b.x, a.y - b.y);
    }
    EXPECT_LE(galvano_travel(plan), input * (1 + 1e-12));
}

TEST(ValidatePlan, DetectsPulseSpacing) {
    const auto p = system_a_profile();
    FramePlan plan;
    plan.frame_time = 0.1;
    plan.pulse_period = 1e-3;
    plan.dots_per_pulse = 1;
    plan.voxel_count = 2;
    plan.holograms.push_back({0, {{0.0, 0.0}}});
    plan.slots.push_back({0.0, {}, 0.0825, 0, {0}});
    plan.slots.push_back({0.5e-3, {}, 0.0825, 0, {1}});
    const auto v = validate_plan(plan, p);
    ASSERT_FALSE(v.empty());
    EXPECT_NE(v.front().find("pulse spacing"), std::string::npos);
    const auto sim = simulate(plan, p, 1.0);
    EXPECT_FALSE(sim.violations.empty());
}

TEST(ValidatePlan, DetectsCoverageAndRanges) {
    const auto p = system_a_profile();
    FramePlan plan;
    plan.frame_time = 0.1;
    plan.pulse_period = 1e-3;
    plan.dots_per_pulse = 1;
    plan.voxel_count = 3;
    plan.holograms.push_back({0, {}});
    plan.slots.push_back({0.0, {0.5, 0}, 0.2, 7, {0, 0}});
    const auto v = validate_plan(plan, p);
    auto has = [&](const char* s) {
        return std::any_of(v.begin(), v.end(), [&](const std::string& m) { return m.find(s) != std::string::npos; });
    };
    EXPECT_TRUE(has("more voxels than dots per pulse"));
    EXPECT_TRUE(has("unknown hologram id"));
    EXPECT_TRUE(has("galvano angle out of range"));
    EXPECT_TRUE(has("varifocal focal length out of range"));
    EXPECT_TRUE(has("voxel 0 covered 2 times"));
    EXPECT_TRUE(has("voxel 2 covered 0 times"));
}

TEST(Simulate, SystemAThroughput) {
    const auto p = system_a_profile();
    const auto plan = plan_frame(clusters400(), p, budget_for(p, 0.2e-3), 0.1);
    const auto r = simulate(plan, p, 1.0);
    EXPECT_EQ(r.dots, 4000u);
    EXPECT_EQ(r.dots_per_second, 4000.0);
    EXPECT_EQ(r.frames_completed, 10u);
    EXPECT_EQ(r.frames_per_second, 10.0);
    EXPECT_TRUE(r.violations.empty());
    EXPECT_LE(r.max_window_dots_per_second, 4000.0 * (1 + 1e-9));
    EXPECT_NEAR(r.busy_time.at("laser"), 1.0, 1e-9);
    EXPECT_EQ(r.timeline.size(), 1000u);
    for (double e : r.voxel_exposure) EXPECT_NEAR(e, 10 * 1e-3, 1e-15);
}

TEST(Simulate, SystemBThroughput) {
    const auto p = system_b_profile();
    const auto plan = plan_frame(random_cloud(2000, 48, 0.0), p, budget_for(p, 1e-6), 0.01);
    const auto r = simulate(plan, p, 1.0, {100, false});
    EXPECT_EQ(r.dots_per_second, 200000.0);
    EXPECT_TRUE(r.violations.empty());
    EXPECT_TRUE(r.timeline.empty());
}

TEST(Simulate, WindowNeverExceedsCapOnValidPlans) {
    const auto p = loose_profile();
    std::mt19937_64 gen(49);
    for (int trial = 0; trial < 20; ++trial) {
        const auto plan = plan_frame(random_cloud(200, gen()), p, budget_for(p, 0.2e-3), 1.0, allow_changes());
        const auto r = simulate(plan, p, 3.0, {37, false});
        EXPECT_TRUE(r.violations.empty());
        EXPECT_LE(r.max_window_dots_per_second, plan.dots_per_pulse * 1e3 * (1 + 1e-9));
    }
}

TEST(Simulate, HorizonValidation) {
    const auto p = system_a_profile();
    EXPECT_THROW(simulate({}, p, 0.0), DomainError);
    const auto r = simulate({}, p, 1.0);
    EXPECT_EQ(r.dots, 0u);
}

TEST(Simulate, ForwardsExposureToGuard) {
    const auto p = system_a_profile();
    const auto cloud = clusters400();
    const auto plan = plan_frame(cloud, p, budget_for(p, 0.2e-3), 0.1);
    // 201 s of replay: each voxel fires 2010 times, 1 ms each.
    const auto r = simulate(plan, p, 201.0, {100, false});
    ExposureGuard guard;
    const auto verdicts = forward_exposure(r, cloud, guard);
    ASSERT_EQ(verdicts.size(), cloud.points.size());
    for (const auto& v : verdicts) {
        EXPECT_TRUE(v.limit_exceeded);
        EXPECT_TRUE(v.must_shutoff);
    }
    EXPECT_NEAR(guard.total_exposure(), 400 * 2.01, 1e-6);
}

TEST(DeviceProfile, Presets) {
    const auto a = system_a_profile();
    EXPECT_NO_THROW(a.validate());
    EXPECT_DOUBLE_EQ(a.galvano_settle(), 1e-3);
    const auto b = system_b_profile();
    EXPECT_NO_THROW(b.validate());
    EXPECT_FALSE(b.has_slm);
    EXPECT_DOUBLE_EQ(b.laser.repetition_rate, 200e3);
    EXPECT_THROW(load_profile("system_q"), DomainError);
}
