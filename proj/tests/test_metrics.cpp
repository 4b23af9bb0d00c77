#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "greenbench/metrics.hpp"

using namespace greenbench;

namespace {

const WeightProfile kVerizon{0.35, 0.4, 0.25, 0.5};
const WeightProfile kThirds{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5};

double uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
}

WeightProfile random_weights(std::mt19937_64& eng) {
    double a = uniform(eng, 0.01, 1.0);
    double b = uniform(eng, 0.01, 1.0);
    double e = uniform(eng, 0.01, 1.0);
    double sum = a + b + e;
    return WeightProfile{a / sum, b / sum, 1.0 - a / sum - b / sum,
                         uniform(eng, 0.05, 0.95)};
}

}  // namespace

TEST_CASE("ecr matches the published reference points") {
    CHECK(compute_ecr(AvgPower(1400), Throughput(100)).value == doctest::Approx(14.0).epsilon(1e-12));
    CHECK(compute_ecr(AvgPower(863), Throughput(100)).value == doctest::Approx(8.63).epsilon(1e-12));
    CHECK(compute_ecr(AvgPower(0), Throughput(50)).value == 0.0);
    MetricResult r = compute_ecr(AvgPower(1400), Throughput(100));
    CHECK(std::string(r.units) == "W/Gbps");
}

TEST_CASE("ecr rejects zero throughput") {
    CHECK_THROWS_AS(compute_ecr(AvgPower(100), Throughput(0)), Error);
    try {
        compute_ecr(AvgPower(100), Throughput(0));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::zero_throughput);
    }
}

TEST_CASE("ecr round-trips against its inputs") {
    std::mt19937_64 eng(1);
    for (int i = 0; i < 10000; ++i) {
        double e = uniform(eng, 0.001, 5000.0);
        double t = uniform(eng, 0.001, 400.0);
        double back = compute_ecr(AvgPower(e), Throughput(t)).value * t;
        CHECK(std::fabs(back - e) <= 1e-12 * std::fabs(e));
    }
}

TEST_CASE("teeer reproduces the three-point reference value") {
    MetricResult r = compute_teeer(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(100),
                                   kVerizon);
    CHECK(r.value == doctest::Approx(-0.90899407814025120).epsilon(1e-12));
    CHECK(r.inputs.at("weighted_power_w") == doctest::Approx(810.95).epsilon(1e-12));
    CHECK(std::string(r.units) == "dimensionless");
}

TEST_CASE("teeer hits the closed-form anchors") {
    // P == T makes the log vanish; P/T == 0.1 gives exactly 1.
    CHECK(compute_teeer(AvgPower(100), AvgPower(100), AvgPower(100), Throughput(100), kVerizon)
              .value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(compute_teeer(AvgPower(10), AvgPower(10), AvgPower(10), Throughput(100), kVerizon)
              .value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("teeer error paths") {
    CHECK_THROWS_AS(
        compute_teeer(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(0), kVerizon),
        Error);
    CHECK_THROWS_AS(
        compute_teeer(AvgPower(0), AvgPower(0), AvgPower(0), Throughput(100), kVerizon), Error);
    try {
        compute_teeer(AvgPower(0), AvgPower(0), AvgPower(0), Throughput(100), kVerizon);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::nonpositive_power);
    }
}

TEST_CASE("teer_atis reproduces the reference value and its inflation") {
    MetricResult atis = compute_teer_atis(AvgPower(768), AvgPower(816), AvgPower(863),
                                          Throughput(100), kVerizon);
    CHECK(atis.value == doctest::Approx(0.12331216474505210).epsilon(1e-12));
    double inv_ecr = 1.0 / compute_ecr(AvgPower(863), Throughput(100)).value;
    CHECK(inv_ecr == doctest::Approx(0.11587485515643105).epsilon(1e-12));
    CHECK(atis.value > inv_ecr);
}

TEST_CASE("teer_atis degenerate profiles collapse to the peak ratio") {
    WeightProfile full_only{0.0, 0.0, 1.0, 0.5};
    CHECK(compute_teer_atis(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(100),
                            full_only)
              .value == doctest::Approx(100.0 / 863.0).epsilon(1e-12));
    // Constant-power device: weights cannot matter.
    CHECK(compute_teer_atis(AvgPower(500), AvgPower(500), AvgPower(500), Throughput(80), kVerizon)
              .value == doctest::Approx(80.0 / 500.0).epsilon(1e-12));
}

TEST_CASE("teer_atis inflates whenever idle undercuts full load") {
    std::mt19937_64 eng(2);
    for (int i = 0; i < 10000; ++i) {
        WeightProfile w = random_weights(eng);
        double e_full = uniform(eng, 100.0, 2000.0);
        double e_idle = uniform(eng, 1.0, e_full * 0.999);
        double e_half = uniform(eng, e_idle, e_full);
        double t = uniform(eng, 1.0, 400.0);
        double atis = compute_teer_atis(AvgPower(e_idle), AvgPower(e_half), AvgPower(e_full),
                                        Throughput(t), w)
                          .value;
        CHECK(atis > t / e_full);
    }
}

TEST_CASE("eer_vl reproduces the worked example") {
    WeightProfile w{0.25, 0.5, 0.25, 0.3};
    MetricResult r = compute_eer_vl(Throughput(100), Throughput(30), AvgPower(863), AvgPower(801),
                                    AvgPower(768), w);
    CHECK(r.value == doctest::Approx(0.04948963810702134).epsilon(1e-12));
    CHECK(std::string(r.units) == "Gbps/W");
}

TEST_CASE("eer_vl equals peak efficiency for a perfectly proportional device") {
    // E = 8 W per Gbps and no idle draw force the ratio onto 1/ECR.
    MetricResult r = compute_eer_vl(Throughput(100), Throughput(50), AvgPower(800), AvgPower(400),
                                    AvgPower(0), kThirds);
    CHECK(r.value == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("eer_vl degenerate profile reduces to the peak ratio") {
    WeightProfile full_only{1.0, 0.0, 0.0, 0.5};
    CHECK(compute_eer_vl(Throughput(100), Throughput(30), AvgPower(863), AvgPower(801),
                         AvgPower(768), full_only)
              .value == doctest::Approx(100.0 / 863.0).epsilon(1e-12));
}

TEST_CASE("eer_vl rejects reduced above full") {
    WeightProfile w{0.25, 0.5, 0.25, 0.3};
    try {
        compute_eer_vl(Throughput(50), Throughput(60), AvgPower(800), AvgPower(700), AvgPower(10),
                       w);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::reduced_exceeds_full);
    }
}

TEST_CASE("eer_vl is bounded by peak efficiency on sane devices") {
    // Whenever E_r*T_f >= E_100*T_r and E_i >= 0 the weighted ratio cannot
    // beat 1/ECR.
    std::mt19937_64 eng(3);
    for (int i = 0; i < 10000; ++i) {
        WeightProfile w = random_weights(eng);
        double t_f = uniform(eng, 1.0, 400.0);
        double t_r = uniform(eng, 0.0, t_f);
        double e_full = uniform(eng, 50.0, 2000.0);
        double e_r_min = e_full * t_r / t_f;
        double e_r = uniform(eng, e_r_min, e_full * 1.5);
        if (e_r < e_r_min) e_r = e_r_min;
        double e_i = uniform(eng, 0.0, e_full);
        double eer = compute_eer_vl(Throughput(t_f), Throughput(t_r), AvgPower(e_full),
                                    AvgPower(e_r), AvgPower(e_i), w)
                         .value;
        CHECK(eer <= t_f / e_full + 1e-12 * t_f / e_full);
    }
}

TEST_CASE("a shared duty cycle ranks at or below the three-point reading") {
    // Feed both metrics the same cycle energies; the three-point numerator
    // credits full throughput for the whole cycle, so it can only come out
    // higher. Equality needs a vanishing idle weight and t_r == t_f.
    std::mt19937_64 eng(4);
    for (int i = 0; i < 10000; ++i) {
        WeightProfile w = random_weights(eng);
        double t_f = uniform(eng, 1.0, 400.0);
        double t_r = uniform(eng, 0.0, t_f);
        double e_full = uniform(eng, 50.0, 2000.0);
        double e_r = uniform(eng, 1.0, e_full);
        double e_i = uniform(eng, 1.0, e_r);
        double atis = compute_teer_atis(AvgPower(e_full), AvgPower(e_r), AvgPower(e_i),
                                        Throughput(t_f), w)
                          .value;
        double eer = compute_eer_vl(Throughput(t_f), Throughput(t_r), AvgPower(e_full),
                                    AvgPower(e_r), AvgPower(e_i), w)
                         .value;
        CHECK(atis >= eer - 1e-12 * atis);
    }
    // Equality corner: epsilon = 0 and the reduced phase runs at full rate.
    WeightProfile w{0.6, 0.4, 0.0, 0.5};
    double atis = compute_teer_atis(AvgPower(900), AvgPower(500), AvgPower(100), Throughput(120),
                                    w)
                      .value;
    double eer = compute_eer_vl(Throughput(120), Throughput(120), AvgPower(900), AvgPower(500),
                                AvgPower(100), w)
                     .value;
    CHECK(atis == doctest::Approx(eer).epsilon(1e-12));
}

TEST_CASE("teeer ordering follows weighted power and is monotone") {
    std::mt19937_64 eng(5);
    for (int i = 0; i < 2000; ++i) {
        WeightProfile w = random_weights(eng);
        double t = uniform(eng, 1.0, 400.0);
        double a_idle = uniform(eng, 1.0, 1000.0), a_half = uniform(eng, 1.0, 1000.0),
               a_full = uniform(eng, 1.0, 1000.0);
        double b_idle = uniform(eng, 1.0, 1000.0), b_half = uniform(eng, 1.0, 1000.0),
               b_full = uniform(eng, 1.0, 1000.0);
        double pa = w.alpha * a_idle + w.beta * a_half + w.epsilon * a_full;
        double pb = w.alpha * b_idle + w.beta * b_half + w.epsilon * b_full;
        double va = compute_teeer(AvgPower(a_idle), AvgPower(a_half), AvgPower(a_full),
                                  Throughput(t), w)
                        .value;
        double vb = compute_teeer(AvgPower(b_idle), AvgPower(b_half), AvgPower(b_full),
                                  Throughput(t), w)
                        .value;
        if (pa < pb) CHECK(va > vb);
        if (pa > pb) CHECK(va < vb);
    }
    // Strictly decreasing in each power input, strictly increasing in T.
    double base = compute_teeer(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(100),
                                kVerizon)
                      .value;
    CHECK(compute_teeer(AvgPower(769), AvgPower(816), AvgPower(863), Throughput(100), kVerizon)
              .value < base);
    CHECK(compute_teeer(AvgPower(768), AvgPower(817), AvgPower(863), Throughput(100), kVerizon)
              .value < base);
    CHECK(compute_teeer(AvgPower(768), AvgPower(816), AvgPower(864), Throughput(100), kVerizon)
              .value < base);
    CHECK(compute_teeer(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(101), kVerizon)
              .value > base);
}

TEST_CASE("eer_ex reproduces the worked example") {
    MetricResult r = compute_eer_ex(Throughput(100), Throughput(50), Throughput(10), AvgPower(863),
                                    AvgPower(700), AvgPower(500), kThirds);
    CHECK(r.value == doctest::Approx(160.0 / 2063.0).epsilon(1e-12));
}

TEST_CASE("eer_ex anchors: identical states and degenerate weights") {
    CHECK(compute_eer_ex(Throughput(100), Throughput(100), Throughput(100), AvgPower(863),
                         AvgPower(863), AvgPower(863), kThirds)
              .value == doctest::Approx(100.0 / 863.0).epsilon(1e-12));
    WeightProfile full_only{1.0, 0.0, 0.0, 0.5};
    CHECK(compute_eer_ex(Throughput(100), Throughput(50), Throughput(10), AvgPower(863),
                         AvgPower(700), AvgPower(500), full_only)
              .value == doctest::Approx(100.0 / 863.0).epsilon(1e-12));
}

TEST_CASE("eer_ex enforces state ordering") {
    try {
        compute_eer_ex(Throughput(100), Throughput(10), Throughput(50), AvgPower(863),
                       AvgPower(700), AvgPower(500), kThirds);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::state_order_violation);
    }
}

TEST_CASE("eer_ex collapses to eer_vl when the deepest state idles") {
    std::mt19937_64 eng(6);
    for (int i = 0; i < 5000; ++i) {
        WeightProfile w = random_weights(eng);
        double t_f = uniform(eng, 1.0, 400.0);
        double t_r = uniform(eng, 0.0, t_f);
        double e_full = uniform(eng, 50.0, 2000.0);
        double e_r = uniform(eng, 1.0, e_full);
        double e_i = uniform(eng, 0.0, e_r);
        double ex = compute_eer_ex(Throughput(t_f), Throughput(t_r), Throughput(0),
                                   AvgPower(e_full), AvgPower(e_r), AvgPower(e_i), w)
                        .value;
        double vl = compute_eer_vl(Throughput(t_f), Throughput(t_r), AvgPower(e_full),
                                   AvgPower(e_r), AvgPower(e_i), w)
                        .value;
        CHECK(ex == vl);
    }
}

TEST_CASE("allowance budget sums per-interface ceilings") {
    AllowanceTable table;
    table.entries = {{"WAN", 10.0}, {"LAN", 2.0}};
    std::map<std::string, std::uint32_t> counts{{"WAN", 1}, {"LAN", 4}};

    AllowanceVerdict ok = allowance_budget(counts, table, AvgPower(15));
    CHECK(ok.ceiling.watts == doctest::Approx(18.0).epsilon(1e-12));
    CHECK(ok.pass);

    AllowanceVerdict over = allowance_budget(counts, table, AvgPower(18.1));
    CHECK_FALSE(over.pass);

    AllowanceVerdict empty = allowance_budget({}, table, AvgPower(0));
    CHECK(empty.ceiling.watts == 0.0);
    CHECK(empty.pass);
}

TEST_CASE("allowance budget rejects unknown interface classes") {
    AllowanceTable table;
    table.entries = {{"WAN", 10.0}};
    std::map<std::string, std::uint32_t> counts{{"DSL", 2}};
    try {
        allowance_budget(counts, table, AvgPower(1));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_interface_class);
    }
}

TEST_CASE("weighted peak throughput is a convex combination") {
    PacketSizeWeights w;
    w.entries = {{64, 0.5}, {1518, 0.5}};
    std::map<std::uint32_t, Throughput> ndr{{64, Throughput(40)}, {1518, Throughput(100)}};
    CHECK(weighted_peak_throughput(ndr, w).value == doctest::Approx(70.0).epsilon(1e-12));

    PacketSizeWeights single;
    single.entries = {{1518, 1.0}};
    CHECK(weighted_peak_throughput(ndr, single).value == doctest::Approx(100.0).epsilon(1e-12));

    // A constant NDR is a fixed point for any weighting.
    std::map<std::uint32_t, Throughput> flat{{64, Throughput(80)}, {1518, Throughput(80)}};
    PacketSizeWeights uneven;
    uneven.entries = {{64, 0.2}, {1518, 0.8}};
    CHECK(weighted_peak_throughput(flat, uneven).value == doctest::Approx(80.0).epsilon(1e-12));
}

TEST_CASE("weighted peak throughput needs every weighted size measured") {
    PacketSizeWeights w;
    w.entries = {{64, 0.5}, {1518, 0.5}};
    std::map<std::uint32_t, Throughput> ndr{{64, Throughput(40)}};
    try {
        weighted_peak_throughput(ndr, w);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_packet_size);
    }
}

TEST_CASE("metric operations are pure") {
    WeightProfile w{0.25, 0.5, 0.25, 0.3};
    for (int i = 0; i < 3; ++i) {
        CHECK(compute_eer_vl(Throughput(100), Throughput(30), AvgPower(863), AvgPower(801),
                             AvgPower(768), w)
                  .value ==
              compute_eer_vl(Throughput(100), Throughput(30), AvgPower(863), AvgPower(801),
                             AvgPower(768), w)
                  .value);
        CHECK(compute_teeer(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(100),
                            kVerizon)
                  .value ==
              compute_teeer(AvgPower(768), AvgPower(816), AvgPower(863), Throughput(100),
                            kVerizon)
                  .value);
    }
}

TEST_CASE("weight profiles validate their domain") {
    CHECK_THROWS_AS(WeightProfile(0.5, 0.5, 0.1, 0.3), Error);   // sums to 1.1
    CHECK_THROWS_AS(WeightProfile(-0.1, 0.6, 0.5, 0.3), Error);  // negative
    CHECK_THROWS_AS(WeightProfile(0.25, 0.5, 0.25, 0.0), Error);  // reduced fraction
    CHECK_THROWS_AS(WeightProfile(0.25, 0.5, 0.25, 1.0), Error);
    CHECK_NOTHROW(WeightProfile(0.25, 0.5, 0.25, 0.3));
    // The tolerance admits an honest floating-point third.
    CHECK_NOTHROW(WeightProfile(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5));
}

TEST_CASE("metric kinds round-trip through their names") {
    for (MetricKind k : {MetricKind::ecr, MetricKind::teeer, MetricKind::teer_atis,
                         MetricKind::eer_vl, MetricKind::eer_ex, MetricKind::allowance,
                         MetricKind::weighted_peak}) {
        CHECK(metric_kind_from_name(metric_kind_name(k)) == k);
    }
    CHECK(metric_kind_from_name("eer_vl") == MetricKind::eer_vl);
    CHECK(metric_kind_from_name("EER-VL") == MetricKind::eer_vl);
    CHECK(metric_kind_from_name("teer") == MetricKind::teer_atis);
    CHECK_THROWS_AS(metric_kind_from_name("joules"), Error);
}
