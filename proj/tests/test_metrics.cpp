#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "lalarpl/metrics.hpp"
#include "lalarpl/rng.hpp"

using namespace lalarpl;

TEST_CASE("traffic index") {
    CHECK(traffic_index({}, 200.0) == 0.0);

    std::vector<ChildContribution> one{{1.0, 100.0}};
    CHECK(traffic_index(one, 200.0) == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<ChildContribution> two{{0.5, 400.0}, {1.0, 100.0}};
    CHECK(traffic_index(two, 250.0) == 1.0); // clamped at full utilization

    CHECK_THROWS(traffic_index(one, 0.0));
    CHECK_THROWS(traffic_index(one, -5.0));
    std::vector<ChildContribution> bad_theta{{1.5, 100.0}};
    CHECK_THROWS(traffic_index(bad_theta, 100.0));
    std::vector<ChildContribution> bad_traffic{{0.5, -1.0}};
    CHECK_THROWS(traffic_index(bad_traffic, 100.0));
}

TEST_CASE("traffic index stays in [0, 1] on random inputs") {
    RandomStream rng(11);
    for (int i = 0; i < 1000; ++i) {
        std::vector<ChildContribution> children;
        const int n = static_cast<int>(rng.uniform(0.0, 8.0));
        for (int k = 0; k < n; ++k)
            children.push_back({rng.uniform01(), rng.uniform(0.0, 1e6)});
        const double ti = traffic_index(children, rng.uniform(1.0, 1e6));
        CHECK(ti >= 0.0);
        CHECK(ti <= 1.0);
    }
}

TEST_CASE("packet delivery ratio") {
    CHECK(pdr(100, 96) == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(pdr(0, 0) == 0.0);
    CHECK(pdr(7, 7) == 1.0);
    CHECK_THROWS(pdr(3, 4));
}

TEST_CASE("basic throughput") {
    std::vector<double> idle{0.0, 0.0};
    CHECK(throughput_basic(idle, 10.0) == 0.0);

    std::vector<double> bits{400.0, 600.0};
    CHECK(throughput_basic(bits, 10.0) == doctest::Approx(100.0).epsilon(1e-12));

    std::vector<double> saturated{250000.0};
    CHECK(throughput_basic(saturated, 1.0) ==
          doctest::Approx(250000.0).epsilon(1e-12));

    CHECK_THROWS(throughput_basic(bits, 0.0));
    std::vector<double> neg{-1.0};
    CHECK_THROWS(throughput_basic(neg, 1.0));
}

TEST_CASE("weighted throughput") {
    std::vector<WeightedSample> some{{1000.0, 1.0}};
    CHECK(throughput_weighted(some, 1.0, 0.0) == 0.0);

    CHECK(throughput_weighted(some, 1.0, 1.718281828459045) ==
          doctest::Approx(1000.0).epsilon(1e-12));

    std::vector<WeightedSample> mixed{{1000.0, 0.5}, {2000.0, 1.0}};
    CHECK(throughput_weighted(mixed, 10.0, 1.0) ==
          doctest::Approx(173.2867951399863).epsilon(1e-12));

    std::vector<WeightedSample> bad{{1000.0, 1.5}};
    CHECK_THROWS(throughput_weighted(bad, 1.0, 1.0));
    CHECK_THROWS(throughput_weighted(some, 0.0, 1.0));
}

TEST_CASE("jain fairness index") {
    std::vector<double> equal{5.0, 5.0, 5.0, 5.0};
    CHECK(jain_fairness(equal) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> onehot{1.0, 0.0, 0.0, 0.0};
    CHECK(jain_fairness(onehot) == doctest::Approx(0.25).epsilon(1e-12));

    std::vector<double> ramp{1.0, 2.0, 3.0};
    CHECK(jain_fairness(ramp) ==
          doctest::Approx(36.0 / 42.0).epsilon(1e-12));

    std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(jain_fairness(zero) == 1.0);

    CHECK_THROWS(jain_fairness({}));
    std::vector<double> neg{1.0, -2.0};
    CHECK_THROWS(jain_fairness(neg));
}

TEST_CASE("jain fairness bounds on random vectors") {
    RandomStream rng(13);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 32);
        std::vector<double> values(n);
        for (auto& v : values)
            v = rng.uniform(0.0, 100.0);
        const double j = jain_fairness(values);
        CHECK(j >= 1.0 / static_cast<double>(n) - 1e-12);
        CHECK(j <= 1.0 + 1e-12);
    }
}

TEST_CASE("per-hop node delay") {
    CHECK(node_delay({}) == 0.0);

    DelayBreakdown d{1e-4, 3.2e-3, 1.6e-3, 3.3e-7};
    CHECK(node_delay(d) == doctest::Approx(4.90033e-3).epsilon(1e-12));

    DelayBreakdown tx_only{0.0, 0.0, 1.6e-3, 0.0};
    CHECK(node_delay(tx_only) == doctest::Approx(1.6e-3).epsilon(1e-12));

    DelayBreakdown neg{-1e-4, 0.0, 0.0, 0.0};
    CHECK_THROWS(node_delay(neg));
}

TEST_CASE("path delay") {
    CHECK(link_delay_index({}) == 0.0);

    std::vector<DelayBreakdown> hops{
        {0.001, 0.0, 0.0, 0.0}, {0.002, 0.0, 0.0, 0.0}, {0.003, 0.0, 0.0, 0.0}};
    CHECK(link_delay_index(hops) == doctest::Approx(0.006).epsilon(1e-12));

    std::vector<DelayBreakdown> single{{0.0, 0.0017, 0.0, 0.0}};
    CHECK(link_delay_index(single) == doctest::Approx(0.0017).epsilon(1e-12));
}

TEST_CASE("average end-to-end delay") {
    CHECK_FALSE(avg_end_to_end_delay({}).has_value());

    std::vector<double> three{0.010, 0.012, 0.011};
    auto v = avg_end_to_end_delay(three);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(0.011).epsilon(1e-12));

    std::vector<double> one{0.0047};
    CHECK(*avg_end_to_end_delay(one) == doctest::Approx(0.0047).epsilon(1e-12));

    std::vector<double> constant(37, 0.011064);
    CHECK(*avg_end_to_end_delay(constant) ==
          doctest::Approx(0.011064).epsilon(1e-12));

    std::vector<double> neg{-0.1};
    CHECK_THROWS(avg_end_to_end_delay(neg));
}

TEST_CASE("ledger energy") {
    EnergyLedger zero{};
    CHECK(energy_total(zero) == 0.0);

    EnergyLedger frozen{0.0522, 0.0591, 0.00128, 1e-6, 10.0, 20.0, 900.0, 70.0};
    CHECK(energy_total(frozen) == doctest::Approx(2.85607).epsilon(1e-12));

    EnergyLedger budget{};
    budget.p_idle = 0.002;
    budget.t_idle = 1000.0;
    CHECK(energy_total(budget) == doctest::Approx(2.0).epsilon(1e-12));

    EnergyLedger neg{};
    neg.t_tx = -1.0;
    CHECK_THROWS(energy_total(neg));
}

TEST_CASE("normalized network lifetime") {
    CHECK(altn({}, 10, 1000.0, 10) == 1.0);

    std::vector<double> all_dead{0.0, 0.0};
    CHECK(altn(all_dead, 0, 1000.0, 2) == 0.0);

    std::vector<double> two_deaths{400.0, 600.0};
    CHECK(altn(two_deaths, 2, 1000.0, 4) ==
          doctest::Approx(0.75).epsilon(1e-12));

    CHECK_THROWS(altn(two_deaths, 1, 1000.0, 4)); // count inconsistency
    CHECK_THROWS(altn(two_deaths, 2, 0.0, 4));
    std::vector<double> late{1500.0};
    CHECK_THROWS(altn(late, 0, 1000.0, 1)); // death beyond the cap
}

TEST_CASE("lifetime stays normalized on random inputs") {
    RandomStream rng(17);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t n = 1 + static_cast<std::uint64_t>(rng.uniform01() * 50);
        const std::uint64_t dead =
            static_cast<std::uint64_t>(rng.uniform01() * static_cast<double>(n + 1)) % (n + 1);
        const double cap = rng.uniform(1.0, 5000.0);
        std::vector<double> deaths(dead);
        for (auto& d : deaths)
            d = rng.uniform01() * cap;
        const double v = altn(deaths, n - dead, cap, n);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("report comparison pinpoints the first mismatch") {
    MetricsReport a;
    a.pdr = 0.9;
    a.throughput_per_node = {1.0, 2.0};
    a.weighted_throughput_per_node = {0.5, 0.7};
    a.jfi_throughput = 0.8;
    a.aeed = 0.011;
    a.energy_per_node = {1.0, 1.1};
    a.jfi_energy = 0.99;
    a.altn = 1.0;
    a.packets_sent = 100;
    a.packets_received = 90;
    a.packets_dropped = 5;

    MetricsReport b = a;
    CHECK_FALSE(compare_reports(a, b).has_value());

    b.pdr = 0.91;
    auto m = compare_reports(a, b);
    REQUIRE(m.has_value());
    CHECK(m->find("pdr") != std::string::npos);

    b = a;
    b.throughput_per_node[1] = 2.5;
    m = compare_reports(a, b);
    REQUIRE(m.has_value());
    CHECK(m->find("throughput_per_node[1]") != std::string::npos);

    b = a;
    b.aeed.reset();
    m = compare_reports(a, b);
    REQUIRE(m.has_value());
    CHECK(m->find("aeed") != std::string::npos);

    b = a;
    b.packets_dropped = 6;
    CHECK(compare_reports(a, b).has_value());

    // Tiny drift within the tolerance is not a mismatch.
    b = a;
    b.jfi_energy = a.jfi_energy * (1.0 + 1e-12);
    CHECK_FALSE(compare_reports(a, b, 1e-9).has_value());
}

TEST_CASE("in-flight accounting") {
    MetricsReport r;
    r.packets_sent = 10;
    r.packets_received = 6;
    r.packets_dropped = 3;
    CHECK(r.packets_in_flight() == 1);
}
