#include <doctest.h>

#include <string>

#include "lalarpl/scenario.hpp"

using namespace lalarpl;

TEST_CASE("empty input yields the reference defaults") {
    auto cfg = parse_scenario_text("", "test");
    CHECK(cfg.n_nodes == 50);
    CHECK(cfg.area_width == 1000.0);
    CHECK(cfg.area_height == 1000.0);
    CHECK(cfg.sim_time == 1000.0);
    CHECK(cfg.lambda == 0.1);
    CHECK(cfg.data_rate == 250000.0);
    CHECK(cfg.radio_range == 100.0);
    CHECK(cfg.packet_size == 50);
    CHECK(cfg.dio_size == 80);
    CHECK(cfg.dao_size == 100);
    CHECK(cfg.dis_size == 77);
    CHECK(cfg.initial_energy == 2.0);
    CHECK(cfg.power.tx == 0.0522);
    CHECK(cfg.power.rx == 0.0591);
    CHECK(cfg.power.idle == 0.00128);
    CHECK(cfg.power.sleep == 1e-6);
    CHECK(cfg.queue_capacity == 10);
    CHECK(cfg.loss_scale == 0.2);
    CHECK(cfg.metric_dt == 10.0);
    CHECK(cfg.dio_period == 30.0);
    CHECK(cfg.placement == PlacementMode::Connected);
    CHECK(cfg.seed == 1);
    CHECK(cfg.protocol.variant == ProtocolVariant::Lalarpl);
    CHECK(cfg.protocol.zeta == 0.5);
    CHECK(cfg.protocol.batch_p == 5);
    // Zero-valued knobs resolve against their anchors at validation.
    CHECK(cfg.lifetime_cap == cfg.sim_time);
    CHECK(cfg.capacity_bits == cfg.data_rate);
}

TEST_CASE("overrides apply and the rest stays default") {
    auto cfg = parse_scenario_text("n_nodes: 150\nlambda: 0.2\n", "test");
    CHECK(cfg.n_nodes == 150);
    CHECK(cfg.lambda == 0.2);
    CHECK(cfg.sim_time == 1000.0);
    CHECK(cfg.radio_range == 100.0);
}

TEST_CASE("comments and blank lines are ignored") {
    const char* text =
        "# reference workload\n"
        "\n"
        "n_nodes: 20   # small\n"
        "   lambda:   0.3  \n";
    auto cfg = parse_scenario_text(text, "test");
    CHECK(cfg.n_nodes == 20);
    CHECK(cfg.lambda == 0.3);
}

TEST_CASE("protocol and automaton keys are reachable") {
    const char* text =
        "variant: minhop\n"
        "zeta: 0.7\n"
        "batch_p: 3\n"
        "min_parents: 2\n"
        "max_parents: 4\n"
        "alpha1: 0.02\n"
        "clamp_max: 0.8\n"
        "p_tx: 0.06\n"
        "placement: uniform\n"
        "seed: 77\n";
    auto cfg = parse_scenario_text(text, "test");
    CHECK(cfg.protocol.variant == ProtocolVariant::Minhop);
    CHECK(cfg.protocol.zeta == 0.7);
    CHECK(cfg.protocol.batch_p == 3);
    CHECK(cfg.protocol.max_parents == 4);
    CHECK(cfg.protocol.automaton.alpha1 == 0.02);
    CHECK(cfg.protocol.automaton.clamp_max == 0.8);
    CHECK(cfg.power.tx == 0.06);
    CHECK(cfg.placement == PlacementMode::Uniform);
    CHECK(cfg.seed == 77);
}

TEST_CASE("diagnostics name the key and line") {
    SUBCASE("negative rate") {
        try {
            parse_scenario_text("lambda: -1\n", "test");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("lambda") != std::string::npos);
        }
    }

    SUBCASE("unknown key") {
        try {
            parse_scenario_text("n_nodes: 10\nbogus_key: 3\n", "test");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("bogus_key") != std::string::npos);
            CHECK(msg.find("test:2") != std::string::npos);
        }
    }

    SUBCASE("duplicate key") {
        try {
            parse_scenario_text("lambda: 0.1\nlambda: 0.2\n", "test");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("duplicate") != std::string::npos);
            CHECK(msg.find("lambda") != std::string::npos);
        }
    }

    SUBCASE("malformed number") {
        try {
            parse_scenario_text("sim_time: fast\n", "test");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("sim_time") != std::string::npos);
        }
    }

    SUBCASE("missing separator") {
        CHECK_THROWS_AS(parse_scenario_text("just words\n", "test"),
                        ConfigError);
    }

    SUBCASE("empty value") {
        CHECK_THROWS_AS(parse_scenario_text("lambda:\n", "test"), ConfigError);
    }

    SUBCASE("bad enum values") {
        CHECK_THROWS_AS(parse_scenario_text("variant: dijkstra\n", "test"),
                        ConfigError);
        CHECK_THROWS_AS(parse_scenario_text("placement: grid\n", "test"),
                        ConfigError);
    }
}

TEST_CASE("validation covers every range") {
    CHECK_THROWS_AS(parse_scenario_text("n_nodes: 1\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("sim_time: 0\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("radio_range: -5\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("loss_scale: 1.5\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("queue_capacity: 0\n", "t"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("metric_dt: 0\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("initial_energy: 0\n", "t"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("zeta: 2\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("batch_p: 0\n", "t"), ConfigError);
    CHECK_THROWS_AS(
        parse_scenario_text("min_parents: 6\nmax_parents: 5\n", "t"),
        ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("clamp_min: 0\n", "t"), ConfigError);
    // A lifetime cap shorter than the run would leave late deaths uncountable.
    CHECK_THROWS_AS(parse_scenario_text("lifetime_cap: 10\n", "t"),
                    ConfigError);
    CHECK_NOTHROW(parse_scenario_text("lifetime_cap: 2000\n", "t"));
}

TEST_CASE("variant names round-trip") {
    for (auto v : {ProtocolVariant::Lalarpl, ProtocolVariant::Minhop,
                   ProtocolVariant::Random})
        CHECK(variant_from_name(variant_name(v)) == v);
    CHECK_THROWS_AS(variant_from_name("ospf"), ConfigError);
}

TEST_CASE("missing files are a configuration error") {
    CHECK_THROWS_AS(parse_scenario("/nonexistent/path/x.cfg"), ConfigError);
}
