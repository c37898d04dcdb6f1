#include <doctest.h>

#include <stdexcept>

#include "ohlrelay/config.hpp"
#include "ohlrelay/csv.hpp"

using namespace ohl;

TEST_CASE("config serialization round-trips every field") {
    ExperimentConfig cfg;
    cfg.tx_power_w = 3.7;
    cfg.sigma_theta_inter_rad = 1.23e-4;
    cfg.planes = 7;
    cfg.seed = 987654321;
    cfg.ground_lat_dst_deg = 12.345678901234;
    const ExperimentConfig back = parse_config(serialize_config(cfg));
    CHECK(serialize_config(back) == serialize_config(cfg));
    CHECK(back.tx_power_w == cfg.tx_power_w);
    CHECK(back.planes == cfg.planes);
    CHECK(back.seed == cfg.seed);
    CHECK(back.ground_lat_dst_deg == cfg.ground_lat_dst_deg);
}

TEST_CASE("config parser accepts comments and whitespace") {
    const ExperimentConfig cfg = parse_config(
        "# comment line\n"
        "  tx_power_w =  2.5   # trailing comment\n"
        "\n"
        "seed=17\n");
    CHECK(cfg.tx_power_w == 2.5);
    CHECK(cfg.seed == 17);
}

TEST_CASE("config parser rejects malformed input") {
    CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("tx_power_w 4\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("tx_power_w = abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("tx_power_w = 4x\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("planes = 2.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("seed = -3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("tx_power_w = -1\n"), std::invalid_argument);
}

TEST_CASE("config hash is stable and field-sensitive") {
    ExperimentConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.p_bg_w = 7e-9;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("csv cells render integers plainly and doubles shortest") {
    CHECK(format_cell(10.0) == "10");
    CHECK(format_cell(400.0) == "400");
    CHECK(format_cell(0.0) == "0");
    CHECK(format_cell(-25.0) == "-25");
    CHECK(format_cell(0.1) == "0.1");
    // Shortest representation must round-trip exactly.
    for (double v : {1.0 / 3.0, 2.759e-11, 6.283185307179586, 1e-300}) {
        const std::string s = format_cell(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("csv table structure and determinism") {
    CsvTable t;
    t.header = {"a", "b"};
    t.command = "demo x=1";
    t.config_hash = "deadbeefdeadbeef";
    t.seed = "1";
    t.add_row({1.0, 2.5});
    t.add_row({3.0, 1e-9});
    const std::string s1 = t.to_string();
    const std::string s2 = t.to_string();
    CHECK(s1 == s2);
    CHECK(s1.find("# command: demo x=1\n") == 0);
    CHECK(s1.find("# config_hash: deadbeefdeadbeef") != std::string::npos);
    CHECK(s1.find("a,b\n") != std::string::npos);
    CHECK(s1.find("1,2.5\n") != std::string::npos);
    CHECK(s1.find("3,1e-09\n") != std::string::npos);
    CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
}
