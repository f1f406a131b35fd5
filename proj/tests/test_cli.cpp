#include <catch_amalgamated.hpp>

#include <sstream>

#include "swdelay/runner.hpp"

using namespace swdelay;
using nlohmann::json;

namespace {

json good_config() {
    return json{
        {"plant", {{"a", {{1.1}}}, {"b", {{1.0}}}}},
        {"delays", {0, 1}},
        {"gain", {{{-0.6085}}, {{0.0941}}}},
        {"tau", 4},
        {"eta", 10},
    };
}

}  // namespace

TEST_CASE("well-formed config parses with expected defaults") {
    ProblemConfig cfg = parse_config(good_config());
    CHECK(cfg.plant.n() == 1);
    CHECK(cfg.delays.d_max == 1);
    REQUIRE(cfg.gain.has_value());
    CHECK(cfg.gain->blocks.size() == 2);
    CHECK(cfg.tau == 4);
    CHECK(cfg.eta == 10);
    CHECK(cfg.e0.size() == 1);
    CHECK(cfg.e0(0) == 1.0);
    CHECK(cfg.seed == 0);
    CHECK(cfg.out_dir == ".");
}

TEST_CASE("config rejects malformed input") {
    SECTION("missing plant") {
        json j = good_config();
        j.erase("plant");
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    SECTION("ragged matrix rows") {
        json j = good_config();
        j["plant"]["a"] = json::parse("[[1.0, 2.0],[3.0]]");
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    SECTION("empty delay set") {
        json j = good_config();
        j["delays"] = json::array();
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    SECTION("negative delay") {
        json j = good_config();
        j["delays"] = {0, -1};
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    SECTION("e0 with the wrong dimension") {
        json j = good_config();
        j["e0"] = {1.0, 2.0};
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    SECTION("tau beyond eta") {
        json j = good_config();
        j["tau"] = 20;
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    SECTION("gain block count mismatch") {
        json j = good_config();
        j["gain"] = {{{-0.5}}};
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
}

TEST_CASE("series csv round-trips through write and parse") {
    BoundReport rep;
    rep.series.push_back({0, 1.0, 1.25, "exact"});
    rep.series.push_back({1, 0.5, 0.75, "exact"});
    SeriesEntry tail;
    tail.k = 2;
    tail.polytope_sq = 0.125;
    tail.source = "polytope";
    rep.series.push_back(tail);

    std::stringstream ss;
    write_series_csv(ss, rep);
    auto rows = parse_series_csv(ss);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].k == 0);
    CHECK(rows[0].exact_sq.value() == 1.0);
    CHECK(rows[0].polytope_sq.value() == 1.25);
    CHECK(rows[0].source == "exact");
    CHECK_FALSE(rows[2].exact_sq.has_value());
    CHECK(rows[2].polytope_sq.value() == 0.125);
    CHECK(rows[2].source == "polytope");
}

TEST_CASE("csv parsing rejects a wrong header") {
    std::stringstream ss("k,wrong,header,line\n0,1,2,exact\n");
    CHECK_THROWS_AS(parse_series_csv(ss), ConfigError);
}

TEST_CASE("model runner reports the full transition structure") {
    ProblemConfig cfg = parse_config(good_config());
    std::stringstream out;
    CHECK(run_model(cfg, out) == exit_ok);
    const std::string text = out.str();
    CHECK(text.find("4 matrices") != std::string::npos);
    CHECK(text.find("edges = 8") != std::string::npos);
    CHECK(text.find("N[0,1]") != std::string::npos);
    CHECK(text.find("1,0 -> 0,1") != std::string::npos);
}

TEST_CASE("model runner output is deterministic") {
    ProblemConfig cfg = parse_config(good_config());
    std::stringstream a, b;
    run_model(cfg, a);
    run_model(cfg, b);
    CHECK(a.str() == b.str());
}
