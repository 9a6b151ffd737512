#include "avtext/runway.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

using namespace avtext;

TEST_CASE("normalize_runway_token canonicalizes published spellings") {
    CHECK(normalize_runway_token("RY 31").str() == "31");
    CHECK(normalize_runway_token("RWY 36C").str() == "36C");
    CHECK(normalize_runway_token("08L").str() == "8L");
    CHECK(normalize_runway_token("RUNWAY 4").str() == "4");
    CHECK(normalize_runway_token("  rwy 09r ").str() == "9R");
}

TEST_CASE("normalize_runway_token rejects non-runways") {
    CHECK_THROWS_AS(normalize_runway_token(""), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("0"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("37"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("361"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("12X"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("12LL"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("RWY"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("banana"), NotARunwayError);
    CHECK_THROWS_AS(normalize_runway_token("RYE 12"), NotARunwayError);
}

// Exhaustive oracle: every designator in 1..36 x {none,L,C,R}, spelled
// bare / zero-padded / RWY- / RY- / RUNWAY-prefixed, canonicalizes to the
// same designator, and the canonical form is a fixed point.
TEST_CASE("normalize_runway_token succeeds on exactly the 144 designators") {
    int seen = 0;
    for (int number = 1; number <= 36; ++number) {
        for (int side = 0; side < 4; ++side) {
            RunwayDesignator expected{number, side == 0 ? std::nullopt
                                              : std::optional<RunwaySide>(
                                                    static_cast<RunwaySide>(side - 1))};
            std::string bare = expected.str();
            std::string padded =
                number < 10 ? "0" + bare : bare;  // same as bare for 2-digit numbers
            for (const std::string& core : {bare, padded}) {
                for (const char* prefix : {"", "RWY ", "RY ", "RUNWAY ", "RWY", "RY"}) {
                    std::string spelling = std::string(prefix) + core;
                    RunwayDesignator got = normalize_runway_token(spelling);
                    REQUIRE(got == expected);
                }
            }
            // idempotence on the canonical form
            CHECK(normalize_runway_token(bare).str() == bare);
            ++seen;
        }
    }
    CHECK(seen == 144);
}

TEST_CASE("runway ordering is number then bare < L < C < R") {
    RunwaySet set;
    set.insert(normalize_runway_token("36"));
    set.insert(normalize_runway_token("32R"));
    set.insert(normalize_runway_token("32L"));
    set.insert(normalize_runway_token("4C"));
    set.insert(normalize_runway_token("4"));
    CHECK(to_string(set) == "4, 4C, 32L, 32R, 36");
}

TEST_CASE("runway set serialization round-trips") {
    CHECK(to_string(RunwaySet{}) == "None");
    CHECK(parse_runway_list("None").empty());
    CHECK(parse_runway_list("none").empty());
    CHECK(parse_runway_list("").empty());

    // property: serialize . parse is the identity on random sets
    std::mt19937_64 rng(20240117);
    for (int trial = 0; trial < 200; ++trial) {
        RunwaySet set;
        std::size_t count = rng() % 6;
        for (std::size_t i = 0; i < count; ++i) {
            int number = 1 + static_cast<int>(rng() % 36);
            int side = static_cast<int>(rng() % 4);
            set.insert(RunwayDesignator{number, side == 0 ? std::nullopt
                                                 : std::optional<RunwaySide>(
                                                       static_cast<RunwaySide>(side - 1))});
        }
        CHECK(parse_runway_list(to_string(set)) == set);
    }
}

TEST_CASE("parse_runway_list handles published value strings") {
    CHECK(to_string(parse_runway_list("36R, 36C")) == "36C, 36R");
    CHECK(to_string(parse_runway_list("32L, 32R, 36")) == "32L, 32R, 36");
    CHECK(to_string(parse_runway_list("RWY 22L RWY 22R")) == "22L, 22R");
    CHECK_THROWS_AS(parse_runway_list("36R, banana"), UnparseableTokenError);
    try {
        parse_runway_list("36R, banana");
        FAIL("expected UnparseableTokenError");
    } catch (const UnparseableTokenError& e) {
        CHECK(e.token() == "banana");
    }
}
