#include <catch2/catch_amalgamated.hpp>
#include "symreg/bench.hpp"
TEST_CASE("placeholder test_preprocess") { REQUIRE(true); }
