#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "fixtures.hpp"

TEST_CASE("placeholder") { CHECK(true); }
