#include "doctest.h"

TEST_SUITE("polytope") {}
