#include "doctest.h"

TEST_SUITE("abstraction") {}
