#include "doctest.h"

TEST_SUITE("system") {}
