#include "doctest.h"

TEST_SUITE("expr") {}
