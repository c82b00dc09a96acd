#include "doctest.h"

TEST_SUITE("verifier") {}
