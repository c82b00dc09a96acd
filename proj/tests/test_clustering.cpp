#include "doctest.h"

TEST_SUITE("clustering") {}
