#include "doctest.h"

TEST_SUITE("cegis") {}
