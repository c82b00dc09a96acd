#include "doctest.h"

TEST_SUITE("learner") {}
