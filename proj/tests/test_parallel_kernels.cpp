#include "doctest.h"

TEST_SUITE("parallel_kernels") {}
