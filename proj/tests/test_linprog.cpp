#include "doctest.h"

TEST_SUITE("linprog") {}
