// The gradcheck command run against a deliberately broken backward pass.
// Registered with WILL_FAIL: a zero exit status here is a test failure.

#include <iostream>

#include "faulty_backward.hpp"
#include "oad/cli.hpp"

int main() { return oad::cli::cmd_gradcheck(std::cout, oad::testing::faulty_gradient); }
