// Acceptance gate: runs every criterion at its stated tolerance and budget,
// one pass/fail line each. Exit status 0 iff all pass.

#include <iostream>

#include "mmpoincare/verify.hpp"

int main() {
    return mmp::verify::run_suite("all", std::cout) ? 0 : 1;
}
