#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mmpoincare/ledger.hpp"

using namespace mmp;

TEST_CASE("multiplicity bound") {
    SECTION("flat plane: 4^5") {
        REQUIRE(multiplicity_bound(2, 0.0, 1.0) == 1024.0);
        REQUIRE(multiplicity_bound(2, 0.0, 0.05) == 1024.0);
    }
    SECTION("line: 2^5") { REQUIRE(multiplicity_bound(1, 0.0, 3.0) == 32.0); }
    SECTION("curved case multiplies in the exponential factors") {
        // product over r = 13/2, 13/4, ..., 13/32 of 4 exp(2 r)
        double expected = 1.0;
        for (int k = 1; k <= 5; ++k) expected *= 4.0 * std::exp(2.0 * 13.0 / std::pow(2.0, k));
        REQUIRE(multiplicity_bound(2, 1.0, 1.0) == Catch::Approx(expected).epsilon(1e-14));
        REQUIRE(multiplicity_bound(2, 1.0, 1.0) == Catch::Approx(1024.0 * std::exp(2.0 * 13.0 * 31.0 / 32.0)));
    }
    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(multiplicity_bound(0, 0.0, 1.0), std::invalid_argument);
        REQUIRE_THROWS_AS(multiplicity_bound(2, -0.5, 1.0), std::invalid_argument);
        REQUIRE_THROWS_AS(multiplicity_bound(2, 0.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("constant ledger") {
    LedgerInputs in;
    in.n = 2;
    in.kappa = 0.0;
    in.epsilon = 1.0;
    in.sigma = 1.0;
    in.beta = 2.0;
    in.r0 = 1.0;
    in.r1 = 1.0;
    in.v_prime = 3.0;
    in.C_prime = 3.0;
    in.T = 1.0;

    SECTION("the reference record for (n=2, kappa=0, eps=1, sigma=1, beta=2, v'=3)") {
        auto L = constant_ledger(in);
        REQUIRE(L.in.Tprime == 7.0); // default anchor 1 + 6 eps
        REQUIRE(L.in.Tprime_source == "anchor(1+6eps)");
        REQUIRE(L.M_eps == 1024.0);
        REQUIRE(L.R1 == 1.0);
        REQUIRE(L.C1 == 4.0);       // 2^{sigma-1} * 2^n * R^sigma at R = eps = 1
        REQUIRE(L.C2 == 4096.0);
        REQUIRE(L.C3 == 4.0);
        REQUIRE(L.C_graph == 3.0);  // 6^{sigma-1} v'
        REQUIRE(L.C4 == 48.0);      // 2^{sigma-1} * C_graph * T^sigma * 4^beta
        REQUIRE(L.C5 == 4096.0);
        REQUIRE(L.K1 == 4.0);
        REQUIRE(L.K2 == 16384.0);   // 2^sigma (C5/eps^beta + C5)
        REQUIRE(L.K == 16384.0);
        REQUIRE(L.C_dprime == 89.0); // 4 C' T' + 5
    }
    SECTION("sigma = 1, eps = 1 collapses K2 to 4 C5") {
        auto L = constant_ledger(in);
        REQUIRE(L.K2 == 4.0 * L.C5);
    }
    SECTION("recomputation reproduces every defining equality exactly") {
        auto L = constant_ledger(in);
        REQUIRE(verify_ledger(L));
        auto broken = L;
        broken.C4 *= 1.0 + 1e-12;
        REQUIRE_FALSE(verify_ledger(broken));
    }
    SECTION("supplied T' overrides the anchor") {
        auto custom = in;
        custom.Tprime = 9.0;
        custom.Tprime_source = "empirical";
        auto L = constant_ledger(custom);
        REQUIRE(L.C_dprime == 4.0 * 3.0 * 9.0 + 5.0);
        REQUIRE(L.in.Tprime_source == "empirical");
    }
    SECTION("K1 takes the sup of the local constant over [r0, R1]") {
        auto wide = in;
        wide.r1 = 5.0; // R1 = 5; default C is increasing in R, so sup sits at R1
        auto L = constant_ledger(wide);
        REQUIRE(L.R1 == 5.0);
        REQUIRE(L.K1 == Catch::Approx(4.0 * 5.0 / std::pow(wide.r0, wide.beta)));
    }
    SECTION("curvature enters through the plug-in default") {
        auto curved = in;
        curved.kappa = 0.25;
        auto L = constant_ledger(curved);
        // C(2, 1, 1) = 4 e^{(n-1) sqrt(kappa)} = 4 e^{0.5}
        REQUIRE(L.C1 == Catch::Approx(4.0 * std::exp(0.5)));
        REQUIRE(L.M_eps == Catch::Approx(multiplicity_bound(2, 0.25, 1.0)));
    }
    SECTION("a named custom plug-in is used and recorded") {
        auto custom = in;
        custom.local_poincare = {"unit", [](int, double, double) { return 1.0; }};
        auto L = constant_ledger(custom);
        REQUIRE(L.in.local_poincare.name == "unit");
        REQUIRE(L.C1 == 1.0);
        REQUIRE(L.K1 == 1.0);
    }
    SECTION("parameter validation") {
        auto bad = in;
        bad.sigma = 0.5;
        REQUIRE_THROWS_AS(constant_ledger(bad), std::invalid_argument);
        bad = in;
        bad.v_prime = 0.0;
        REQUIRE_THROWS_AS(constant_ledger(bad), std::invalid_argument);
        bad = in;
        bad.epsilon = -1.0;
        REQUIRE_THROWS_AS(constant_ledger(bad), std::invalid_argument);
    }
}
