#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mmpoincare/growth.hpp"

namespace mmp {

/// Covering multiplicity bound from iterated doubling: the product of
/// doubling constants at radii 13*eps/2^k, k = 1..5.
inline double multiplicity_bound(int n, double kappa, double epsilon) {
    if (n < 1) throw std::invalid_argument("multiplicity_bound: n must be >= 1");
    if (kappa < 0.0) throw std::invalid_argument("multiplicity_bound: kappa must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("multiplicity_bound: epsilon must be positive");
    double product = 1.0;
    double r = 13.0 * epsilon / 2.0;
    for (int k = 0; k < 5; ++k) {
        product *= bishop_gromov_doubling(n, kappa, r);
        r /= 2.0;
    }
    return product;
}

/// Named local Poincare constant C(n, sigma, R). The literature gives no
/// single closed form, so the ledger takes it as a plug-in; the default is
/// the Buser-flavored convention C(n) exp((n-1) sqrt(kappa) R) R^sigma with
/// C(n) = 2^n. A convention, not a sourced value.
struct LocalPoincarePlugin {
    std::string name;
    std::function<double(int n, double sigma, double R)> value;
};

inline LocalPoincarePlugin buser_local_poincare(double kappa) {
    if (kappa < 0.0) throw std::invalid_argument("buser_local_poincare: kappa must be >= 0");
    return {"buser-default", [kappa](int n, double sigma, double R) {
                return std::pow(2.0, n) * std::exp((n - 1) * std::sqrt(kappa) * R) *
                       std::pow(R, sigma);
            }};
}

/// Inputs of the constant chain. T and T' may come from an empirical
/// smoothing-bound measurement or from a plug-in convention; the source tag
/// records which. T' defaults to the proof anchor 1 + 6*eps.
struct LedgerInputs {
    int n = 2;
    double kappa = 0.0;
    double epsilon = 1.0;
    double sigma = 1.0;
    double beta = 1.0;
    double r0 = 1.0;
    double r1 = 1.0;      ///< onset radius of the discrete inequality (measured R0' in practice)
    double v_prime = 1.0; ///< growth constant from a fit
    double C_prime = 3.0; ///< discrete outer-ball factor
    double T = 1.0;
    double Tprime = 0.0;  ///< <= 0 selects the 1 + 6*eps default
    std::string T_source = "plugin";
    std::string Tprime_source = "anchor(1+6eps)";
    LocalPoincarePlugin local_poincare; ///< empty name selects the Buser default
};

/// All derived constants of the chain, evaluated deterministically from the
/// inputs. Every derived field equals its defining formula; verify_ledger
/// recomputes them for exact equality.
struct ConstantLedger {
    LedgerInputs in;
    double M_eps = 0.0;   ///< multiplicity bound at eps
    double R1 = 0.0;      ///< max(eps, r1)
    double C1 = 0.0;      ///< 2^{sigma-1} C(n, sigma, eps)
    double C2 = 0.0;      ///< C1 * M_eps
    double C3 = 4.0;
    double C_graph = 0.0; ///< 6^{sigma-1} v'
    double C4 = 0.0;      ///< 2^{sigma-1} C_graph T^sigma 4^beta
    double C5 = 0.0;      ///< max(C2, C4)
    double K1 = 0.0;      ///< r0^{-beta} sup_{r0<=R<=R1} C(n, sigma, R)
    double K2 = 0.0;      ///< 2^sigma (C5 / eps^beta + C5)
    double K = 0.0;       ///< max(K1, K2)
    double C_dprime = 0.0;///< 4 C' T' + 5
};

namespace detail {

inline double sup_on_interval(const std::function<double(double)>& f, double lo, double hi) {
    if (hi < lo) hi = lo;
    const int cells = 1024;
    double sup = f(lo);
    for (int k = 1; k <= cells; ++k)
        sup = std::max(sup, f(lo + (hi - lo) * static_cast<double>(k) / cells));
    return sup;
}

} // namespace detail

inline ConstantLedger constant_ledger(LedgerInputs in) {
    if (in.n < 1) throw std::invalid_argument("constant_ledger: n must be >= 1");
    if (in.kappa < 0.0) throw std::invalid_argument("constant_ledger: kappa must be >= 0");
    if (!(in.epsilon > 0.0)) throw std::invalid_argument("constant_ledger: epsilon must be positive");
    if (in.sigma < 1.0) throw std::invalid_argument("constant_ledger: sigma must be >= 1");
    if (!(in.r0 > 0.0)) throw std::invalid_argument("constant_ledger: r0 must be positive");
    if (!(in.v_prime > 0.0)) throw std::invalid_argument("constant_ledger: v_prime must be positive");
    if (in.C_prime < 1.0) throw std::invalid_argument("constant_ledger: C_prime must be >= 1");
    if (!(in.T > 0.0)) throw std::invalid_argument("constant_ledger: T must be positive");
    if (!in.local_poincare.value) {
        in.local_poincare = buser_local_poincare(in.kappa);
    }
    if (!(in.Tprime > 0.0)) {
        in.Tprime = 1.0 + 6.0 * in.epsilon;
        in.Tprime_source = "anchor(1+6eps)";
    }

    ConstantLedger L;
    L.in = in;
    const auto& C_loc = in.local_poincare.value;
    L.M_eps = multiplicity_bound(in.n, in.kappa, in.epsilon);
    L.R1 = std::max(in.epsilon, in.r1);
    L.C1 = std::pow(2.0, in.sigma - 1.0) * C_loc(in.n, in.sigma, in.epsilon);
    L.C2 = L.C1 * L.M_eps;
    L.C3 = 4.0;
    L.C_graph = std::pow(6.0, in.sigma - 1.0) * in.v_prime;
    L.C4 = std::pow(2.0, in.sigma - 1.0) * L.C_graph * std::pow(in.T, in.sigma) *
           std::pow(4.0, in.beta);
    L.C5 = std::max(L.C2, L.C4);
    L.K1 = detail::sup_on_interval([&](double R) { return C_loc(in.n, in.sigma, R); }, in.r0, L.R1) /
           std::pow(in.r0, in.beta);
    L.K2 = std::pow(2.0, in.sigma) * (L.C5 / std::pow(in.epsilon, in.beta) + L.C5);
    L.K = std::max(L.K1, L.K2);
    L.C_dprime = 4.0 * in.C_prime * in.Tprime + 5.0;
    return L;
}

/// Recompute every derived field from the stored inputs and require exact
/// equality (the chain is deterministic arithmetic).
inline bool verify_ledger(const ConstantLedger& L) {
    const ConstantLedger R = constant_ledger(L.in);
    return R.M_eps == L.M_eps && R.R1 == L.R1 && R.C1 == L.C1 && R.C2 == L.C2 && R.C3 == L.C3 &&
           R.C_graph == L.C_graph && R.C4 == L.C4 && R.C5 == L.C5 && R.K1 == L.K1 &&
           R.K2 == L.K2 && R.K == L.K && R.C_dprime == L.C_dprime;
}

} // namespace mmp
