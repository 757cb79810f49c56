#pragma once

#include <cstddef>

namespace poscon {

// Numerical thresholds shared by every module. The CLI exposes each one as a
// flag and embeds the effective values in its reports.
struct Tolerances {
    double zero = 1e-12;          // structural zero in the adjacency digraph
    double eig = 1e-8;            // eigenvalue modulus / equality, scaled by max(1, rho)
    double angle = 1e-9;          // on arg(lambda) / 2pi
    int q_max = 64;               // continued-fraction denominator cap
    double cluster = 1e-6;        // eigenvalues closer than this are one root
    double lp = 1e-9;             // simplex pivot and feasibility threshold
    double lim = 1e-10;           // limit-matrix convergence
    double sim = 1e-8;            // replay tolerance, scaled by (1 + |p|_inf)
    double rank = 1e-10;          // column-pivoted QR threshold
    double coeff = 1e-9;          // characteristic-polynomial sign test, scaled by max(1, rho)^(n-i)
    double recur = 1e-8;          // relative residual of a recursion certificate
    double dedup = 1e-9;          // generator directions equal after normalisation
    double cond_max = 1e12;       // enumeration skips submatrices worse than this
    std::size_t enum_cap = 50000; // C(N, n) limit for the simplicial enumeration
};

// Default degree budget for searches over powers of A.
inline std::size_t default_k_max(std::size_t n) { return n * 5 > 20 ? n * 5 : 20; }

}  // namespace poscon
