#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qkd/protocol.hpp"

// Closed-form scheme constants and the retained-key-fraction analysis
//   R_k = eta_p * (mu_r - eta_e * p_o / p_d)
// with mu_r = 1 minus the binary Shannon entropy of the error rate.

namespace qkd {

class BracketError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemeMetrics {
    Scheme scheme = Scheme::Blt;
    int n = 0;          // superposition count
    double eta_p = 0;   // protocol efficiency
    double eta_e = 0;   // eavesdropper leakage (BB84: Breidbart information bound)
    double p_d = 0;     // disturbance under full interception
    // eta_e/p_d for m != 2 follow the one-measured-difference argument,
    // eta_e = 1/(N-1) and p_d = (N-2)/(2(N-1)); only the two-element
    // transmitters have directly derived values.
    bool extrapolated = false;

    double ratio() const;  // eta_e / p_d; +inf when p_d == 0
};

SchemeMetrics scheme_metrics(const SchemeConfig& config);

// Fraction of key surviving error reconciliation at error rate p_o:
// 1 + (1-p)log2(1-p) + p log2(p), with 0 log 0 = 0.
double mu_r(double p_o);

// The retained fraction above, clamped below at 0. p_o in [0, 1/2].
double key_fraction(const SchemeMetrics& metrics, double p_o);

// Root of key_fraction(a, p) - key_fraction(b, p) on [lo, hi], found by a
// sign scan followed by bisection to absolute tolerance 1e-6 (at most 200
// iterations). The clamped tails where both curves sit at zero do not count
// as a sign change; throws BracketError when no strict change exists.
double crossover(const SchemeMetrics& a, const SchemeMetrics& b, double lo, double hi);

struct MultiphotonLeakage {
    std::optional<double> fraction;    // no known bound for the dual-delay scheme
    bool outside_weak_regime = false;  // n_bar too large for the linear model
};

// Extra key fraction exposed by multiphoton weak-coherent pulses:
// n_bar/4 for BB84 and the parallel scheme, n_bar/6 for the serial one.
MultiphotonLeakage multiphoton_leakage(Scheme scheme, double n_bar);

// Canonical configurations, in the fixed column order used everywhere:
// BB84, IWY m=2, BLT m=2, BLT+.
inline constexpr std::array<Scheme, 4> kCanonicalSchemes = {
    Scheme::Bb84, Scheme::Iwy, Scheme::Blt, Scheme::BltPlus};

std::array<SchemeMetrics, 4> canonical_metrics();

struct SweepRow {
    double p_o = 0;
    double mu_r = 0;
    std::array<double, 4> r_k{};     // canonical scheme order
    std::array<bool, 4> clamped{};   // true where the raw value went negative
};

// One row per grid point for the four canonical schemes. Grid values must
// lie in [0, 1/2] and increase strictly.
std::vector<SweepRow> sweep(const std::vector<double>& p_o_grid);

// min, min+step, ..., up to max (inclusive within one part in 1e9 of a step).
std::vector<double> linear_grid(double min, double max, double step);

}  // namespace qkd
