#pragma once

#include <cstdint>
#include <optional>

#include "qkd/protocol.hpp"

// Intercept/resend attacks: the fast-switch pair measurement for the
// pulse-train schemes and the Breidbart-basis attack for BB84, plus the
// Monte Carlo estimator for (eta_e, p_d).

namespace qkd {

// Eve's notes for one intercepted train.
struct EveRecord {
    // Adjacent pair (b, b+1) she overlapped; empty on a pass-through outcome.
    std::optional<int> measured_boundary;
    std::uint8_t known_difference = 0;  // phase-difference bit at that boundary
    std::optional<PhasePattern> resent_pattern;
};

struct SwitchInterceptResult {
    EveRecord record;
    std::optional<PulseTrain> resent;  // disengaged when the train is suppressed
};

// Eve measures one adjacent phase difference with a fast-switch receiver
// (fixed pairing for even train lengths, a uniformly random maximal adjacent
// pairing for odd ones) and resends a full train carrying the learned value
// at the measured boundary and fresh coins everywhere else. A pass-through
// outcome teaches her nothing; she then suppresses the train, hiding behind
// channel loss instead of resending pure noise.
SwitchInterceptResult switch_intercept_resend(const SchemeConfig& config,
                                              const PulseTrain& train,
                                              RngStream& rng);

struct BreidbartResult {
    std::uint8_t guess_bit = 0;
    int resent_eighth_turns = 1;  // 1 (pi/4) or 5 (5 pi/4)
};

// Measurement in the basis halfway between the two BB84 bases. The outcome
// favours the sent bit with probability cos^2(pi/8); Eve resends the basis
// state she observed.
BreidbartResult breidbart_intercept(int alice_quarter_turns, RngStream& rng);

struct AttackEstimate {
    double eta_e_hat = 0;         // deterministic-knowledge fraction of the sifted key
    double p_d_hat = 0;           // alice/bob disagreement fraction
    double guess_success_hat = 0; // BB84 only; NaN for the train schemes
    std::int64_t sifted_bits = 0;
};

// Full-interception session (attack_fraction 1, no intrinsic noise) with the
// scheme's canonical attack.
AttackEstimate estimate_attack_params(const SchemeConfig& config,
                                      std::int64_t n_trains, std::uint64_t seed,
                                      int workers = 1);

}  // namespace qkd
