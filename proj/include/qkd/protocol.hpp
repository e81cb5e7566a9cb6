#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkd/optics.hpp"
#include "qkd/rng.hpp"

// Scheme definitions, Alice's encoding, Bob's measurement, sifting, and the
// Monte Carlo session runner.

namespace qkd {

enum class Scheme : std::uint8_t { Bb84 = 0, Iwy = 1, Blt = 2, BltPlus = 3 };

const char* scheme_name(Scheme scheme);  // "bb84", "iwy", "blt", "blt_plus"
std::optional<Scheme> parse_scheme(std::string_view name);

// A scheme/parameter combination that has no defined behaviour, e.g. the
// dual-delay receiver with anything but a two-element transmitter.
class UnsupportedConfigError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class EmptyKeyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemeConfig {
    Scheme scheme = Scheme::Blt;
    int m = 2;  // transmitter delay elements

    // Superposition count N: 2 for BB84, m+1 parallel, 2^m serial, 4 dual-delay.
    int superposition_count() const;

    // Validates m. BB84 carries no transmitter delay elements; its m is
    // pinned to 1 regardless of the argument.
    static SchemeConfig make(Scheme scheme, int m = 2);
};

struct ChannelModel {
    double flip_probability = 0.0;  // detector-label flip per accepted detection, [0, 1/2]
    double attack_fraction = 0.0;   // fraction of trains Eve intercepts, [0, 1]
};

void validate(const ChannelModel& channel);

// Alice's choice for one train: the phase pattern sent and the key bits it
// encodes (one per adjacent boundary; a single bit for BB84).
struct Encoding {
    PhasePattern pattern;
    std::vector<std::uint8_t> intended_bits;
};

// Key bits determined by a pattern: bit j = (adjacent phase difference
// between pulses j and j+1) / pi.
std::vector<std::uint8_t> boundary_bits(const PhasePattern& pattern);

// BB84 state conventions on the quarter-turn phase q in {0,1,2,3}:
// basis = q mod 2 (0: {0,pi}, 1: {pi/2,3pi/2}), bit = q div 2.
inline int bb84_basis(int quarter_turns) { return quarter_turns & 1; }
inline int bb84_bit(int quarter_turns) { return quarter_turns >> 1; }

Encoding encode_train(const SchemeConfig& config, RngStream& rng);

struct Bb84Outcome {
    int bob_basis = 0;      // 0: phi_B = 0, 1: phi_B = pi/2
    bool central = false;   // interfering slot; edge outcomes are discarded
    Detector detector = Detector::D0;
};

// Receiver for the pulse-train schemes. The dual-delay receiver first routes
// the train 50/50 to a delay-1 or delay-2 interferometer and records the
// branch. The detector label is flipped with the channel's flip probability.
DetectionEvent bob_measure(const SchemeConfig& config, const PulseTrain& train,
                           const ChannelModel& channel, RngStream& rng);

// BB84 receiver at the equatorial-qubit level. The incoming state phase is
// given in eighth turns (multiples of pi/4) so an intercept-resend state
// halfway between the bases is representable. Bob draws a basis, lands in the
// interfering central slot with probability 1/2, and there reads D0/D1 with
// probabilities cos^2(delta/2), sin^2(delta/2) for delta = phi - phi_B.
Bb84Outcome bob_measure_bb84(int state_eighth_turns, const ChannelModel& channel,
                             RngStream& rng);

struct SiftResult {
    std::uint8_t alice_bit = 0;
    std::uint8_t bob_bit = 0;
};

// Keep interior slots only: slots d..N-1 for a delay-d branch. A delay-1 slot
// is keyed by the adjacent boundary slot-1; a delay-2 slot by the distance-2
// phase difference, i.e. the XOR of the two intervening adjacent bits.
// Returns nothing for edge slots.
std::optional<SiftResult> sift_event(const SchemeConfig& config,
                                     const DetectionEvent& event,
                                     const Encoding& encoding);

// BB84: keep central detections with matching bases.
std::optional<SiftResult> sift_bb84_outcome(const Bb84Outcome& outcome,
                                            const Encoding& encoding);

struct SiftedKey {
    struct Origin {
        std::int64_t train = 0;
        std::int32_t slot = 0;
    };

    std::vector<std::uint8_t> bits;
    std::vector<Origin> positions;

    std::size_t size() const { return bits.size(); }
};

std::pair<SiftedKey, SiftedKey> sift(const SchemeConfig& config,
                                     std::span<const DetectionEvent> events,
                                     std::span<const Encoding> encodings);
std::pair<SiftedKey, SiftedKey> sift_bb84(std::span<const Bb84Outcome> outcomes,
                                          std::span<const Encoding> encodings);

enum class AttackKind : std::uint8_t { Breidbart, SwitchPair };

struct AttackStrategy {
    AttackKind kind = AttackKind::SwitchPair;
};

struct SessionRecord {
    SchemeConfig config;
    std::int64_t trains_sent = 0;
    SiftedKey alice_key;
    SiftedKey bob_key;
    std::vector<std::uint8_t> eve_known_mask;    // per sifted bit: Eve knows Alice's bit
    std::int64_t discarded_edge_detections = 0;
    std::int64_t discarded_basis_mismatch = 0;   // BB84 only
    std::int64_t suppressed_trains = 0;          // adversary swallowed the photon
    std::int64_t eve_guess_correct = 0;          // BB84 Breidbart guesses over sifted bits
    std::int64_t eve_guess_total = 0;
};

struct EmpiricalMetrics {
    double eta_p_hat = 0;        // sifted bits / trains sent
    double p_o_hat = 0;          // alice/bob disagreement fraction
    double eve_fraction_hat = 0; // fraction of sifted bits Eve knows deterministically
};

// Runs n_trains exchanges. Trains are processed in fixed-size shards, each
// with an rng stream derived from (seed, shard index), and shard results are
// merged in shard order, so the transcript depends only on (config, channel,
// adversary, seed) -- never on the worker count.
SessionRecord run_session(const SchemeConfig& config, std::int64_t n_trains,
                          const ChannelModel& channel,
                          std::optional<AttackStrategy> adversary,
                          std::uint64_t seed, int workers = 1);

EmpiricalMetrics empirical_metrics(const SessionRecord& record);

// Canonical text form of a record; used to check byte determinism.
std::string serialize(const SessionRecord& record);

}  // namespace qkd
