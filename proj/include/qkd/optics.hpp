#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qkd/rng.hpp"

// Discrete-time amplitude model of the transmitter/receiver optics. Time is
// binned in units of the differential delay; a photon is a normalized vector
// of complex amplitudes over those bins, and every interferometer is a small
// linear map on that vector followed by |.|^2.

namespace qkd {

using Complex = std::complex<double>;

// Per-pulse phases as integer quarter turns (multiples of pi/2). All protocol
// phases live on this lattice, so the phase factors are exactly
// {1, i, -1, -i} and the amplitude arithmetic never accumulates trig error.
struct PhasePattern {
    std::vector<std::uint8_t> quarter_turns;  // each taken mod 4

    std::size_t size() const { return quarter_turns.size(); }

    static Complex unit(int quarter_turns);  // i^q
};

// One transmitted photon: a complex amplitude per time bin.
struct PulseTrain {
    std::vector<Complex> amplitudes;

    std::size_t length() const { return amplitudes.size(); }
    double total_probability() const;
    bool is_normalized(double tol = 1e-12) const;
};

// Receiver delay element: a whole-bin delay on one arm plus an internal phase
// on the delayed arm. Phase 0 aligns the detectors with the bit convention
// (equal adjacent phases always fire D0).
struct DelaySpec {
    int delay_bins = 1;
    int internal_phase_quarter_turns = 0;
};

enum class Detector : std::uint8_t { D0 = 0, D1 = 1 };

// Probability over (time slot, detector) outcomes; slots are dense 0..n-1.
class DetectionDistribution {
public:
    explicit DetectionDistribution(int n_slots);

    double probability(int slot, Detector det) const;
    void set(int slot, Detector det, double p);
    int slot_count() const { return n_slots_; }
    double total() const;

private:
    int n_slots_;
    std::vector<double> p_;  // slot-major, D0 before D1
};

enum class Branch : std::uint8_t { Delay1 = 1, Delay2 = 2 };

struct DetectionEvent {
    int slot = 0;
    Detector detector = Detector::D0;
    std::optional<Branch> branch;  // set by the dual-delay receiver
};

// Fast-switch measurement plan: bins grouped into fully overlapping pairs
// plus pass-through singletons. Together the groups must cover every bin of
// the train exactly once.
struct SwitchSchedule {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> pass_through;

    std::size_t slot_count() const { return pairs.size() + pass_through.size(); }

    // (0,1)(2,3)...; an odd train length leaves the last bin as pass-through.
    static SwitchSchedule fixed_adjacent(int n_bins);
    // Even lengths: the fixed pairing. Odd lengths: one maximal adjacent
    // pairing drawn uniformly (the unpaired bin is a random even index).
    static SwitchSchedule random_adjacent(int n_bins, RngStream& rng);
};

// Equal-amplitude train of n_pulses bins carrying the pattern's phases:
// amplitude[j] = i^q[j] / sqrt(n).
PulseTrain build_train(int n_pulses, const PhasePattern& pattern);

// Same train built the way the series transmitter actually produces it: one
// input pulse through m split-delay-recombine stages with delays 1,2,4,...
// bins (one output port kept, renormalized), then the per-bin phase
// modulator. Equals build_train(2^m, pattern) bin for bin.
PulseTrain serial_transmitter_train(int m, const PhasePattern& pattern);

// Parallel-path transmitter with m delay elements: m+1 equal pulses. The
// direct path has no modulator, so the first entry of the pattern must be 0.
PulseTrain parallel_transmitter_train(int m, const PhasePattern& pattern);

// Split/delay/recombine receiver. Slot j collects the direct amplitude of
// bin j against the delayed amplitude of bin j-d:
//   amp(D0) = (a[j] + e^{i theta} a[j-d]) / 2
//   amp(D1) = (a[j] - e^{i theta} a[j-d]) / 2
// with out-of-range amplitudes zero. Lossless: probabilities sum to 1.
DetectionDistribution interferometer_distribution(const PulseTrain& train,
                                                  const DelaySpec& delay);

// Fast-switch receiver: each scheduled pair overlaps completely,
//   amp(D0/D1) = (a[p] +- a[q]) / sqrt(2),
// so no probability leaks into edge slots. A pass-through bin reaches the
// recombiner alone and splits 50/50 with no phase information.
DetectionDistribution switch_overlap_distribution(const PulseTrain& train,
                                                  const SwitchSchedule& schedule);

// Draw one detection. Deterministic given the stream state.
DetectionEvent sample_detection(const DetectionDistribution& dist, RngStream& rng);

}  // namespace qkd
