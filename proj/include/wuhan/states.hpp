// Named states used by the protocol: the W and xi triples, the four Bell
// kets and the B_x message encoding.

#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "wuhan/statevec.hpp"

namespace wuhan {

/// Classical bit carried by one message qubit.
struct MessageBit {
    int value;

    constexpr explicit MessageBit(int v) : value(v) {
        if (v != 0 && v != 1) {
            throw StateError("message bit must be 0 or 1");
        }
    }
    friend bool operator==(const MessageBit&, const MessageBit&) = default;
};

enum class InitialStateKind { W, Xi };

constexpr std::string_view to_string(InitialStateKind k) noexcept { return k == InitialStateKind::W ? "W" : "Xi"; }

/// (|100> + |010> + |001>)/sqrt(3) on (a, b, c).
inline StateVector w_state() {
    std::vector<Complex> amp(8);
    amp[0b100] = amp[0b010] = amp[0b001] = 1.0;
    return StateVector::from_amplitudes(std::move(amp));
}

/// (|000> + |110> + |011> + |101>)/2 on (a, b, c).
inline StateVector xi_state() {
    std::vector<Complex> amp(8);
    amp[0b000] = amp[0b110] = amp[0b011] = amp[0b101] = 1.0;
    return StateVector::from_amplitudes(std::move(amp));
}

inline StateVector initial_state(InitialStateKind kind) {
    return kind == InitialStateKind::W ? w_state() : xi_state();
}

inline StateVector bell_state(BellOutcome kind) {
    const auto a = bell_amplitudes(kind);
    return StateVector::from_amplitudes({a.begin(), a.end()});
}

/// a|0> + b|1>, normalized.
inline StateVector qubit_state(Complex a, Complex b) { return StateVector::from_amplitudes({a, b}); }

inline StateVector plus_state() { return qubit_state(1.0, 1.0); }
inline StateVector minus_state() { return qubit_state(1.0, -1.0); }

/// Bit 1 -> |+>, bit 0 -> |->.
inline StateVector encode_message_qubit(MessageBit bit) { return bit.value == 1 ? plus_state() : minus_state(); }

inline int decode_sign(Sign s) noexcept { return s == Sign::Plus ? 1 : 0; }

inline std::vector<StateVector> encode_message(std::span<const int> bits) {
    std::vector<StateVector> out;
    out.reserve(bits.size());
    for (int b : bits) {
        out.push_back(encode_message_qubit(MessageBit(b)));
    }
    return out;
}

/// Parses a string of '0'/'1' characters.
inline std::vector<int> parse_bits(std::string_view text) {
    std::vector<int> bits;
    bits.reserve(text.size());
    for (char ch : text) {
        if (ch != '0' && ch != '1') {
            throw StateError("message must contain only '0' and '1'");
        }
        bits.push_back(ch - '0');
    }
    return bits;
}

} // namespace wuhan
