// Adversaries. Channel attacks are intercept hooks run while a travel qubit
// is in flight. The out-of-control attack (OCA) is run by Alice and Bob
// themselves: they skip Charlie's distillation and decode from the
// correlation between Alice's Bell result and Bob's B_x result.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wuhan/qsdc.hpp"

namespace wuhan {

enum class AttackKind { InterceptResendBz, InterceptResendBx, EntangleProbe, OcaXi, OcaW };

constexpr std::string_view to_string(AttackKind k) noexcept {
    switch (k) {
    case AttackKind::InterceptResendBz: return "intercept-resend-bz";
    case AttackKind::InterceptResendBx: return "intercept-resend-bx";
    case AttackKind::EntangleProbe: return "entangle-probe";
    case AttackKind::OcaXi: return "oca-xi";
    case AttackKind::OcaW: return "oca-w";
    }
    return "?";
}

constexpr bool is_channel_attack(AttackKind k) noexcept {
    return k == AttackKind::InterceptResendBz || k == AttackKind::InterceptResendBx ||
           k == AttackKind::EntangleProbe;
}

enum class Basis { Bz, Bx };

/// Measures the travel qubit bound for `target` and forwards the collapsed
/// eigenstate.
inline InterceptHook intercept_resend(Basis basis, PartyId target = PartyId::Alice) {
    return [basis, target](TransitAccess& t) {
        if (t.destination() != target) {
            return;
        }
        if (basis == Basis::Bz) {
            t.measure_bz();
        } else {
            t.measure_bx();
        }
    };
}

/// CNOT from the travel qubit bound for `target` onto a fresh |0> ancilla
/// that Eve keeps and reads after the transcript is complete.
inline InterceptHook entangle_probe(PartyId target = PartyId::Alice) {
    return [target](TransitAccess& t) {
        if (t.destination() != target) {
            return;
        }
        t.cnot_to(t.adjoin_ancilla());
    };
}

/// Eve's B_z reading of the ancilla, if this register has one.
inline std::optional<int> eve_read_ancilla(Register& reg, Rng& rng) {
    if (!reg.has(Role::Ancilla)) {
        return std::nullopt;
    }
    return reg.measure_bz(Role::Ancilla, PartyId::Eve, rng);
}

// ---------------------------------------------------------------------------
// Out-of-control attack

/// Total map (Bell outcome, Bob's sign) -> bit.
class OcaDecodeRule {
public:
    constexpr OcaDecodeRule() = default;
    constexpr explicit OcaDecodeRule(std::array<int, 8> table) : table_(table) {}

    /// Every one of the 256 rules, enumerated by their 8-bit table.
    static constexpr OcaDecodeRule from_index(unsigned index) {
        std::array<int, 8> t{};
        for (std::size_t k = 0; k < 8; ++k) {
            t[k] = static_cast<int>((index >> k) & 1U);
        }
        return OcaDecodeRule(t);
    }

    /// {phi+, psi+} with + -> 1, {phi-, psi-} with - -> 1, otherwise 0.
    static constexpr OcaDecodeRule correlation_table() {
        OcaDecodeRule r;
        for (auto b : kBellOutcomes) {
            const bool plus_family = b == BellOutcome::PhiPlus || b == BellOutcome::PsiPlus;
            r.table_[slot(b, Sign::Plus)] = plus_family ? 1 : 0;
            r.table_[slot(b, Sign::Minus)] = plus_family ? 0 : 1;
        }
        return r;
    }

    constexpr int operator()(BellOutcome b, Sign s) const { return table_[slot(b, s)]; }

    static constexpr std::size_t slot(BellOutcome b, Sign s) noexcept {
        return static_cast<std::size_t>(to_code(b)) * 2 + (s == Sign::Plus ? 0 : 1);
    }

    constexpr const std::array<int, 8>& table() const noexcept { return table_; }

private:
    std::array<int, 8> table_{};
};

constexpr int oca_decode(const OcaDecodeRule& rule, BellOutcome bell, Sign sign) { return rule(bell, sign); }

struct OcaRun {
    std::vector<int> sent;
    std::vector<BellOutcome> outcomes;
    std::vector<Sign> signs;
    std::vector<int> decoded;

    std::size_t bit_errors() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < sent.size(); ++i) {
            n += sent[i] != decoded[i] ? 1 : 0;
        }
        return n;
    }
    bool success(std::size_t i) const { return sent.at(i) == decoded.at(i); }
};

/// Under-table decode on undistilled triples: Alice Bell-measures (m, a) and
/// publishes, Bob measures b in B_x and applies `rule`. Charlie's c is never
/// touched. Consumes one triple per bit.
inline OcaRun run_oca(std::span<const int> bits, std::span<Register* const> triples, const OcaDecodeRule& rule,
                      ClassicalBus& bus, Rng& rng) {
    if (triples.size() < bits.size()) {
        throw PoolExhausted("under-table run needs one undistilled triple per bit");
    }
    OcaRun run;
    run.sent.assign(bits.begin(), bits.end());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        Register& reg = *triples[i];
        reg.adjoin_front(encode_message_qubit(MessageBit(bits[i])), Role::M, PartyId::Alice);
        const auto bell = reg.measure_bell(Role::M, Role::A, PartyId::Alice, rng);
        bus.publish(PartyId::Alice, RecordTag::BellResult, {static_cast<std::int64_t>(i), to_code(bell)});
        const auto sign = reg.measure_bx(Role::B, PartyId::Bob, rng);
        run.outcomes.push_back(bell);
        run.signs.push_back(sign);
        run.decoded.push_back(oca_decode(rule, bell, sign));
    }
    return run;
}

constexpr InitialStateKind required_state(AttackKind oca) {
    return oca == AttackKind::OcaXi ? InitialStateKind::Xi : InitialStateKind::W;
}

struct OcaSessionResult {
    OcaRun run;
    Verdict verdict = Verdict::Completed;
    std::size_t sessions = 0;
    std::size_t triples = 0;
    std::size_t checked = 0;
    std::size_t check_failures = 0;
};

struct OcaOptions {
    double check_fraction = 0.5;
    /// Triples per session; 0 picks a length that covers the message.
    std::size_t sequence_length = 0;
    /// Sessions restarted after an abort before giving up.
    std::size_t max_restarts = 0;
    std::size_t max_sessions = 64;
};

/// Distribution and checking as usual, then the under-table decode on the
/// unchecked triples. Extra sessions are run until enough triples survive.
inline OcaSessionResult run_oca_session(AttackKind kind, std::span<const int> bits, Rng& rng,
                                        const OcaOptions& options = {}, ClassicalBus* transcript = nullptr) {
    if (kind != AttackKind::OcaXi && kind != AttackKind::OcaW) {
        throw ConfigError("run_oca_session takes OcaXi or OcaW");
    }
    ClassicalBus local;
    ClassicalBus& bus = transcript ? *transcript : local;
    const QuantumChannel channel;
    const std::size_t length =
        options.sequence_length > 0
            ? options.sequence_length
            : std::max<std::size_t>(2 * bits.size() + 16,
                                    static_cast<std::size_t>(std::ceil(1.0 / options.check_fraction)));
    OcaSessionResult out;
    std::vector<Register> supply;
    std::size_t restarts = 0;
    while (out.sessions == 0 || supply.size() < bits.size()) {
        if (out.sessions >= options.max_sessions) {
            throw PoolExhausted("under-table run did not collect enough triples");
        }
        SessionConfig config{length, options.check_fraction, required_state(kind), rng.next_u64()};
        auto session = run_session(config, channel, bus, SessionStage::Checked);
        ++out.sessions;
        out.triples += config.sequence_length;
        out.checked += session.checks.size();
        out.check_failures += session.check_failures();
        if (session.verdict == Verdict::Aborted) {
            if (restarts++ < options.max_restarts) {
                continue;
            }
            out.verdict = Verdict::Aborted;
            return out;
        }
        for (auto loc : session.unchecked) {
            supply.push_back(std::move(session.distribution.triples[loc]));
        }
    }
    std::vector<Register*> handles;
    handles.reserve(supply.size());
    for (auto& r : supply) {
        handles.push_back(&r);
    }
    out.run = run_oca(bits, handles, OcaDecodeRule::correlation_table(), bus, rng);
    return out;
}

} // namespace wuhan
