// Direct communication over distilled |psi+> pairs: Alice encodes each bit
// in B_x, teleports it, Bob corrects and reads it out in B_x. The message
// qubit itself never leaves Alice.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wuhan/protocol.hpp"

namespace wuhan {

/// Bob's correction for a |psi+> channel, in application order.
inline std::vector<GateKind> correction_for(BellOutcome outcome) {
    switch (outcome) {
    case BellOutcome::PsiPlus: return {};
    case BellOutcome::PsiMinus: return {GateKind::Z};
    case BellOutcome::PhiPlus: return {GateKind::X};
    case BellOutcome::PhiMinus: return {GateKind::Z, GateKind::X};
    }
    return {};
}

struct TeleportResult {
    BellOutcome outcome;
    double probability;
    /// Bob's corrected qubit, when it is not entangled with anything else.
    std::optional<StateVector> bob_qubit;
};

namespace detail {

inline TeleportResult teleport_impl(const StateVector& message, PooledPair& pair, ClassicalBus& bus, Rng* rng,
                                    std::optional<BellOutcome> forced) {
    if (pair.consumed) {
        throw std::logic_error("pair at location " + std::to_string(pair.location) + " was already consumed");
    }
    if (message.num_qubits() != 1) {
        throw StateError("message must be a single qubit");
    }
    pair.consumed = true;
    auto& reg = pair.reg;
    reg.adjoin_front(message, Role::M, PartyId::Alice);

    BellOutcome outcome{};
    double probability = 0.0;
    if (forced) {
        outcome = *forced;
        probability = reg.project_bell(Role::M, Role::A, outcome, PartyId::Alice);
    } else {
        const auto p = bell_probabilities(reg.state(), reg.qubit(Role::M).index, reg.qubit(Role::A).index);
        outcome = reg.measure_bell(Role::M, Role::A, PartyId::Alice, *rng);
        probability = p[static_cast<std::size_t>(to_code(outcome))];
    }
    bus.publish(PartyId::Alice, RecordTag::BellResult, {static_cast<std::int64_t>(pair.location), to_code(outcome)});

    for (auto g : correction_for(outcome)) {
        reg.apply(g, Role::B, PartyId::Bob);
    }
    if (reg.holder(Role::M) != PartyId::Alice) {
        throw CustodyError("message qubit left Alice during teleportation");
    }
    return {outcome, probability, extract_qubit(reg.state(), reg.qubit(Role::B).index)};
}

} // namespace detail

/// Alice Bell-measures (m, a), publishes the result, Bob corrects b.
inline TeleportResult teleport_one(const StateVector& message, PooledPair& pair, ClassicalBus& bus, Rng& rng) {
    return detail::teleport_impl(message, pair, bus, &rng, std::nullopt);
}

/// Same, with Alice's Bell outcome forced to `outcome` (Born probability is
/// reported in the result). Used to check every branch.
inline TeleportResult teleport_one(const StateVector& message, PooledPair& pair, ClassicalBus& bus,
                                   BellOutcome outcome) {
    return detail::teleport_impl(message, pair, bus, nullptr, outcome);
}

struct QsdcRun {
    std::vector<int> sent;
    std::vector<BellOutcome> outcomes;
    std::vector<int> decoded;
    std::size_t pairs_consumed = 0;

    std::size_t bit_errors() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < sent.size(); ++i) {
            n += sent[i] != decoded[i] ? 1 : 0;
        }
        return n;
    }
};

inline QsdcRun run_qsdc(std::span<const int> bits, EntanglementPool& pool, ClassicalBus& bus, Rng& rng) {
    if (pool.available() < bits.size()) {
        throw PoolExhausted("message needs " + std::to_string(bits.size()) + " pairs, pool has " +
                            std::to_string(pool.available()));
    }
    QsdcRun run;
    run.sent.assign(bits.begin(), bits.end());
    for (int bit : bits) {
        auto& pair = pool.take();
        const auto t = teleport_one(encode_message_qubit(MessageBit(bit)), pair, bus, rng);
        run.outcomes.push_back(t.outcome);
        run.decoded.push_back(decode_sign(pair.reg.measure_bx(Role::B, PartyId::Bob, rng)));
        ++run.pairs_consumed;
    }
    return run;
}

} // namespace wuhan
