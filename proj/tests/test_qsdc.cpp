#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wuhan/qsdc.hpp"
#include "wuhan/selftest.hpp"

using namespace wuhan;

namespace {

PooledPair psi_plus_pair(std::size_t location = 0) {
    return {location, Register(tensor(bell_state(BellOutcome::PsiPlus), new_register(1)),
                               {Role::A, Role::B, Role::C}, PartyId::Charlie)};
}

/// Pair register with custody as after distribution.
PooledPair distributed_pair(std::size_t location = 0) {
    auto p = psi_plus_pair(location);
    p.reg.transfer(p.reg.qubit(Role::A), PartyId::Charlie, PartyId::Alice);
    p.reg.transfer(p.reg.qubit(Role::B), PartyId::Charlie, PartyId::Bob);
    return p;
}

EntanglementPool pool_of(std::size_t n) {
    EntanglementPool pool;
    for (std::size_t i = 0; i < n; ++i) {
        pool.add(distributed_pair(i));
    }
    return pool;
}

oracle::Mat2 gate_matrix(GateKind k) {
    return k == GateKind::X ? oracle::pauli_x() : oracle::pauli_z();
}

} // namespace

TEST(CorrectionTable, MatchesBruteForceBranches) {
    // For each Bell outcome, find by brute force which of {I, X, Z, Z-then-X}
    // restores every sampled message, and compare with the library table.
    Rng rng(31);
    std::vector<oracle::Qubit> messages;
    for (int i = 0; i < 20; ++i) {
        const auto s = random_state(1, rng);
        messages.push_back({s.amplitudes()[0], s.amplitudes()[1]});
    }
    const std::vector<std::vector<GateKind>> candidates{{}, {GateKind::X}, {GateKind::Z}, {GateKind::Z, GateKind::X}};
    for (int k = 0; k < 4; ++k) {
        std::vector<std::vector<GateKind>> working;
        for (const auto& seq : candidates) {
            bool all = true;
            for (const auto& m : messages) {
                auto bob = oracle::teleport_branch(m, oracle::bell(2), k);
                for (auto g : seq) bob = oracle::apply(gate_matrix(g), bob);
                all = all && oracle::phase_distance(bob, m) < 1e-12;
            }
            if (all) working.push_back(seq);
        }
        ASSERT_EQ(working.size(), 1u) << "outcome " << k;
        EXPECT_EQ(correction_for(kBellOutcomes[static_cast<std::size_t>(k)]), working[0]) << "outcome " << k;
    }
    EXPECT_TRUE(correction_for(BellOutcome::PsiPlus).empty());
    EXPECT_EQ(correction_for(BellOutcome::PhiPlus), std::vector<GateKind>{GateKind::X});
    EXPECT_EQ(correction_for(BellOutcome::PhiMinus), (std::vector<GateKind>{GateKind::Z, GateKind::X}));
}

TEST(TeleportOne, MinusSurvivesEveryBranch) {
    for (auto b : kBellOutcomes) {
        auto pair = distributed_pair();
        ClassicalBus bus;
        const auto t = teleport_one(minus_state(), pair, bus, b);
        EXPECT_NEAR(t.probability, 0.25, 1e-12);
        ASSERT_TRUE(t.bob_qubit.has_value());
        EXPECT_TRUE(equal_up_to_global_phase(*t.bob_qubit, minus_state(), 1e-12)) << to_string(b);
    }
}

TEST(TeleportOne, ArbitraryMessageAllBranches) {
    const auto message = qubit_state(0.6, 0.8);
    for (auto b : kBellOutcomes) {
        auto pair = distributed_pair();
        ClassicalBus bus;
        const auto t = teleport_one(message, pair, bus, b);
        ASSERT_TRUE(t.bob_qubit.has_value());
        EXPECT_TRUE(equal_up_to_global_phase(*t.bob_qubit, message, 1e-12)) << to_string(b);
    }
}

TEST(TeleportOne, RandomMessagesProperty) {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        const auto message = random_state(1, rng);
        for (auto b : kBellOutcomes) {
            auto pair = distributed_pair();
            ClassicalBus bus;
            const auto t = teleport_one(message, pair, bus, b);
            ASSERT_TRUE(t.bob_qubit.has_value());
            ASSERT_TRUE(equal_up_to_global_phase(*t.bob_qubit, message, 1e-10));
        }
    }
}

TEST(TeleportOne, SampledOutcomePublishesAndKeepsMessageWithAlice) {
    Rng rng(13);
    auto pair = distributed_pair(42);
    ClassicalBus bus;
    const auto t = teleport_one(plus_state(), pair, bus, rng);
    EXPECT_TRUE(pair.consumed);
    EXPECT_EQ(pair.reg.holder(Role::M), PartyId::Alice);
    ASSERT_EQ(bus.size(), 1u);
    EXPECT_EQ(bus.records()[0].tag, RecordTag::BellResult);
    EXPECT_EQ(bus.records()[0].sender, PartyId::Alice);
    EXPECT_EQ(bus.records()[0].payload, (std::vector<std::int64_t>{42, to_code(t.outcome)}));
    EXPECT_THROW(teleport_one(plus_state(), pair, bus, rng), std::logic_error);
}

TEST(TeleportOne, OutcomeIsMessageIndependent) {
    // The published Bell result is uniform for |+> and |->, so it carries no
    // information about the bit.
    for (int bit = 0; bit < 2; ++bit) {
        Rng rng(100 + static_cast<std::uint64_t>(bit));
        std::array<int, 4> counts{};
        ClassicalBus bus;
        for (int i = 0; i < 8000; ++i) {
            auto pair = distributed_pair();
            ++counts[static_cast<std::size_t>(to_code(teleport_one(encode_message_qubit(MessageBit(bit)), pair, bus, rng).outcome))];
        }
        for (int c : counts) {
            EXPECT_NEAR(c / 8000.0, 0.25, 0.02);
        }
    }
}

TEST(RunQsdc, ExampleMessage) {
    Rng rng(14);
    auto pool = pool_of(6);
    ClassicalBus bus;
    const auto bits = parse_bits("010110");
    const auto run = run_qsdc(bits, pool, bus, rng);
    EXPECT_EQ(run.decoded, bits);
    EXPECT_EQ(run.pairs_consumed, 6u);
    EXPECT_EQ(bus.count(RecordTag::BellResult), 6u);
    EXPECT_EQ(run.bit_errors(), 0u);
}

TEST(RunQsdc, EmptyMessage) {
    Rng rng(15);
    auto pool = pool_of(0);
    ClassicalBus bus;
    const auto run = run_qsdc(std::vector<int>{}, pool, bus, rng);
    EXPECT_TRUE(run.decoded.empty());
    EXPECT_EQ(bus.size(), 0u);
}

TEST(RunQsdc, PoolExhausted) {
    Rng rng(16);
    auto pool = pool_of(6);
    ClassicalBus bus;
    EXPECT_THROW(run_qsdc(parse_bits("0101101"), pool, bus, rng), PoolExhausted);
    EXPECT_EQ(pool.available(), 6u);
}

TEST(RunQsdc, ZeroErrorsOverRandomMessages) {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> bits(40);
        for (auto& b : bits) b = rng.bit();
        auto pool = pool_of(bits.size());
        ClassicalBus bus;
        const auto run = run_qsdc(bits, pool, bus, rng);
        ASSERT_EQ(run.decoded, bits);
        ASSERT_EQ(run.outcomes.size(), bits.size());
    }
}
