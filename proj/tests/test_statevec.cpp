#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wuhan/selftest.hpp"
#include "wuhan/states.hpp"

using namespace wuhan;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void expect_amplitudes(const StateVector& s, const std::vector<Complex>& ref, double tol = 1e-12) {
    ASSERT_EQ(s.dimension(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_NEAR(s.amplitudes()[i].real(), ref[i].real(), tol) << "i=" << i;
        EXPECT_NEAR(s.amplitudes()[i].imag(), ref[i].imag(), tol) << "i=" << i;
    }
}

/// Fraction of `n` seeded draws for which `draw` returns true.
template <class F>
double frequency(int n, std::uint64_t seed, F&& draw) {
    Rng rng(seed);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        hits += draw(rng) ? 1 : 0;
    }
    return static_cast<double>(hits) / n;
}

} // namespace

TEST(NewRegister, StartsInAllZeros) {
    expect_amplitudes(new_register(1), {1.0, 0.0});
    expect_amplitudes(new_register(2), {1.0, 0.0, 0.0, 0.0});
}

TEST(NewRegister, SizeBounds) {
    EXPECT_THROW(new_register(0), StateError);
    EXPECT_THROW(new_register(9), StateError);
    EXPECT_NO_THROW(new_register(8));
}

TEST(Tensor, BasisKets) {
    const auto s = tensor(StateVector::basis(1, 0), StateVector::basis(1, 1));
    expect_amplitudes(s, {0.0, 1.0, 0.0, 0.0});
}

TEST(Tensor, PlusWithWState) {
    // 1/sqrt(2) * 1/sqrt(3) on |0 100>, i.e. index 0b0100.
    const auto s = tensor(plus_state(), w_state());
    ASSERT_EQ(s.num_qubits(), 4u);
    EXPECT_NEAR(s.amplitude(0b0100).real(), 1.0 / std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(s.amplitude(0b1001).real(), 1.0 / std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(std::abs(s.amplitude(0b0000)), 0.0, 1e-12);
}

TEST(Tensor, Overflow) {
    EXPECT_THROW(tensor(new_register(5), new_register(4)), StateError);
}

TEST(Tensor, PreservesNormProperty) {
    Rng rng(11);
    for (int k = 0; k < 100; ++k) {
        const auto a = random_state(1 + k % 4, rng);
        const auto b = random_state(1 + (k / 4) % 4, rng);
        EXPECT_NEAR(tensor(a, b).norm_squared(), 1.0, 1e-12);
    }
}

TEST(ApplyGate, SingleQubitGates) {
    expect_amplitudes(apply_gate(new_register(1), Gate::x(0)), {0.0, 1.0});
    expect_amplitudes(apply_gate(new_register(1), Gate::h(0)), {kInvSqrt2, kInvSqrt2});
    expect_amplitudes(apply_gate(plus_state(), Gate::z(0)), {kInvSqrt2, -kInvSqrt2});
}

TEST(ApplyGate, CnotUsesBigEndianOrder) {
    // |10> -> |11>: qubit 0 is the high bit.
    expect_amplitudes(apply_gate(StateVector::basis(2, 0b10), Gate::cnot(0, 1)), {0.0, 0.0, 0.0, 1.0});
    expect_amplitudes(apply_gate(StateVector::basis(2, 0b01), Gate::cnot(0, 1)), {0.0, 1.0, 0.0, 0.0});
}

TEST(ApplyGate, InvalidOperands) {
    EXPECT_THROW(apply_gate(new_register(2), Gate::x(2)), StateError);
    EXPECT_THROW(apply_gate(new_register(2), Gate::cnot(1, 1)), StateError);
    EXPECT_THROW(apply_gate(new_register(2), Gate{GateKind::CNOT, 0, std::nullopt}), StateError);
    EXPECT_THROW(apply_gate(new_register(2), Gate{GateKind::H, 0, 1}), StateError);
}

TEST(ApplyGate, RandomCircuitsPreserveNorm) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 6;
        auto s = random_state(n, rng);
        for (int step = 0; step < 40; ++step) {
            const std::size_t q = rng.next_u64() % n;
            const std::size_t r = (q + 1 + rng.next_u64() % (n - 1)) % n;
            switch (rng.next_u64() % 4) {
            case 0: s = apply_gate(s, Gate::x(q)); break;
            case 1: s = apply_gate(s, Gate::z(q)); break;
            case 2: s = apply_gate(s, Gate::h(q)); break;
            default: s = apply_gate(s, Gate::cnot(q, r)); break;
            }
        }
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    }
}

TEST(MeasureBz, Eigenstate) {
    Rng rng(1);
    const auto m = measure_bz(StateVector::basis(1, 1), 0, rng);
    EXPECT_EQ(m.outcome, 1);
    EXPECT_DOUBLE_EQ(m.probability, 1.0);
    expect_amplitudes(m.state, {0.0, 1.0});
}

TEST(MeasureBz, CharlieQubitOfW) {
    // Oracle: squared amplitudes with c = 0.
    const double p0 = oracle::probability_c(oracle::w(), 0);
    EXPECT_NEAR(p0, 2.0 / 3.0, 1e-15);

    const auto w = w_state();
    EXPECT_NEAR(bz_probabilities(w, 2)[0], p0, 1e-12);
    const auto m = project_bz(w, 2, 0);
    // Residual (|10> + |01>)/sqrt(2) on (a, b), c = 0.
    EXPECT_TRUE(equal_up_to_global_phase(m.state, tensor(bell_state(BellOutcome::PsiPlus), new_register(1)), 1e-12));

    const double f = frequency(30000, 99, [&](Rng& rng) { return measure_bz(w, 2, rng).outcome == 0; });
    EXPECT_NEAR(f, 2.0 / 3.0, 0.01);
}

TEST(MeasureBz, Idempotent) {
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const auto s = random_state(3, rng);
        const auto first = measure_bz(s, 1, rng);
        const auto second = measure_bz(first.state, 1, rng);
        EXPECT_EQ(first.outcome, second.outcome);
        EXPECT_TRUE(equal_up_to_global_phase(first.state, second.state, 1e-12));
        EXPECT_NEAR(second.probability, 1.0, 1e-12);
    }
}

TEST(MeasureBz, ZeroProbabilityProjectionRejected) {
    EXPECT_THROW(project_bz(new_register(1), 0, 1), StateError);
    EXPECT_THROW(project_bz(new_register(1), 0, 2), StateError);
}

TEST(MeasureBx, PlusIsDeterministic) {
    Rng rng(1);
    const auto m = measure_bx(plus_state(), 0, rng);
    EXPECT_EQ(m.outcome, Sign::Plus);
    EXPECT_TRUE(equal_up_to_global_phase(m.state, plus_state(), 1e-12));
}

TEST(MeasureBx, ZeroIsUnbiased) {
    const auto p = bx_probabilities(new_register(1), 0);
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[1], 0.5, 1e-12);
    const double f = frequency(20000, 7, [](Rng& rng) { return measure_bx(new_register(1), 0, rng).outcome == Sign::Plus; });
    EXPECT_NEAR(f, 0.5, 0.015);
}

TEST(MeasureBx, OneMinusZeroIsMinus) {
    // (|1> - |0>)/sqrt(2) = -|->.
    Rng rng(1);
    const auto s = qubit_state(-1.0, 1.0);
    EXPECT_NEAR(bx_probabilities(s, 0)[1], 1.0, 1e-12);
    EXPECT_EQ(measure_bx(s, 0, rng).outcome, Sign::Minus);
}

TEST(MeasureBx, InvalidIndex) {
    Rng rng(1);
    EXPECT_THROW(measure_bx(plus_state(), 1, rng), StateError);
}

TEST(MeasureBell, PsiPlusIsDeterministic) {
    Rng rng(4);
    const auto reg = tensor(new_register(1), bell_state(BellOutcome::PsiPlus));
    const auto m = measure_bell(reg, 1, 2, rng);
    EXPECT_EQ(m.outcome, BellOutcome::PsiPlus);
    EXPECT_NEAR(m.probability, 1.0, 1e-12);
}

TEST(MeasureBell, ZeroZeroSplitsOverPhi) {
    const auto p = bell_probabilities(new_register(2), 0, 1);
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[1], 0.5, 1e-12);
    EXPECT_NEAR(p[2], 0.0, 1e-12);
    EXPECT_NEAR(p[3], 0.0, 1e-12);
}

TEST(MeasureBell, MessageTimesPsiPlusIsUniform) {
    // Oracle: norms of the four teleportation branches.
    Rng rng(21);
    for (int k = 0; k < 20; ++k) {
        const auto msg = random_state(1, rng);
        const oracle::Qubit m{msg.amplitudes()[0], msg.amplitudes()[1]};
        const auto reg = tensor(msg, bell_state(BellOutcome::PsiPlus));
        const auto p = bell_probabilities(reg, 0, 1);
        for (int b = 0; b < 4; ++b) {
            const double expected = oracle::norm2(oracle::teleport_branch(m, oracle::bell(2), b));
            EXPECT_NEAR(expected, 0.25, 1e-12);
            EXPECT_NEAR(p[static_cast<std::size_t>(b)], expected, 1e-12);
        }
    }
}

TEST(MeasureBell, IdenticalIndicesRejected) {
    Rng rng(1);
    EXPECT_THROW(measure_bell(new_register(2), 1, 1, rng), StateError);
}

TEST(MeasureBell, ProjectorsAgreeWithCnotHadamardCircuit) {
    Rng rng(8);
    for (int k = 0; k < 50; ++k) {
        const auto s = random_state(3, rng);
        const auto direct = bell_probabilities(s, 0, 2);
        const auto rotated = apply_gate(apply_gate(s, Gate::cnot(0, 2)), Gate::h(0));
        // After the circuit, phi+ -> |0.0>, phi- -> |1.0>, psi+ -> |0.1>, psi- -> |1.1>.
        const auto z0 = bz_probabilities(project_bz(rotated, 2, 0).state, 0);
        const auto pc = bz_probabilities(rotated, 2);
        EXPECT_NEAR(direct[0], pc[0] * z0[0], 1e-12);
        EXPECT_NEAR(direct[1], pc[0] * z0[1], 1e-12);
    }
}

TEST(GlobalPhase, Examples) {
    // X|-> = -|->.
    EXPECT_TRUE(equal_up_to_global_phase(minus_state(), apply_gate(minus_state(), Gate::x(0)), 1e-9));
    EXPECT_FALSE(equal_up_to_global_phase(StateVector::basis(1, 0), StateVector::basis(1, 1), 1e-9));
    const auto i_plus = StateVector::from_amplitudes({Complex(0, 1), Complex(0, 1)});
    EXPECT_TRUE(equal_up_to_global_phase(plus_state(), i_plus, 1e-12));
    EXPECT_THROW(equal_up_to_global_phase(new_register(1), new_register(2), 1e-9), StateError);
}

TEST(ExtractQubit, ProductAndEntangled) {
    const auto product = tensor(tensor(plus_state(), minus_state()), new_register(1));
    const auto q = extract_qubit(product, 1);
    ASSERT_TRUE(q.has_value());
    EXPECT_TRUE(equal_up_to_global_phase(*q, minus_state(), 1e-12));
    EXPECT_FALSE(extract_qubit(bell_state(BellOutcome::PhiPlus), 0).has_value());
}

TEST(FromAmplitudes, RejectsBadInput) {
    EXPECT_THROW(StateVector::from_amplitudes({0.0, 0.0}), StateError);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), StateError);
}

TEST(SeedDeterminism, SameSeedSameOutcomes) {
    auto run = [](std::uint64_t seed) {
        Rng rng(seed);
        std::vector<int> out;
        auto s = tensor(plus_state(), w_state());
        for (int i = 0; i < 200; ++i) {
            out.push_back(measure_bz(s, static_cast<std::size_t>(i % 4), rng).outcome);
            out.push_back(static_cast<int>(measure_bell(s, 0, 1, rng).outcome));
        }
        return out;
    };
    EXPECT_EQ(run(42), run(42));
    EXPECT_NE(run(42), run(43));
}

TEST(Rng, DerivedStreamsAreIndexBased) {
    EXPECT_EQ(Rng::for_trial(9, 3).seed(), Rng::for_trial(9, 3).seed());
    EXPECT_NE(Rng::for_trial(9, 3).seed(), Rng::for_trial(9, 4).seed());
    Rng a(5);
    const auto child = a.derive(1).seed();
    a.next_u64();
    EXPECT_EQ(a.derive(1).seed(), child);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(InvariantSuite, AllPass) {
    for (const auto& c : run_invariant_suite()) {
        EXPECT_TRUE(c.passed) << c.name << " worst=" << c.worst;
    }
}
