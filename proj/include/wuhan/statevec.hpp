// Dense state-vector engine for registers of up to eight qubits.
//
// Qubit ordering is big-endian: qubit 0 is the most significant bit of the
// basis-state index, so a register laid out as (m, a, b, c) stores |m a b c>
// at index m*8 + a*4 + b*2 + c.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wuhan/rng.hpp"

namespace wuhan {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 8;
inline constexpr double kExactTolerance = 1e-12;

class StateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Role a qubit plays in the protocol: message, Alice's a, Bob's b,
/// Charlie's c, or an adversary ancilla.
enum class Role { M, A, B, C, Ancilla };

constexpr std::string_view to_string(Role r) noexcept {
    switch (r) {
    case Role::M: return "m";
    case Role::A: return "a";
    case Role::B: return "b";
    case Role::C: return "c";
    case Role::Ancilla: return "ancilla";
    }
    return "?";
}

/// Position of a qubit inside a register together with its role.
struct QubitIndex {
    std::size_t index;
    Role role;
    friend bool operator==(const QubitIndex&, const QubitIndex&) = default;
};

class StateVector {
public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits) : num_qubits_(checked_size(num_qubits)) {
        amplitudes_.assign(std::size_t{1} << num_qubits_, Complex{0.0, 0.0});
        amplitudes_[0] = 1.0;
    }

    /// Computational basis state |index>.
    static StateVector basis(std::size_t num_qubits, std::size_t index) {
        StateVector s(num_qubits);
        if (index >= s.dimension()) {
            throw StateError("basis index out of range");
        }
        s.amplitudes_[0] = 0.0;
        s.amplitudes_[index] = 1.0;
        return s;
    }

    /// Builds a state from raw amplitudes and rescales it to unit norm, so
    /// unnormalized kets such as |0> + |1> can be written literally.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes) {
        const std::size_t n = log2_exact(amplitudes.size());
        double norm2 = 0.0;
        for (const auto& a : amplitudes) {
            norm2 += std::norm(a);
        }
        if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
            throw StateError("amplitudes must have a finite nonzero norm");
        }
        const double scale = 1.0 / std::sqrt(norm2);
        for (auto& a : amplitudes) {
            a *= scale;
        }
        StateVector s(n);
        s.amplitudes_ = std::move(amplitudes);
        return s;
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }

    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex amplitude(std::size_t index) const { return amplitudes_.at(index); }

    double norm_squared() const noexcept {
        double sum = 0.0;
        for (const auto& a : amplitudes_) {
            sum += std::norm(a);
        }
        return sum;
    }

    /// Bit mask of qubit `q` in a basis-state index.
    std::size_t mask(std::size_t q) const {
        check_qubit(q);
        return std::size_t{1} << (num_qubits_ - 1 - q);
    }

    void check_qubit(std::size_t q) const {
        if (q >= num_qubits_) {
            throw StateError("qubit index " + std::to_string(q) + " out of range for " +
                             std::to_string(num_qubits_) + "-qubit register");
        }
    }

    // Mutable access is reserved for the engine's own kernels below.
    std::vector<Complex>& raw() noexcept { return amplitudes_; }

private:
    static std::size_t checked_size(std::size_t n) {
        if (n < 1 || n > kMaxQubits) {
            throw StateError("register size must be in [1, 8], got " + std::to_string(n));
        }
        return n;
    }

    static std::size_t log2_exact(std::size_t dim) {
        for (std::size_t n = 1; n <= kMaxQubits; ++n) {
            if ((std::size_t{1} << n) == dim) {
                return n;
            }
        }
        throw StateError("amplitude count must be 2^n with 1 <= n <= 8");
    }

    std::size_t num_qubits_;
    std::vector<Complex> amplitudes_;
};

inline StateVector new_register(std::size_t num_qubits) { return StateVector(num_qubits); }

/// Kronecker product; qubits of `left` precede those of `right`.
inline StateVector tensor(const StateVector& left, const StateVector& right) {
    const std::size_t n = left.num_qubits() + right.num_qubits();
    if (n > kMaxQubits) {
        throw StateError("combined register exceeds 8 qubits");
    }
    std::vector<Complex> out(std::size_t{1} << n);
    const auto l = left.amplitudes();
    const auto r = right.amplitudes();
    for (std::size_t i = 0; i < l.size(); ++i) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            out[i * r.size() + j] = l[i] * r[j];
        }
    }
    return StateVector::from_amplitudes(std::move(out));
}

inline Complex inner_product(const StateVector& bra, const StateVector& ket) {
    if (bra.dimension() != ket.dimension()) {
        throw StateError("inner product of registers with different sizes");
    }
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < bra.dimension(); ++i) {
        sum += std::conj(bra.amplitudes()[i]) * ket.amplitudes()[i];
    }
    return sum;
}

/// True iff some unit-modulus lambda gives ||x - lambda*y|| <= tol.
inline bool equal_up_to_global_phase(const StateVector& x, const StateVector& y, double tol) {
    if (x.dimension() != y.dimension()) {
        throw StateError("global-phase comparison of registers with different sizes");
    }
    // The minimizing phase aligns y with x: lambda = <y|x> / |<y|x>|.
    const Complex overlap = inner_product(y, x);
    const Complex lambda = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x.dimension(); ++i) {
        dist2 += std::norm(x.amplitudes()[i] - lambda * y.amplitudes()[i]);
    }
    return std::sqrt(dist2) <= tol;
}

// ---------------------------------------------------------------------------
// Gates

enum class GateKind { X, Z, H, CNOT };

constexpr std::string_view to_string(GateKind k) noexcept {
    switch (k) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
    }
    return "?";
}

struct Gate {
    GateKind kind;
    std::size_t target;
    std::optional<std::size_t> control;

    static Gate x(std::size_t q) { return {GateKind::X, q, std::nullopt}; }
    static Gate z(std::size_t q) { return {GateKind::Z, q, std::nullopt}; }
    static Gate h(std::size_t q) { return {GateKind::H, q, std::nullopt}; }
    static Gate cnot(std::size_t control, std::size_t target) { return {GateKind::CNOT, target, control}; }
};

inline void apply_gate_in_place(StateVector& state, const Gate& gate) {
    const std::size_t t = state.mask(gate.target);
    auto& amp = state.raw();
    if (gate.kind == GateKind::CNOT) {
        if (!gate.control) {
            throw StateError("CNOT needs a control qubit");
        }
        if (*gate.control == gate.target) {
            throw StateError("CNOT control and target must differ");
        }
        const std::size_t c = state.mask(*gate.control);
        for (std::size_t i = 0; i < amp.size(); ++i) {
            if ((i & c) && !(i & t)) {
                std::swap(amp[i], amp[i | t]);
            }
        }
        return;
    }
    if (gate.control) {
        throw StateError(std::string(to_string(gate.kind)) + " takes a single operand");
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if (i & t) {
            continue;
        }
        const Complex a0 = amp[i];
        const Complex a1 = amp[i | t];
        switch (gate.kind) {
        case GateKind::X:
            amp[i] = a1;
            amp[i | t] = a0;
            break;
        case GateKind::Z:
            amp[i | t] = -a1;
            break;
        case GateKind::H:
            amp[i] = s * (a0 + a1);
            amp[i | t] = s * (a0 - a1);
            break;
        case GateKind::CNOT:
            break;
        }
    }
}

inline StateVector apply_gate(StateVector state, const Gate& gate) {
    apply_gate_in_place(state, gate);
    return state;
}

// ---------------------------------------------------------------------------
// Measurement

template <class Outcome>
struct Measured {
    Outcome outcome;
    StateVector state;
    double probability;
};

namespace detail {

/// Inverse-CDF draw over exact outcome probabilities.
inline std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
    double total = 0.0;
    for (double p : probabilities) {
        total += p;
    }
    if (std::abs(total - 1.0) > kExactTolerance) {
        throw std::logic_error("outcome probabilities sum to " + std::to_string(total));
    }
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last_possible = 0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        if (probabilities[k] <= 0.0) {
            continue;
        }
        last_possible = k;
        cumulative += probabilities[k];
        if (u < cumulative) {
            return k;
        }
    }
    // u landed in the rounding gap above the final cumulative sum.
    return last_possible;
}

inline void renormalize(std::vector<Complex>& amp, double probability) {
    const double scale = 1.0 / std::sqrt(probability);
    for (auto& a : amp) {
        a *= scale;
    }
}

} // namespace detail

/// Probabilities of reading 0 and 1 on qubit q.
inline std::array<double, 2> bz_probabilities(const StateVector& state, std::size_t q) {
    const std::size_t m = state.mask(q);
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        p[(i & m) ? 1 : 0] += std::norm(state.amplitudes()[i]);
    }
    return p;
}

/// Collapse of qubit q onto |bit>; throws on a zero-probability branch.
inline Measured<int> project_bz(const StateVector& state, std::size_t q, int bit) {
    if (bit != 0 && bit != 1) {
        throw StateError("B_z outcome must be 0 or 1");
    }
    const double p = bz_probabilities(state, q)[bit];
    if (p <= 0.0) {
        throw StateError("projection onto a zero-probability B_z branch");
    }
    StateVector out = state;
    const std::size_t m = out.mask(q);
    auto& amp = out.raw();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if (((i & m) != 0) != (bit == 1)) {
            amp[i] = 0.0;
        }
    }
    detail::renormalize(amp, p);
    return {bit, std::move(out), p};
}

inline Measured<int> measure_bz(const StateVector& state, std::size_t q, Rng& rng) {
    const auto p = bz_probabilities(state, q);
    const int bit = static_cast<int>(detail::sample_index(p, rng));
    return project_bz(state, q, bit);
}

/// Outcome of a B_x measurement: |+> or |->.
enum class Sign { Plus, Minus };

constexpr std::string_view to_string(Sign s) noexcept { return s == Sign::Plus ? "+" : "-"; }

inline Measured<Sign> project_bx(const StateVector& state, std::size_t q, Sign sign) {
    auto rotated = apply_gate(state, Gate::h(q));
    auto m = project_bz(rotated, q, sign == Sign::Plus ? 0 : 1);
    apply_gate_in_place(m.state, Gate::h(q));
    return {sign, std::move(m.state), m.probability};
}

inline std::array<double, 2> bx_probabilities(const StateVector& state, std::size_t q) {
    return bz_probabilities(apply_gate(state, Gate::h(q)), q);
}

/// H, B_z measurement, H.
inline Measured<Sign> measure_bx(const StateVector& state, std::size_t q, Rng& rng) {
    auto rotated = apply_gate(state, Gate::h(q));
    auto m = measure_bz(rotated, q, rng);
    apply_gate_in_place(m.state, Gate::h(q));
    return {m.outcome == 0 ? Sign::Plus : Sign::Minus, std::move(m.state), m.probability};
}

// ---------------------------------------------------------------------------
// Bell basis

enum class BellOutcome { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes{
    BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus, BellOutcome::PsiMinus};

constexpr std::string_view to_string(BellOutcome b) noexcept {
    switch (b) {
    case BellOutcome::PhiPlus: return "phi+";
    case BellOutcome::PhiMinus: return "phi-";
    case BellOutcome::PsiPlus: return "psi+";
    case BellOutcome::PsiMinus: return "psi-";
    }
    return "?";
}

constexpr int to_code(BellOutcome b) noexcept { return static_cast<int>(b); }

inline BellOutcome bell_from_code(int code) {
    if (code < 0 || code > 3) {
        throw StateError("Bell outcome code must be in [0, 3]");
    }
    return static_cast<BellOutcome>(code);
}

/// Amplitudes of a Bell ket over |00>, |01>, |10>, |11>.
inline std::array<Complex, 4> bell_amplitudes(BellOutcome b) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (b) {
    case BellOutcome::PhiPlus: return {s, 0.0, 0.0, s};
    case BellOutcome::PhiMinus: return {s, 0.0, 0.0, -s};
    case BellOutcome::PsiPlus: return {0.0, s, s, 0.0};
    case BellOutcome::PsiMinus: return {0.0, s, -s, 0.0};
    }
    return {};
}

namespace detail {

inline void check_pair(const StateVector& state, std::size_t first, std::size_t second) {
    state.check_qubit(first);
    state.check_qubit(second);
    if (first == second) {
        throw StateError("Bell measurement needs two distinct qubits");
    }
}

/// Calls f(base, offsets) for each assignment of the qubits outside the pair,
/// where offsets[xy] is the index of pair value |xy> within that assignment.
template <class F>
void for_each_pair_block(const StateVector& state, std::size_t first, std::size_t second, F&& f) {
    const std::size_t m1 = state.mask(first);
    const std::size_t m2 = state.mask(second);
    for (std::size_t base = 0; base < state.dimension(); ++base) {
        if (base & (m1 | m2)) {
            continue;
        }
        const std::array<std::size_t, 4> idx{base, base | m2, base | m1, base | m1 | m2};
        f(idx);
    }
}

} // namespace detail

inline std::array<double, 4> bell_probabilities(const StateVector& state, std::size_t first,
                                                std::size_t second) {
    detail::check_pair(state, first, second);
    std::array<double, 4> p{};
    const auto amp = state.amplitudes();
    for (std::size_t k = 0; k < 4; ++k) {
        const auto ket = bell_amplitudes(kBellOutcomes[k]);
        detail::for_each_pair_block(state, first, second, [&](const std::array<std::size_t, 4>& idx) {
            Complex c{0.0, 0.0};
            for (std::size_t xy = 0; xy < 4; ++xy) {
                c += std::conj(ket[xy]) * amp[idx[xy]];
            }
            p[k] += std::norm(c);
        });
    }
    return p;
}

/// Projects (first, second) onto the given Bell ket; `first` carries the
/// left bit of |xy>.
inline Measured<BellOutcome> project_bell(const StateVector& state, std::size_t first,
                                          std::size_t second, BellOutcome outcome) {
    detail::check_pair(state, first, second);
    const auto ket = bell_amplitudes(outcome);
    StateVector out = state;
    auto& amp = out.raw();
    double p = 0.0;
    detail::for_each_pair_block(state, first, second, [&](const std::array<std::size_t, 4>& idx) {
        Complex c{0.0, 0.0};
        for (std::size_t xy = 0; xy < 4; ++xy) {
            c += std::conj(ket[xy]) * amp[idx[xy]];
        }
        p += std::norm(c);
        for (std::size_t xy = 0; xy < 4; ++xy) {
            amp[idx[xy]] = ket[xy] * c;
        }
    });
    if (p <= 0.0) {
        throw StateError("projection onto a zero-probability Bell branch");
    }
    detail::renormalize(amp, p);
    return {outcome, std::move(out), p};
}

inline Measured<BellOutcome> measure_bell(const StateVector& state, std::size_t first,
                                          std::size_t second, Rng& rng) {
    const auto p = bell_probabilities(state, first, second);
    const auto k = detail::sample_index(p, rng);
    return project_bell(state, first, second, kBellOutcomes[k]);
}

/// Reduced pure state of qubit q, if q is unentangled with the rest.
inline std::optional<StateVector> extract_qubit(const StateVector& state, std::size_t q,
                                                double tol = 1e-10) {
    const std::size_t m = state.mask(q);
    const auto amp = state.amplitudes();
    // Reference block: the assignment of the other qubits with largest weight.
    std::size_t best = 0;
    double best_weight = -1.0;
    for (std::size_t base = 0; base < state.dimension(); ++base) {
        if (base & m) {
            continue;
        }
        const double w = std::norm(amp[base]) + std::norm(amp[base | m]);
        if (w > best_weight) {
            best_weight = w;
            best = base;
        }
    }
    auto candidate = StateVector::from_amplitudes({amp[best], amp[best | m]});
    // Product test: every block must be parallel to the candidate.
    const auto c = candidate.amplitudes();
    for (std::size_t base = 0; base < state.dimension(); ++base) {
        if (base & m) {
            continue;
        }
        const Complex overlap = std::conj(c[0]) * amp[base] + std::conj(c[1]) * amp[base | m];
        const double residual = std::norm(amp[base] - overlap * c[0]) + std::norm(amp[base | m] - overlap * c[1]);
        if (std::sqrt(residual) > tol) {
            return std::nullopt;
        }
    }
    return candidate;
}

} // namespace wuhan
