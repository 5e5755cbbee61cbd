// Engine invariant suite, run by `wuhan self-test` and the acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wuhan/states.hpp"

namespace wuhan {

struct InvariantCheck {
    std::string name;
    bool passed;
    /// Largest deviation seen (0 for exact checks).
    double worst;
};

inline StateVector random_state(std::size_t num_qubits, Rng& rng) {
    std::vector<Complex> amp(std::size_t{1} << num_qubits);
    for (auto& a : amp) {
        a = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    }
    return StateVector::from_amplitudes(std::move(amp));
}

namespace detail {

inline double norm_error(const StateVector& s) { return std::abs(s.norm_squared() - 1.0); }

inline double max_diff(const StateVector& x, const StateVector& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.dimension(); ++i) {
        worst = std::max(worst, std::abs(x.amplitudes()[i] - y.amplitudes()[i]));
    }
    return worst;
}

} // namespace detail

inline std::vector<InvariantCheck> run_invariant_suite(std::uint64_t seed = 2024, std::size_t samples = 200) {
    constexpr double tol = kExactTolerance;
    Rng rng(seed);
    std::vector<InvariantCheck> out;

    {
        double worst = 0.0;
        for (std::size_t n = 1; n <= kMaxQubits; ++n) {
            worst = std::max(worst, detail::norm_error(new_register(n)));
        }
        for (const auto& s : {w_state(), xi_state(), plus_state(), minus_state()}) {
            worst = std::max(worst, detail::norm_error(s));
        }
        for (auto b : kBellOutcomes) {
            worst = std::max(worst, detail::norm_error(bell_state(b)));
        }
        for (std::size_t k = 0; k < samples; ++k) {
            const std::size_t n = 2 + k % 5;
            auto s = random_state(n, rng);
            worst = std::max(worst, detail::norm_error(tensor(s, plus_state())));
            const std::size_t q = rng.next_u64() % n;
            const std::size_t r = (q + 1) % n;
            for (const auto& g : {Gate::x(q), Gate::z(q), Gate::h(q), Gate::cnot(q, r)}) {
                s = apply_gate(s, g);
                worst = std::max(worst, detail::norm_error(s));
            }
            worst = std::max(worst, detail::norm_error(measure_bz(s, q, rng).state));
            worst = std::max(worst, detail::norm_error(measure_bx(s, q, rng).state));
            worst = std::max(worst, detail::norm_error(measure_bell(s, q, r, rng).state));
        }
        out.push_back({"normalization", worst <= tol, worst});
    }

    {
        double worst = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const std::size_t n = 2 + k % 5;
            const auto s = random_state(n, rng);
            const std::size_t q = rng.next_u64() % n;
            const std::size_t r = (q + 1 + rng.next_u64() % (n - 1)) % n;
            const auto z = bz_probabilities(s, q);
            const auto x = bx_probabilities(s, q);
            const auto b = bell_probabilities(s, q, r);
            worst = std::max(worst, std::abs(z[0] + z[1] - 1.0));
            worst = std::max(worst, std::abs(x[0] + x[1] - 1.0));
            worst = std::max(worst, std::abs(b[0] + b[1] + b[2] + b[3] - 1.0));
        }
        out.push_back({"born-rule sums", worst <= tol, worst});
    }

    {
        double worst = 0.0;
        bool same_outcomes = true;
        for (std::size_t k = 0; k < samples; ++k) {
            const std::size_t n = 2 + k % 5;
            const auto s = random_state(n, rng);
            const std::size_t q = rng.next_u64() % n;
            const std::size_t r = (q + 1) % n;
            const auto z1 = measure_bz(s, q, rng);
            const auto z2 = measure_bz(z1.state, q, rng);
            const auto x1 = measure_bx(s, q, rng);
            const auto x2 = measure_bx(x1.state, q, rng);
            const auto b1 = measure_bell(s, q, r, rng);
            const auto b2 = measure_bell(b1.state, q, r, rng);
            same_outcomes = same_outcomes && z1.outcome == z2.outcome && x1.outcome == x2.outcome &&
                            b1.outcome == b2.outcome;
            worst = std::max({worst, detail::max_diff(z1.state, z2.state), detail::max_diff(x1.state, x2.state),
                              detail::max_diff(b1.state, b2.state)});
        }
        out.push_back({"projection idempotence", same_outcomes && worst <= tol, worst});
    }

    {
        // Sum over outcomes of |B><B|, entry by entry, against the identity.
        double worst = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                Complex sum{0.0, 0.0};
                for (auto b : kBellOutcomes) {
                    const auto ket = bell_amplitudes(b);
                    sum += ket[i] * std::conj(ket[j]);
                }
                worst = std::max(worst, std::abs(sum - Complex(i == j ? 1.0 : 0.0, 0.0)));
            }
        }
        out.push_back({"bell completeness", worst <= tol, worst});
    }

    {
        // CNOT(first -> second) then H(first) maps phi+, phi-, psi+, psi- to
        // |00>, |10>, |01>, |11>; the B_z statistics must match the projectors.
        double worst = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const std::size_t n = 2 + k % 5;
            const auto s = random_state(n, rng);
            const std::size_t q = rng.next_u64() % n;
            const std::size_t r = (q + 1 + rng.next_u64() % (n - 1)) % n;
            const auto direct = bell_probabilities(s, q, r);
            const auto rotated = apply_gate(apply_gate(s, Gate::cnot(q, r)), Gate::h(q));
            std::array<double, 4> via{};
            const std::size_t mq = rotated.mask(q);
            const std::size_t mr = rotated.mask(r);
            for (std::size_t i = 0; i < rotated.dimension(); ++i) {
                const int hi = (i & mq) ? 1 : 0;
                const int lo = (i & mr) ? 1 : 0;
                // |hi lo>: 00 phi+, 10 phi-, 01 psi+, 11 psi-
                const std::size_t slot = static_cast<std::size_t>(lo * 2 + hi);
                via[slot] += std::norm(rotated.amplitudes()[i]);
            }
            for (std::size_t b = 0; b < 4; ++b) {
                worst = std::max(worst, std::abs(direct[b] - via[b]));
            }
        }
        out.push_back({"bell decomposition agreement", worst <= tol, worst});
    }

    {
        auto draw = [](std::uint64_t s) {
            Rng r(s);
            std::vector<int> outcomes;
            auto w = w_state();
            for (int k = 0; k < 64; ++k) {
                outcomes.push_back(measure_bz(w, static_cast<std::size_t>(k % 3), r).outcome);
            }
            return outcomes;
        };
        const bool same = draw(seed) == draw(seed);
        out.push_back({"seed determinism", same, same ? 0.0 : 1.0});
    }
    return out;
}

} // namespace wuhan
