// Simulated channels between the parties.
//
// The classical bus is public and authenticated: every party (Eve included)
// reads it, only Alice, Bob and Charlie may write. Quantum "sending" moves a
// custody label; the amplitudes stay in one shared register because the
// entanglement spans parties. An optional intercept hook sees each qubit
// while it is in transit.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wuhan/statevec.hpp"

namespace wuhan {

enum class PartyId { Alice, Bob, Charlie, Eve };

constexpr std::string_view to_string(PartyId p) noexcept {
    switch (p) {
    case PartyId::Alice: return "Alice";
    case PartyId::Bob: return "Bob";
    case PartyId::Charlie: return "Charlie";
    case PartyId::Eve: return "Eve";
    }
    return "?";
}

class CustodyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class AuthenticationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Classical bus

enum class RecordTag { ModeSwitch, Locations, Outcomes, BellResult, Abort };

constexpr std::string_view to_string(RecordTag t) noexcept {
    switch (t) {
    case RecordTag::ModeSwitch: return "mode-switch";
    case RecordTag::Locations: return "locations";
    case RecordTag::Outcomes: return "outcomes";
    case RecordTag::BellResult: return "bell-result";
    case RecordTag::Abort: return "abort";
    }
    return "?";
}

/// Payload values of ModeSwitch records.
enum class Mode : std::int64_t { Distilling = 0, Detecting = 1 };

struct ClassicalRecord {
    std::uint64_t seq;
    PartyId sender;
    RecordTag tag;
    std::vector<std::int64_t> payload;

    friend bool operator==(const ClassicalRecord&, const ClassicalRecord&) = default;
};

class ClassicalBus {
public:
    /// Appends a record; the bus assigns the sequence number.
    const ClassicalRecord& publish(PartyId sender, RecordTag tag, std::vector<std::int64_t> payload) {
        if (sender == PartyId::Eve) {
            throw AuthenticationError("Eve cannot publish on the authenticated classical channel");
        }
        records_.push_back({next_seq_++, sender, tag, std::move(payload)});
        return records_.back();
    }

    std::span<const ClassicalRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

    std::size_t count(RecordTag tag) const {
        return static_cast<std::size_t>(
            std::count_if(records_.begin(), records_.end(), [tag](const auto& r) { return r.tag == tag; }));
    }

private:
    std::vector<ClassicalRecord> records_;
    std::uint64_t next_seq_ = 0;
};

inline nlohmann::ordered_json to_json(const ClassicalRecord& r) {
    nlohmann::ordered_json j;
    j["seq"] = r.seq;
    j["sender"] = to_string(r.sender);
    j["tag"] = to_string(r.tag);
    j["payload"] = r.payload;
    return j;
}

inline nlohmann::ordered_json transcript_json(std::span<const ClassicalRecord> records) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        arr.push_back(to_json(r));
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Registers with custody

/// One simulated register: its state, the role of each qubit and who
/// currently holds it.
class Register {
public:
    Register(StateVector state, std::vector<Role> roles, PartyId holder)
        : state_(std::move(state)), roles_(std::move(roles)), holders_(roles_.size(), holder) {
        if (roles_.size() != state_.num_qubits()) {
            throw StateError("one role per qubit required");
        }
        for (std::size_t i = 0; i < roles_.size(); ++i) {
            if (std::count(roles_.begin(), roles_.end(), roles_[i]) != 1) {
                throw StateError("duplicate role '" + std::string(to_string(roles_[i])) + "' in register");
            }
        }
    }

    const StateVector& state() const noexcept { return state_; }
    std::span<const Role> roles() const noexcept { return roles_; }
    std::span<const PartyId> holders() const noexcept { return holders_; }

    bool has(Role r) const { return std::find(roles_.begin(), roles_.end(), r) != roles_.end(); }

    QubitIndex qubit(Role r) const {
        const auto it = std::find(roles_.begin(), roles_.end(), r);
        if (it == roles_.end()) {
            throw StateError("register has no qubit with role '" + std::string(to_string(r)) + "'");
        }
        return {static_cast<std::size_t>(it - roles_.begin()), r};
    }

    PartyId holder(Role r) const { return holders_[qubit(r).index]; }
    PartyId holder(QubitIndex q) const { return holders_.at(check(q).index); }

    /// Places a fresh subsystem before the existing qubits (|new, old>).
    void adjoin_front(const StateVector& part, Role r, PartyId holder) {
        require_new_role(r, part);
        state_ = tensor(part, state_);
        roles_.insert(roles_.begin(), r);
        holders_.insert(holders_.begin(), holder);
    }

    /// Places a fresh subsystem after the existing qubits (|old, new>).
    QubitIndex adjoin_back(const StateVector& part, Role r, PartyId holder) {
        require_new_role(r, part);
        state_ = tensor(state_, part);
        roles_.push_back(r);
        holders_.push_back(holder);
        return {roles_.size() - 1, r};
    }

    // Local operations. Each asserts that `actor` holds every qubit it touches.

    int measure_bz(Role r, PartyId actor, Rng& rng) {
        const auto q = owned(r, actor);
        auto m = wuhan::measure_bz(state_, q.index, rng);
        state_ = std::move(m.state);
        return m.outcome;
    }

    Sign measure_bx(Role r, PartyId actor, Rng& rng) {
        const auto q = owned(r, actor);
        auto m = wuhan::measure_bx(state_, q.index, rng);
        state_ = std::move(m.state);
        return m.outcome;
    }

    BellOutcome measure_bell(Role first, Role second, PartyId actor, Rng& rng) {
        const auto q1 = owned(first, actor);
        const auto q2 = owned(second, actor);
        auto m = wuhan::measure_bell(state_, q1.index, q2.index, rng);
        state_ = std::move(m.state);
        return m.outcome;
    }

    /// Forces a Bell outcome; returns its Born probability.
    double project_bell(Role first, Role second, BellOutcome outcome, PartyId actor) {
        const auto q1 = owned(first, actor);
        const auto q2 = owned(second, actor);
        auto m = wuhan::project_bell(state_, q1.index, q2.index, outcome);
        state_ = std::move(m.state);
        return m.probability;
    }

    void apply(GateKind kind, Role r, PartyId actor) {
        const auto q = owned(r, actor);
        apply_gate_in_place(state_, Gate{kind, q.index, std::nullopt});
    }

    void cnot(Role control, Role target, PartyId actor) {
        const auto c = owned(control, actor);
        const auto t = owned(target, actor);
        apply_gate_in_place(state_, Gate::cnot(c.index, t.index));
    }

    /// Custody transfer; bookkeeping only.
    void transfer(QubitIndex q, PartyId from, PartyId to) {
        check(q);
        if (holders_[q.index] != from) {
            throw CustodyError(std::string(to_string(from)) + " does not hold qubit '" +
                               std::string(to_string(q.role)) + "'");
        }
        holders_[q.index] = to;
    }

private:
    QubitIndex check(QubitIndex q) const {
        if (q.index >= roles_.size() || roles_[q.index] != q.role) {
            throw StateError("stale or invalid qubit index");
        }
        return q;
    }

    QubitIndex owned(Role r, PartyId actor) const {
        const auto q = qubit(r);
        if (holders_[q.index] != actor) {
            throw CustodyError(std::string(to_string(actor)) + " acted on qubit '" + std::string(to_string(r)) +
                               "' held by " + std::string(to_string(holders_[q.index])));
        }
        return q;
    }

    void require_new_role(Role r, const StateVector& part) const {
        if (part.num_qubits() != 1) {
            throw StateError("adjoin takes a single qubit");
        }
        if (has(r)) {
            throw StateError("register already has role '" + std::string(to_string(r)) + "'");
        }
    }

    StateVector state_;
    std::vector<Role> roles_;
    std::vector<PartyId> holders_;
};

// ---------------------------------------------------------------------------
// Quantum channel

/// What an adversary may do to a qubit while it is in transit: act on that
/// qubit and on ancillas Eve holds, nothing else.
class TransitAccess {
public:
    TransitAccess(Register& reg, QubitIndex in_transit, PartyId from, PartyId to, Rng& rng)
        : reg_(reg), role_(in_transit.role), from_(from), to_(to), rng_(rng) {}

    Role role() const noexcept { return role_; }
    PartyId source() const noexcept { return from_; }
    PartyId destination() const noexcept { return to_; }

    int measure_bz() { return with_eve(role_, [&] { return reg_.measure_bz(role_, PartyId::Eve, rng_); }); }
    Sign measure_bx() { return with_eve(role_, [&] { return reg_.measure_bx(role_, PartyId::Eve, rng_); }); }

    void apply(GateKind kind) {
        with_eve(role_, [&] {
            reg_.apply(kind, role_, PartyId::Eve);
            return 0;
        });
    }

    /// Adds a |0> ancilla held by Eve.
    Role adjoin_ancilla() {
        reg_.adjoin_back(StateVector(1), Role::Ancilla, PartyId::Eve);
        return Role::Ancilla;
    }

    /// CNOT with the in-transit qubit as control and an Eve ancilla as target.
    void cnot_to(Role ancilla) {
        if (reg_.holder(ancilla) != PartyId::Eve) {
            throw CustodyError("intercept hook may only target Eve's own ancillas");
        }
        with_eve(role_, [&] {
            reg_.cnot(role_, ancilla, PartyId::Eve);
            return 0;
        });
    }

private:
    // Eve has physical possession only while the qubit is in flight.
    template <class F>
    std::invoke_result_t<F&> with_eve(Role r, F&& f) {
        const auto q = reg_.qubit(r);
        reg_.transfer(q, from_, PartyId::Eve);
        struct Restore {
            Register& reg;
            QubitIndex q;
            PartyId back;
            ~Restore() { reg.transfer(reg.qubit(q.role), PartyId::Eve, back); }
        } restore{reg_, q, from_};
        return f();
    }

    Register& reg_;
    Role role_;
    PartyId from_;
    PartyId to_;
    Rng& rng_;
};

using InterceptHook = std::function<void(TransitAccess&)>;

class QuantumChannel {
public:
    QuantumChannel() = default;
    explicit QuantumChannel(InterceptHook hook) : hook_(std::move(hook)) {}

    void install(InterceptHook hook) { hook_ = std::move(hook); }
    bool has_hook() const noexcept { return static_cast<bool>(hook_); }

    /// Moves custody of q from `from` to `to`, running the hook in transit.
    void send_qubit(Register& reg, QubitIndex q, PartyId from, PartyId to, Rng& rng) const {
        if (reg.holder(q) != from) {
            throw CustodyError(std::string(to_string(from)) + " cannot send qubit '" +
                               std::string(to_string(q.role)) + "' it does not hold");
        }
        if (from == PartyId::Eve || to == PartyId::Eve) {
            throw CustodyError("Eve is not a legitimate endpoint");
        }
        if (hook_) {
            TransitAccess access(reg, q, from, to, rng);
            hook_(access);
        }
        reg.transfer(reg.qubit(q.role), from, to);
    }

private:
    InterceptHook hook_;
};

} // namespace wuhan
