// Supervised entanglement sharing: Charlie prepares tripartite states, sends
// a to Alice and b to Bob, spot-checks a random subset in B_z, and on a clean
// check distills Alice-Bob pairs by measuring the c qubits.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wuhan/channels.hpp"
#include "wuhan/states.hpp"

namespace wuhan {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PoolExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SessionConfig {
    std::size_t sequence_length = 100;
    /// Probability that Charlie selects a given triple for checking.
    double check_fraction = 0.5;
    InitialStateKind initial_state = InitialStateKind::W;
    std::uint64_t seed = 0;

    void validate() const {
        if (sequence_length == 0) {
            throw ConfigError("sequence_length must be positive");
        }
        if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
            throw ConfigError("check_fraction must lie strictly between 0 and 1");
        }
        if (check_fraction * static_cast<double>(sequence_length) < 1.0) {
            throw ConfigError("check_fraction * sequence_length must be at least 1");
        }
    }
};

/// The triples of one session. Register i holds roles (a, b, c).
struct Distribution {
    InitialStateKind kind;
    std::vector<Register> triples;
    std::vector<bool> consumed;

    std::size_t size() const noexcept { return triples.size(); }
};

/// Prepares `sequence_length` triples and ships a and b.
inline Distribution prepare_and_distribute(const SessionConfig& config, const QuantumChannel& channel, Rng& rng) {
    config.validate();
    Distribution d{config.initial_state, {}, std::vector<bool>(config.sequence_length, false)};
    d.triples.reserve(config.sequence_length);
    const StateVector prepared = initial_state(config.initial_state);
    for (std::size_t i = 0; i < config.sequence_length; ++i) {
        Register reg(prepared, {Role::A, Role::B, Role::C}, PartyId::Charlie);
        channel.send_qubit(reg, reg.qubit(Role::A), PartyId::Charlie, PartyId::Alice, rng);
        channel.send_qubit(reg, reg.qubit(Role::B), PartyId::Charlie, PartyId::Bob, rng);
        d.triples.push_back(std::move(reg));
    }
    return d;
}

/// B_z outcomes of one checked triple, in (a, b, c) order.
using TripleOutcomes = std::array<int, 3>;

/// Independent Bernoulli selection; at least one position is always chosen.
inline std::vector<std::size_t> select_checks(std::size_t n, double check_fraction, Rng& rng) {
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(check_fraction)) {
            picked.push_back(i);
        }
    }
    if (picked.empty() && n > 0) {
        picked.push_back(static_cast<std::size_t>(rng.next_u64() % n));
    }
    return picked;
}

/// Detecting round for one triple: everyone measures in B_z and publishes.
inline TripleOutcomes detecting_round(Distribution& d, std::size_t location, ClassicalBus& bus, Rng& rng) {
    if (location >= d.size()) {
        throw std::out_of_range("triple location out of range");
    }
    if (d.consumed[location]) {
        throw std::logic_error("triple " + std::to_string(location) + " was already consumed");
    }
    d.consumed[location] = true;
    auto& reg = d.triples[location];
    const auto loc = static_cast<std::int64_t>(location);

    const int c = reg.measure_bz(Role::C, PartyId::Charlie, rng);
    bus.publish(PartyId::Charlie, RecordTag::Locations, {loc});
    const int a = reg.measure_bz(Role::A, PartyId::Alice, rng);
    bus.publish(PartyId::Alice, RecordTag::Outcomes, {loc, a});
    const int b = reg.measure_bz(Role::B, PartyId::Bob, rng);
    bus.publish(PartyId::Bob, RecordTag::Outcomes, {loc, b});
    bus.publish(PartyId::Charlie, RecordTag::Outcomes, {loc, c});
    return {a, b, c};
}

enum class CheckResult { Pass, Fail };

/// W: exactly one 1. Xi: even parity.
constexpr CheckResult check_triple(const TripleOutcomes& o, InitialStateKind kind) noexcept {
    const int ones = o[0] + o[1] + o[2];
    const bool ok = kind == InitialStateKind::W ? ones == 1 : ones % 2 == 0;
    return ok ? CheckResult::Pass : CheckResult::Fail;
}

enum class Decision { Continue, Abort };

/// Zero tolerance: a single failed check aborts.
inline Decision decide(std::span<const CheckResult> results) {
    if (results.empty()) {
        throw ConfigError("decision requires at least one checked triple");
    }
    for (auto r : results) {
        if (r == CheckResult::Fail) {
            return Decision::Abort;
        }
    }
    return Decision::Continue;
}

/// A distilled Alice-Bob pair; `reg` still carries Charlie's measured c.
struct PooledPair {
    std::size_t location;
    Register reg;
    bool consumed = false;
};

class EntanglementPool {
public:
    void add(PooledPair pair) { pairs_.push_back(std::move(pair)); }

    std::size_t size() const noexcept { return pairs_.size(); }
    std::size_t available() const noexcept { return pairs_.size() - next_; }

    std::span<PooledPair> pairs() noexcept { return pairs_; }
    std::span<const PooledPair> pairs() const noexcept { return pairs_; }

    /// Next unconsumed pair, in pool order.
    PooledPair& take() {
        if (next_ >= pairs_.size()) {
            throw PoolExhausted("entanglement pool exhausted");
        }
        return pairs_[next_++];
    }

    void append(EntanglementPool&& other) {
        for (std::size_t i = other.next_; i < other.pairs_.size(); ++i) {
            pairs_.push_back(std::move(other.pairs_[i]));
        }
        other.pairs_.clear();
        other.next_ = 0;
    }

private:
    std::vector<PooledPair> pairs_;
    std::size_t next_ = 0;
};

/// Distillation: Charlie measures every unconsumed c, publishes where the outcome
/// was 0, and those (a, b) pairs go to the pool.
inline EntanglementPool distill(Distribution& d, ClassicalBus& bus, Rng& rng) {
    EntanglementPool pool;
    std::vector<std::int64_t> locations;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.consumed[i]) {
            continue;
        }
        d.consumed[i] = true;
        if (d.triples[i].measure_bz(Role::C, PartyId::Charlie, rng) == 0) {
            locations.push_back(static_cast<std::int64_t>(i));
            kept.push_back(i);
        }
    }
    bus.publish(PartyId::Charlie, RecordTag::Locations, std::move(locations));
    for (auto i : kept) {
        pool.add({i, std::move(d.triples[i])});
    }
    return pool;
}

enum class Verdict { Completed, Aborted };

constexpr std::string_view to_string(Verdict v) noexcept { return v == Verdict::Completed ? "completed" : "aborted"; }

struct CheckRecord {
    std::size_t location;
    TripleOutcomes outcomes;
    CheckResult result;
};

/// Where a session stops: after distillation, or right after the check
/// decision (the under-table scenario, where Charlie never distills).
enum class SessionStage { Distilled, Checked };

struct SessionResult {
    Verdict verdict = Verdict::Completed;
    Distribution distribution;
    std::vector<CheckRecord> checks;
    /// Triples that were not checked, in location order.
    std::vector<std::size_t> unchecked;
    EntanglementPool pool;

    std::size_t check_failures() const {
        std::size_t n = 0;
        for (const auto& c : checks) {
            n += c.result == CheckResult::Fail ? 1 : 0;
        }
        return n;
    }
};

/// One full session from distribution to distillation (or abort), driven by config.seed.
inline SessionResult run_session(const SessionConfig& config, const QuantumChannel& channel, ClassicalBus& bus,
                                 SessionStage stage = SessionStage::Distilled) {
    config.validate();
    Rng rng(config.seed);
    SessionResult out{Verdict::Completed, prepare_and_distribute(config, channel, rng), {}, {}, {}};
    auto& d = out.distribution;

    bus.publish(PartyId::Charlie, RecordTag::ModeSwitch, {static_cast<std::int64_t>(Mode::Detecting)});
    const auto picked = select_checks(d.size(), config.check_fraction, rng);
    std::vector<CheckResult> results;
    results.reserve(picked.size());
    for (auto loc : picked) {
        const auto o = detecting_round(d, loc, bus, rng);
        results.push_back(check_triple(o, d.kind));
        out.checks.push_back({loc, o, results.back()});
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d.consumed[i]) {
            out.unchecked.push_back(i);
        }
    }

    if (decide(results) == Decision::Abort) {
        bus.publish(PartyId::Charlie, RecordTag::Abort, {static_cast<std::int64_t>(out.check_failures())});
        out.verdict = Verdict::Aborted;
        return out;
    }
    if (stage == SessionStage::Distilled) {
        bus.publish(PartyId::Charlie, RecordTag::ModeSwitch, {static_cast<std::int64_t>(Mode::Distilling)});
        out.pool = distill(d, bus, rng);
    }
    return out;
}

struct SessionTranscript {
    std::vector<ClassicalRecord> records;
    Verdict verdict;
};

inline nlohmann::ordered_json to_json(const SessionTranscript& t) {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(t.verdict);
    j["records"] = transcript_json(t.records);
    return j;
}

} // namespace wuhan
