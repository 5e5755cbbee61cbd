// Scenario runner: composes protocol, QSDC and attacks into seeded batches of
// trials and aggregates their metrics into a report.
//
// Trial i draws every random choice from streams derived from
// (master_seed, i), so a report depends only on the scenario, never on the
// order or thread in which trials run.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wuhan/attacks.hpp"

namespace wuhan {

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Scenario {
    std::string name;
    InitialStateKind initial_state = InitialStateKind::W;
    std::optional<AttackKind> attack;
    /// Fixed message; when absent every trial draws `msg_len` random bits.
    std::optional<std::vector<int>> message;
    std::size_t msg_len = 0;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    double check_fraction = 0.5;
    /// Triples per session; 0 sizes sessions from the message length.
    std::size_t triples = 0;
    std::size_t max_restarts = 0;

    void validate() const {
        if (trials == 0) {
            throw ScenarioError("trials must be positive");
        }
        if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
            throw ScenarioError("check fraction must lie strictly between 0 and 1");
        }
        if (attack == AttackKind::OcaXi && initial_state != InitialStateKind::Xi) {
            throw ScenarioError("oca-xi requires the xi initial state");
        }
        if (attack == AttackKind::OcaW && initial_state != InitialStateKind::W) {
            throw ScenarioError("oca-w requires the W initial state");
        }
        if (triples > 0 && check_fraction * static_cast<double>(triples) < 1.0) {
            throw ScenarioError("check fraction * triples must be at least 1");
        }
    }

    std::size_t message_length() const { return message ? message->size() : msg_len; }

    /// Session length used when `triples` is 0.
    std::size_t session_length() const {
        if (triples > 0) {
            return triples;
        }
        const auto floor = static_cast<std::size_t>(std::ceil(1.0 / check_fraction));
        return std::max<std::size_t>(4 * message_length() + 32, floor);
    }
};

struct BuiltinScenario {
    std::string_view name;
    InitialStateKind state;
    std::optional<AttackKind> attack;
    std::string_view description;
};

inline constexpr std::array<BuiltinScenario, 7> kBuiltinScenarios{{
    {"honest-w", InitialStateKind::W, std::nullopt, "W triples, no adversary; QSDC over distilled pairs"},
    {"honest-xi", InitialStateKind::Xi, std::nullopt, "xi triples, no adversary; QSDC over distilled pairs"},
    {"eve-ir-bz", InitialStateKind::W, AttackKind::InterceptResendBz, "Eve measures Alice's travel qubit in B_z"},
    {"eve-ir-bx", InitialStateKind::W, AttackKind::InterceptResendBx, "Eve measures Alice's travel qubit in B_x"},
    {"eve-probe", InitialStateKind::W, AttackKind::EntangleProbe, "Eve CNOT-copies Alice's travel qubit"},
    {"oca-xi", InitialStateKind::Xi, AttackKind::OcaXi, "under-table decode on undistilled xi triples"},
    {"oca-w", InitialStateKind::W, AttackKind::OcaW, "under-table decode on undistilled W triples"},
}};

inline Scenario builtin_scenario(std::string_view name) {
    for (const auto& b : kBuiltinScenarios) {
        if (b.name == name) {
            Scenario s;
            s.name = std::string(b.name);
            s.initial_state = b.state;
            s.attack = b.attack;
            s.message = parse_bits("010110");
            return s;
        }
    }
    throw ScenarioError("unknown scenario '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Trials

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Verdict verdict = Verdict::Completed;
    std::size_t sessions = 0;
    std::size_t triples = 0;
    std::size_t checked = 0;
    std::size_t check_failures = 0;
    /// Unchecked triples handed to distillation, and how many were pooled.
    std::size_t candidates = 0;
    std::size_t pooled = 0;
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
    std::size_t eve_probes = 0;
    std::size_t eve_matches = 0;
    bool distilled = false;
    bool decoded = false;

    std::optional<double> detection_rate() const { return ratio(check_failures, checked, checked > 0); }
    std::optional<double> yield() const { return ratio(pooled, candidates, distilled && candidates > 0); }
    std::optional<double> ber() const { return ratio(bit_errors, bits, decoded && bits > 0); }
    std::optional<double> eve_correlation() const { return ratio(eve_matches, eve_probes, eve_probes > 0); }

private:
    static std::optional<double> ratio(std::size_t num, std::size_t den, bool defined) {
        if (!defined) {
            return std::nullopt;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

namespace detail {

enum Stream : std::uint64_t { kMessageStream = 1, kDecodeStream = 2, kEveStream = 3, kSessionStreamBase = 100 };

inline constexpr std::size_t kMaxSessionsPerTrial = 64;

inline QuantumChannel channel_for(const std::optional<AttackKind>& attack) {
    if (!attack) {
        return {};
    }
    switch (*attack) {
    case AttackKind::InterceptResendBz: return QuantumChannel(intercept_resend(Basis::Bz));
    case AttackKind::InterceptResendBx: return QuantumChannel(intercept_resend(Basis::Bx));
    case AttackKind::EntangleProbe: return QuantumChannel(entangle_probe());
    default: return {};
    }
}

inline std::vector<int> trial_message(const Scenario& s, Rng rng) {
    if (s.message) {
        return *s.message;
    }
    std::vector<int> bits(s.msg_len);
    for (auto& b : bits) {
        b = rng.bit();
    }
    return bits;
}

inline void run_supervised(const Scenario& s, const std::vector<int>& bits, const Rng& trial, TrialResult& r,
                           ClassicalBus& bus) {
    const QuantumChannel channel = channel_for(s.attack);
    Rng eve = trial.derive(kEveStream);
    EntanglementPool pool;
    std::size_t restarts = 0;
    for (;;) {
        if (r.sessions >= kMaxSessionsPerTrial) {
            throw PoolExhausted("trial " + std::to_string(r.index) + " could not distill enough pairs");
        }
        const SessionConfig config{s.session_length(), s.check_fraction, s.initial_state,
                                   trial.derive(kSessionStreamBase + r.sessions).seed()};
        auto session = run_session(config, channel, bus);
        ++r.sessions;
        r.triples += config.sequence_length;
        r.checked += session.checks.size();
        r.check_failures += session.check_failures();
        for (const auto& check : session.checks) {
            if (auto bit = eve_read_ancilla(session.distribution.triples[check.location], eve)) {
                ++r.eve_probes;
                r.eve_matches += *bit == check.outcomes[0] ? 1 : 0;
            }
        }
        if (session.verdict == Verdict::Aborted) {
            if (restarts++ < s.max_restarts) {
                continue;
            }
            r.verdict = Verdict::Aborted;
            return;
        }
        r.distilled = true;
        r.candidates += session.unchecked.size();
        r.pooled += session.pool.size();
        pool.append(std::move(session.pool));
        if (pool.available() >= bits.size()) {
            break;
        }
    }
    Rng decode = trial.derive(kDecodeStream);
    const auto run = run_qsdc(bits, pool, bus, decode);
    r.bits = run.sent.size();
    r.bit_errors = run.bit_errors();
    r.decoded = true;
}

inline void run_under_table(const Scenario& s, const std::vector<int>& bits, const Rng& trial, TrialResult& r,
                            ClassicalBus& bus) {
    Rng rng = trial.derive(kDecodeStream);
    const OcaOptions options{s.check_fraction, s.triples, s.max_restarts, kMaxSessionsPerTrial};
    const auto out = run_oca_session(*s.attack, bits, rng, options, &bus);
    r.verdict = out.verdict;
    r.sessions = out.sessions;
    r.triples = out.triples;
    r.checked = out.checked;
    r.check_failures = out.check_failures;
    if (out.verdict == Verdict::Completed) {
        r.bits = out.run.sent.size();
        r.bit_errors = out.run.bit_errors();
        r.decoded = true;
    }
}

} // namespace detail

/// Runs trial `index` of `s`. When `transcript` is given, every classical
/// record of the trial is published there.
inline TrialResult run_trial(const Scenario& s, std::size_t index, ClassicalBus* transcript = nullptr) {
    const Rng trial = Rng::for_trial(s.master_seed, index);
    TrialResult r;
    r.index = index;
    r.seed = trial.seed();
    ClassicalBus local;
    ClassicalBus& bus = transcript ? *transcript : local;
    const auto bits = detail::trial_message(s, trial.derive(detail::kMessageStream));
    if (s.attack == AttackKind::OcaXi || s.attack == AttackKind::OcaW) {
        detail::run_under_table(s, bits, trial, r, bus);
    } else {
        detail::run_supervised(s, bits, trial, r, bus);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Reports

struct RateAggregate {
    /// Mean of the per-trial values over trials where the metric is defined.
    std::optional<double> mean;
    std::size_t defined_trials = 0;
    std::size_t successes = 0;
    std::size_t total = 0;

    std::optional<double> pooled() const {
        return total > 0 ? std::optional<double>(static_cast<double>(successes) / static_cast<double>(total))
                         : std::nullopt;
    }
    /// 3-sigma binomial half-width of the pooled rate.
    std::optional<double> half_width() const {
        const auto p = pooled();
        return p ? std::optional<double>(3.0 * std::sqrt(*p * (1.0 - *p) / static_cast<double>(total)))
                 : std::nullopt;
    }
};

struct TrialReport {
    Scenario scenario;
    std::vector<TrialResult> trials;
    std::size_t completed = 0;
    std::size_t aborted = 0;
    RateAggregate detection_rate;
    RateAggregate yield;
    RateAggregate ber;
    RateAggregate eve_correlation;
};

namespace detail {

template <class Value, class Num, class Den>
RateAggregate aggregate(const std::vector<TrialResult>& trials, Value value, Num num, Den den) {
    RateAggregate a;
    double sum = 0.0;
    for (const auto& t : trials) {
        if (const auto v = (t.*value)()) {
            sum += *v;
            ++a.defined_trials;
            a.successes += t.*num;
            a.total += t.*den;
        }
    }
    if (a.defined_trials > 0) {
        a.mean = sum / static_cast<double>(a.defined_trials);
    }
    return a;
}

} // namespace detail

/// Aggregates per-trial results, which must be in index order.
inline TrialReport make_report(const Scenario& s, std::vector<TrialResult> trials) {
    TrialReport rep;
    rep.scenario = s;
    rep.trials = std::move(trials);
    for (const auto& t : rep.trials) {
        (t.verdict == Verdict::Completed ? rep.completed : rep.aborted) += 1;
    }
    rep.detection_rate = detail::aggregate(rep.trials, &TrialResult::detection_rate, &TrialResult::check_failures,
                                           &TrialResult::checked);
    rep.yield = detail::aggregate(rep.trials, &TrialResult::yield, &TrialResult::pooled, &TrialResult::candidates);
    rep.ber = detail::aggregate(rep.trials, &TrialResult::ber, &TrialResult::bit_errors, &TrialResult::bits);
    rep.eve_correlation = detail::aggregate(rep.trials, &TrialResult::eve_correlation, &TrialResult::eve_matches,
                                            &TrialResult::eve_probes);
    return rep;
}

/// Runs all trials on up to `jobs` threads.
inline TrialReport run_scenario(const Scenario& s, unsigned jobs = 1) {
    s.validate();
    std::vector<TrialResult> results(s.trials);
    if (jobs <= 1 || s.trials == 1) {
        for (std::size_t i = 0; i < s.trials; ++i) {
            results[i] = run_trial(s, i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < s.trials; i = next++) {
                        results[i] = run_trial(s, i);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    return make_report(s, std::move(results));
}

enum class ReportFormat { Json, Csv };

inline ReportFormat parse_format(std::string_view name) {
    if (name == "json") {
        return ReportFormat::Json;
    }
    if (name == "csv") {
        return ReportFormat::Csv;
    }
    throw ScenarioError("unknown report format '" + std::string(name) + "'");
}

namespace detail {

/// Six significant digits, as text.
inline std::string sig6_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Six significant digits, as a number that serializes to the same text.
inline double sig6(double v) { return std::stod(sig6_text(v)); }

inline nlohmann::ordered_json number_or_null(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(sig6(*v)) : nlohmann::ordered_json(nullptr);
}

inline std::string bits_text(const std::vector<int>& bits) {
    std::string s;
    for (int b : bits) {
        s.push_back(static_cast<char>('0' + b));
    }
    return s;
}

inline nlohmann::ordered_json scenario_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["initial_state"] = to_string(s.initial_state);
    j["attack"] = s.attack ? nlohmann::ordered_json(to_string(*s.attack)) : nlohmann::ordered_json(nullptr);
    j["message"] = s.message ? nlohmann::ordered_json(bits_text(*s.message)) : nlohmann::ordered_json(nullptr);
    j["msg_len"] = s.message_length();
    j["trials"] = s.trials;
    j["master_seed"] = s.master_seed;
    j["check_fraction"] = sig6(s.check_fraction);
    j["triples_per_session"] = s.session_length();
    j["max_restarts"] = s.max_restarts;
    return j;
}

inline nlohmann::ordered_json trial_json(const TrialResult& t) {
    nlohmann::ordered_json j;
    j["index"] = t.index;
    j["seed"] = t.seed;
    j["verdict"] = to_string(t.verdict);
    j["sessions"] = t.sessions;
    j["triples"] = t.triples;
    j["checked"] = t.checked;
    j["check_failures"] = t.check_failures;
    j["detection_rate"] = number_or_null(t.detection_rate());
    j["candidates"] = t.candidates;
    j["pooled"] = t.pooled;
    j["yield"] = number_or_null(t.yield());
    j["bits"] = t.bits;
    j["bit_errors"] = t.bit_errors;
    j["ber"] = number_or_null(t.ber());
    j["eve_probes"] = t.eve_probes;
    j["eve_matches"] = t.eve_matches;
    j["eve_correlation"] = number_or_null(t.eve_correlation());
    return j;
}

inline nlohmann::ordered_json rate_json(const RateAggregate& a) {
    nlohmann::ordered_json j;
    j["mean"] = number_or_null(a.mean);
    j["trials"] = a.defined_trials;
    j["successes"] = a.successes;
    j["total"] = a.total;
    j["pooled"] = number_or_null(a.pooled());
    j["half_width_3sigma"] = number_or_null(a.half_width());
    return j;
}

inline std::string csv_cell(const std::optional<double>& v) { return v ? sig6_text(*v) : std::string(); }

} // namespace detail

inline nlohmann::ordered_json report_json(const TrialReport& rep) {
    nlohmann::ordered_json j;
    j["scenario"] = detail::scenario_json(rep.scenario);
    auto trials = nlohmann::ordered_json::array();
    for (const auto& t : rep.trials) {
        trials.push_back(detail::trial_json(t));
    }
    j["trials"] = std::move(trials);
    nlohmann::ordered_json agg;
    agg["trials"] = rep.trials.size();
    agg["completed"] = rep.completed;
    agg["aborted"] = rep.aborted;
    agg["abort_rate"] = detail::sig6(static_cast<double>(rep.aborted) / static_cast<double>(rep.trials.size()));
    agg["detection_rate"] = detail::rate_json(rep.detection_rate);
    agg["yield"] = detail::rate_json(rep.yield);
    agg["ber"] = detail::rate_json(rep.ber);
    agg["eve_correlation"] = detail::rate_json(rep.eve_correlation);
    j["aggregates"] = std::move(agg);
    return j;
}

inline constexpr std::string_view kCsvHeader =
    "trial,seed,verdict,sessions,triples,checked,check_failures,detection_rate,candidates,pooled,yield,"
    "bits,bit_errors,ber,eve_probes,eve_matches,eve_correlation";

/// One row per trial, then a `mean` row holding the aggregate means.
inline std::string report_csv(const TrialReport& rep) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& t : rep.trials) {
        out << t.index << ',' << t.seed << ',' << to_string(t.verdict) << ',' << t.sessions << ',' << t.triples
            << ',' << t.checked << ',' << t.check_failures << ',' << detail::csv_cell(t.detection_rate()) << ','
            << t.candidates << ',' << t.pooled << ',' << detail::csv_cell(t.yield()) << ',' << t.bits << ','
            << t.bit_errors << ',' << detail::csv_cell(t.ber()) << ',' << t.eve_probes << ',' << t.eve_matches << ','
            << detail::csv_cell(t.eve_correlation()) << '\n';
    }
    out << "mean,,,,,,," << detail::csv_cell(rep.detection_rate.mean) << ",,," << detail::csv_cell(rep.yield.mean)
        << ",,," << detail::csv_cell(rep.ber.mean) << ",,," << detail::csv_cell(rep.eve_correlation.mean) << '\n';
    return out.str();
}

inline std::string emit_report(const TrialReport& rep, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        return report_csv(rep);
    }
    return report_json(rep).dump(2) + "\n";
}

} // namespace wuhan
