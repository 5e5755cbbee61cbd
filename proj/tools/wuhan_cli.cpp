// wuhan: run protocol scenarios, list them, or run the engine invariant suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "wuhan/wuhan.hpp"

namespace {

constexpr int kValidationError = 2;

struct RunArgs {
    std::string scenario;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string message;
    std::size_t msg_len = 0;
    double check_fraction = 0.5;
    std::size_t triples = 0;
    std::size_t max_restarts = 0;
    unsigned jobs = 1;
    std::string format = "json";
    std::string out;
    std::string transcript;
};

int run(const RunArgs& args, bool message_given, bool msg_len_given) {
    auto s = wuhan::builtin_scenario(args.scenario);
    s.trials = args.trials;
    s.master_seed = args.seed;
    s.check_fraction = args.check_fraction;
    s.triples = args.triples;
    s.max_restarts = args.max_restarts;
    if (message_given) {
        s.message = wuhan::parse_bits(args.message);
    } else if (msg_len_given) {
        s.message.reset();
        s.msg_len = args.msg_len;
    }
    s.validate();
    const auto format = wuhan::parse_format(args.format);

    const auto report = wuhan::run_scenario(s, args.jobs);
    const auto text = wuhan::emit_report(report, format);
    if (args.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(args.out, std::ios::binary);
        if (!f) {
            std::cerr << "cannot open " << args.out << '\n';
            return 1;
        }
        f << text;
    }

    if (!args.transcript.empty()) {
        wuhan::ClassicalBus bus;
        const auto trial = wuhan::run_trial(s, 0, &bus);
        const wuhan::SessionTranscript t{{bus.records().begin(), bus.records().end()}, trial.verdict};
        std::ofstream f(args.transcript, std::ios::binary);
        if (!f) {
            std::cerr << "cannot open " << args.transcript << '\n';
            return 1;
        }
        f << wuhan::to_json(t).dump(2) << '\n';
    }
    return 0;
}

int list_scenarios() {
    for (const auto& b : wuhan::kBuiltinScenarios) {
        std::printf("%-10s %s\n", std::string(b.name).c_str(), std::string(b.description).c_str());
    }
    return 0;
}

int self_test() {
    bool ok = true;
    for (const auto& c : wuhan::run_invariant_suite()) {
        std::printf("%s  %-30s worst=%.3e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst);
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supervised entanglement sharing and QSDC simulator"};
    app.require_subcommand(1);

    RunArgs args;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and print its report");
    run_cmd->add_option("--scenario", args.scenario, "Scenario name (see list-scenarios)")->required();
    run_cmd->add_option("--trials", args.trials, "Number of trials")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", args.seed, "Master seed");
    auto* msg = run_cmd->add_option("--message", args.message, "Fixed message bits, e.g. 010110");
    auto* len = run_cmd->add_option("--msg-len", args.msg_len, "Random message of this many bits per trial");
    msg->excludes(len);
    run_cmd->add_option("--check-fraction", args.check_fraction, "Probability a triple is checked");
    run_cmd->add_option("--triples", args.triples, "Triples per session (0 = sized from the message)");
    run_cmd->add_option("--max-restarts", args.max_restarts, "Restarts allowed after an abort");
    run_cmd->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--format", args.format, "json or csv");
    run_cmd->add_option("--out", args.out, "Write the report here instead of stdout");
    run_cmd->add_option("--transcript", args.transcript, "Write trial 0's classical transcript (JSON) here");

    app.add_subcommand("list-scenarios", "List built-in scenarios");
    app.add_subcommand("self-test", "Run the engine invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidationError;
    }

    try {
        if (app.got_subcommand("list-scenarios")) {
            return list_scenarios();
        }
        if (app.got_subcommand("self-test")) {
            return self_test();
        }
        return run(args, msg->count() > 0, len->count() > 0);
    } catch (const wuhan::ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kValidationError;
    } catch (const wuhan::ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kValidationError;
    } catch (const wuhan::StateError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
