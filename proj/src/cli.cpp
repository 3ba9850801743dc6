#include "qkd/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qkd/analysis.hpp"
#include "qkd/protocol.hpp"
#include "qkd/reports.hpp"
#include "qkd/synthetic.hpp"

namespace qkd::cli {

namespace fs = std::filesystem;

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

namespace {

uint64_t fnv1a(const std::string& bytes, uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunSettings {
    int n = 0;
    int m = 0;
    double p = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    uint64_t seed = 1;
    int sessions = 1;
    ChannelMode mode = ChannelMode::per_qubit;
    std::string code_file;
    int code_attempts = 5000;
    int64_t pool_bits = -1; // default: sized for the session count
    int reconcile_const = 32;
};

template <typename T>
T parse_number(const std::map<std::string, std::string>& kv, const std::string& key, T fallback,
               bool required = false) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (required) throw std::invalid_argument("config: missing required key '" + key + "'");
        return fallback;
    }
    std::istringstream ss(it->second);
    T v{};
    if (!(ss >> v)) throw std::invalid_argument("config: bad value for '" + key + "'");
    return v;
}

RunSettings load_run_settings(const std::string& path) {
    const auto kv = parse_config_file(path);
    static const std::set<std::string> known = {
        "n",         "m",          "p",          "epsilon",         "delta",
        "seed",      "sessions",   "channel_mode", "code_file",     "code_attempts",
        "pool_bits", "reconcile_const"};
    for (const auto& [key, value] : kv)
        if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

    RunSettings s;
    s.n = parse_number<int>(kv, "n", 0, true);
    s.m = parse_number<int>(kv, "m", 0);
    s.p = parse_number<double>(kv, "p", 0.0);
    s.epsilon = parse_number<double>(kv, "epsilon", 0.0, true);
    s.delta = parse_number<double>(kv, "delta", 0.05);
    s.seed = parse_number<uint64_t>(kv, "seed", 1);
    s.sessions = parse_number<int>(kv, "sessions", 1);
    s.code_attempts = parse_number<int>(kv, "code_attempts", 5000);
    s.pool_bits = parse_number<int64_t>(kv, "pool_bits", -1);
    s.reconcile_const = parse_number<int>(kv, "reconcile_const", 32);
    if (auto it = kv.find("channel_mode"); it != kv.end()) {
        if (it->second == "per_qubit")
            s.mode = ChannelMode::per_qubit;
        else if (it->second == "joint_statevector")
            s.mode = ChannelMode::joint_statevector;
        else
            throw std::invalid_argument("config: channel_mode must be per_qubit or "
                                        "joint_statevector");
    }
    if (auto it = kv.find("code_file"); it != kv.end()) s.code_file = it->second;
    if (s.code_file.empty() && s.m < 1)
        throw std::invalid_argument("config: need either m >= 1 or a code_file");
    return s;
}

std::string attack_flag_name(const AttackStrategy& a) {
    if (a.kind == AttackKind::none) return "none";
    return a.policy == BasisPolicy::always_plus ? "intercept-plus" : "intercept-random";
}

AttackStrategy parse_attack(const std::string& name) {
    if (name == "none") return AttackStrategy::none();
    if (name == "intercept-random")
        return AttackStrategy::intercept(BasisPolicy::random_per_qubit);
    if (name == "intercept-plus") return AttackStrategy::intercept(BasisPolicy::always_plus);
    throw std::invalid_argument("unknown attack: " + name);
}

std::string manifest_id_for(const std::string& command, const std::string& config_bytes,
                            uint64_t seed, int sessions, const std::string& attack) {
    uint64_t h = fnv1a(command);
    h = fnv1a(config_bytes, h);
    h = fnv1a(std::to_string(seed), h);
    h = fnv1a(std::to_string(sessions), h);
    h = fnv1a(attack, h);
    return hex64(h);
}

int cmd_run(const std::string& config_path, uint64_t* seed_override, int* sessions_override,
            const std::string& attack_name, const std::string& out_dir) {
    RunSettings settings = load_run_settings(config_path);
    if (seed_override) settings.seed = *seed_override;
    if (sessions_override) settings.sessions = *sessions_override;
    const AttackStrategy attack = parse_attack(attack_name);

    ProtocolConfig cfg;
    cfg.n = settings.n;
    cfg.p = settings.p;
    cfg.epsilon = settings.epsilon;
    cfg.delta = settings.delta;
    cfg.seed = settings.seed;
    cfg.channel_mode = settings.mode;
    cfg.reconcile_const = settings.reconcile_const;
    if (!settings.code_file.empty()) {
        cfg.code = load_code_file(settings.code_file);
    } else {
        const int floor = int(std::floor(2.0 * settings.n * (settings.p + settings.epsilon) +
                                         1e-9));
        cfg.code = construct_code({settings.n, settings.m, floor},
                                  derive_seed(settings.seed, 0xc0def11e), settings.code_attempts);
    }
    cfg.validate();

    std::ifstream cfg_stream(config_path);
    std::stringstream cfg_bytes;
    cfg_bytes << cfg_stream.rdbuf();

    RunManifest manifest;
    manifest.command = "run";
    manifest.config_path = config_path;
    manifest.seed = settings.seed;
    manifest.sessions = settings.sessions;
    manifest.attack = attack_flag_name(attack);
    manifest.output_dir = out_dir;
    manifest.manifest_id = manifest_id_for("run", cfg_bytes.str(), settings.seed,
                                           settings.sessions, manifest.attack);
    manifest.timestamp = iso8601_utc_now();

    const int64_t per_session = reconcile_cost(cfg.n, cfg.p, cfg.reconcile_const);
    KeyPool pool(settings.pool_bits >= 0 ? settings.pool_bits
                                         : per_session * int64_t(settings.sessions));

    auto transcripts = run_session_batch(cfg, attack, pool, settings.sessions);

    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest_json(manifest);
    for (size_t i = 0; i < transcripts.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "transcript_%05zu.json", i);
        std::ofstream(fs::path(out_dir) / name)
            << transcript_to_json(transcripts[i], manifest.manifest_id);
    }

    Lz78Model model;
    const SecurityBoundReport report =
        aggregate_sessions(transcripts, cfg.code, model, cfg.delta, cfg.epsilon, cfg.p);
    std::ofstream(fs::path(out_dir) / "summary.json")
        << report_json(report, manifest.manifest_id);

    int aborted = 0;
    for (const auto& t : transcripts) aborted += t.aborted;
    std::printf("run: %d sessions, %d aborted, out %s\n", settings.sessions, aborted,
                out_dir.c_str());
    std::printf("  bad-event frequency %s vs bound %s%s\n",
                format_double17(report.empirical_bad_frequency).c_str(),
                format_double17(report.bound).c_str(), report.vacuous ? " (vacuous)" : "");
    std::printf("  note: %s\n", report.caveat.c_str());
    return kExitOk;
}

int cmd_verify(const std::string& suite, uint64_t seed, int instances, int m) {
    bool violation = false;

    const auto show = [](const char* name, int64_t instances, int64_t violations,
                         const std::string& stats) {
        std::printf("%-14s %8lld instances  %6lld violations  %s\n", name,
                    (long long)instances, (long long)violations, stats.c_str());
    };

    if (suite == "lemma-a1" || suite == "all") {
        const int count = instances > 0 ? instances : 1000;
        auto rep = run_perturbation_sweep(count, 2, 16, derive_seed(seed, 1));
        violation |= rep.violations > 0;
        show("lemma-a1", rep.instances, rep.violations,
             "max lhs/rhs " + format_double17(rep.max_ratio));
    }
    if (suite == "lemma-a2" || suite == "all") {
        const int count = instances > 0 ? instances : 50;
        auto rep = run_character_sum_sweep(count, 200, derive_seed(seed, 2));
        violation |= rep.violations > 0;
        show("lemma-a2", rep.codes, rep.violations,
             std::to_string(rep.triples) + " triples, exact equality, max n " +
                 std::to_string(rep.max_n));
    }
    if (suite == "listing-bound" || suite == "all") {
        const int count = instances > 0 ? instances : 200;
        auto rep = run_listing_sweep(count, derive_seed(seed, 3));
        violation |= rep.violations > 0;
        show("listing-bound", rep.instances, rep.violations,
             "max residues eq1 " + format_double17(rep.max_distinguishability_residue) + ", ql " +
                 format_double17(rep.max_projector_residue) + ", eq5 " +
                 format_double17(rep.max_coverage_residue) + ", tightness " +
                 format_double17(rep.max_ratio));
    }
    if (suite == "counting" || suite == "all") {
        Lz78Model model;
        int64_t checks = 0, bad = 0;
        for (int mm = 0; mm <= m; ++mm) {
            for (const auto& r : counting_check_all(model, mm)) {
                ++checks;
                if (!r.holds) ++bad;
            }
        }
        violation |= bad > 0;
        show("counting", checks, bad, "all thresholds, m <= " + std::to_string(m));
        std::printf("  %-4s %-10s %-12s %-12s %s\n", "m", "threshold", "count", "bound", "holds");
        for (const auto& r : counting_check_all(model, m)) {
            if (r.threshold % 4 != 0) continue; // keep the table short
            std::printf("  %-4d %-10d %-12lld %-12lld %s\n", r.m, r.threshold,
                        (long long)r.count, (long long)r.bound, r.holds ? "yes" : "NO");
        }
    }
    return violation ? kExitViolation : kExitOk;
}

int cmd_otp(int m, double delta, uint64_t seed) {
    Lz78Model model;
    const auto rep = otp_experiment(model, m, delta, seed);
    std::printf("%-6s %-8s %-6s %-11s %-10s %-10s %s\n", "m", "delta", "dl_k", "threshold",
                "|B_delta|", "bound", "holds");
    std::printf("%-6d %-8g %-6d %-11.2f %-10lld %-10g %s\n", rep.m, rep.delta, rep.dl_of_key,
                rep.threshold, (long long)rep.b_delta_size, rep.bound,
                rep.holds ? "yes" : "NO");
    std::printf("c_model %d (measured copy floor)\n", rep.c_model);
    std::printf("note: %s\n", rep.caveat.c_str());
    return rep.holds ? kExitOk : kExitViolation;
}

int cmd_keyrate(double p, double epsilon) {
    const auto r = key_rate(p, epsilon);
    std::printf("key rate 1 - h(2(p+eps)) - h(p+eps) = %s\n", format_double17(r.rate).c_str());
    if (!r.monotone_regime)
        std::printf("warning: outside the monotone regime (2(p+eps) > 1/2); the rate is not "
                    "meaningful here\n");
    return kExitOk;
}

int cmd_bound(int64_t n, double delta, double epsilon) {
    const double b = security_bound(n, delta, epsilon);
    std::printf("security bound 2^(-delta n) + 3 exp(-eps^2 n / 4) = %s\n",
                format_double17(b).c_str());
    if (b >= 1.0) std::printf("warning: bound >= 1, vacuous at these parameters\n");
    return kExitOk;
}

} // namespace

std::string manifest_json(const RunManifest& m) {
    std::string out = "{\n";
    const auto field = [&out](const std::string& k, const std::string& v, bool last = false) {
        out += "  \"" + k + "\": \"" + v + "\"" + (last ? "\n" : ",\n");
    };
    field("schema", "v1");
    field("command", m.command);
    field("config_path", m.config_path);
    out += "  \"seed\": " + std::to_string(m.seed) + ",\n";
    out += "  \"sessions\": " + std::to_string(m.sessions) + ",\n";
    field("attack", m.attack);
    field("output_dir", m.output_dir);
    field("manifest_id", m.manifest_id);
    field("timestamp", m.timestamp, true);
    return out + "}\n";
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"BB84 key-distribution simulator and verification workbench"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run protocol sessions and write transcripts");
    std::string config_path, out_dir, attack_name = "none";
    uint64_t seed_override = 0;
    int sessions_override = 0;
    bool have_seed = false, have_sessions = false;
    run->add_option("--config", config_path, "config file (key = value)")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--attack", attack_name, "none | intercept-random | intercept-plus")
        ->check(CLI::IsMember({"none", "intercept-random", "intercept-plus"}));
    run->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });
    run->add_option("--sessions", sessions_override, "override the config session count")
        ->each([&](const std::string&) { have_sessions = true; });

    // verify
    auto* verify = app.add_subcommand("verify", "run a verification sweep");
    std::string suite;
    uint64_t verify_seed = 1;
    int instances = 0;
    int counting_m = 12;
    verify->add_option("--suite", suite, "lemma-a1 | lemma-a2 | listing-bound | counting | all")
        ->required()
        ->check(CLI::IsMember({"lemma-a1", "lemma-a2", "listing-bound", "counting", "all"}));
    verify->add_option("--seed", verify_seed, "sweep seed");
    verify->add_option("--instances", instances, "instance count (suite default when omitted)");
    verify->add_option("--m", counting_m, "counting suite string length")->check(CLI::Range(0, 16));

    // otp
    auto* otp = app.add_subcommand("otp", "exhaustive one-time-pad counting experiment");
    int otp_m = 12;
    double otp_delta = 0.25;
    uint64_t otp_seed = 1;
    otp->add_option("--m", otp_m, "key length (exhaustive, <= 14)")->required();
    otp->add_option("--delta", otp_delta, "deficiency rate")->required();
    otp->add_option("--seed", otp_seed, "key seed");

    // keyrate
    auto* keyrate = app.add_subcommand("keyrate", "asymptotic key rate");
    double kr_p = 0.0, kr_eps = 0.0;
    keyrate->add_option("--p", kr_p, "error threshold")->required();
    keyrate->add_option("--epsilon", kr_eps, "security parameter")->required();

    // bound
    auto* bound = app.add_subcommand("bound", "closed-form security bound");
    int64_t bound_n = 0;
    double bound_delta = 0.0, bound_eps = 0.0;
    bound->add_option("--n", bound_n, "test/information bits per half")->required();
    bound->add_option("--delta", bound_delta, "deficiency rate")->required();
    bound->add_option("--epsilon", bound_eps, "security parameter")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, have_seed ? &seed_override : nullptr,
                           have_sessions ? &sessions_override : nullptr, attack_name, out_dir);
        if (verify->parsed()) return cmd_verify(suite, verify_seed, instances, counting_m);
        if (otp->parsed()) return cmd_otp(otp_m, otp_delta, otp_seed);
        if (keyrate->parsed()) return cmd_keyrate(kr_p, kr_eps);
        if (bound->parsed()) return cmd_bound(bound_n, bound_delta, bound_eps);
    } catch (const PoolExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitExhausted;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace qkd::cli
