#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkd/cli.hpp"
#include "qkd/lincode.hpp"

using namespace qkd;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("qkd_cli_test_" + std::to_string(::getpid()) +
                                                "_" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream(path) << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string demo_config(int n, int m, int sessions, const std::string& extra = "") {
    std::ostringstream ss;
    ss << "# test configuration\n"
       << "n = " << n << "\n"
       << "m = " << m << "\n"
       << "p = 0.11\n"
       << "epsilon = 0.01\n"
       << "delta = 0.05\n"
       << "seed = 42\n"
       << "sessions = " << sessions << "\n"
       << extra;
    return ss.str();
}

int run(const std::vector<std::string>& args) { return cli::run_cli(args); }

} // namespace

TEST_CASE("run writes transcripts, a summary, and a manifest") {
    auto dir = temp_dir();
    write_file(dir / "cfg", demo_config(32, 4, 7));
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "out").string()}) ==
          cli::kExitOk);

    int transcripts = 0;
    bool summary = false, manifest = false;
    for (const auto& entry : fs::directory_iterator(dir / "out")) {
        const auto name = entry.path().filename().string();
        if (name.rfind("transcript_", 0) == 0) ++transcripts;
        if (name == "summary.json") summary = true;
        if (name == "manifest.json") manifest = true;
    }
    CHECK(transcripts == 7);
    CHECK(summary);
    CHECK(manifest);

    // every output references the manifest id
    const std::string m = read_file(dir / "out" / "manifest.json");
    const auto id_pos = m.find("manifest_id");
    REQUIRE(id_pos != std::string::npos);
    const auto start = m.find('"', m.find(':', id_pos)) + 1;
    const std::string id = m.substr(start, m.find('"', start) - start);
    CHECK(read_file(dir / "out" / "transcript_00000.json").find(id) != std::string::npos);
    CHECK(read_file(dir / "out" / "summary.json").find(id) != std::string::npos);
}

TEST_CASE("identical manifests produce byte-identical transcripts and reports") {
    auto dir = temp_dir();
    write_file(dir / "cfg", demo_config(32, 4, 5));
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "a").string(),
               "--attack", "intercept-random"}) == cli::kExitOk);
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "b").string(),
               "--attack", "intercept-random"}) == cli::kExitOk);

    const auto extract_id = [](const std::string& text) {
        const auto pos = text.find("\"manifest_id\"");
        const auto start = text.find('"', text.find(':', pos)) + 1;
        return text.substr(start, text.find('"', start) - start);
    };
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename().string();
        if (name == "manifest.json") {
            // ids agree; the timestamp and output path may differ
            CHECK(extract_id(read_file(entry.path())) ==
                  extract_id(read_file(dir / "b" / name)));
        } else {
            CHECK(read_file(entry.path()) == read_file(dir / "b" / name));
            ++compared;
        }
    }
    CHECK(compared == 6); // five transcripts and the summary
}

TEST_CASE("config with a mismatched code file exits 2 naming the invariant") {
    auto dir = temp_dir();
    LinearCode code = construct_code({16, 2, 0}, 9);
    save_code_file((dir / "code.txt").string(), code);
    write_file(dir / "cfg", demo_config(32, 4, 2, "code_file = " + (dir / "code.txt").string() +
                                                      "\n"));
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "out").string()}) ==
          cli::kExitUsage);
}

TEST_CASE("code file round trips through the run config") {
    auto dir = temp_dir();
    LinearCode code = construct_code({32, 4, 1}, 10);
    save_code_file((dir / "code.txt").string(), code);
    write_file(dir / "cfg", demo_config(32, 4, 2, "code_file = " + (dir / "code.txt").string() +
                                                      "\n"));
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "out").string()}) ==
          cli::kExitOk);
}

TEST_CASE("undersized pool exits 3") {
    auto dir = temp_dir();
    write_file(dir / "cfg", demo_config(32, 4, 10, "pool_bits = 50\n"));
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "out").string()}) ==
          cli::kExitExhausted);
}

TEST_CASE("unreadable config exits 2") {
    CHECK(run({"run", "--config", "/nonexistent/nope.cfg", "--out", "/tmp/unused_out"}) ==
          cli::kExitUsage);
}

TEST_CASE("malformed config lines exit 2") {
    auto dir = temp_dir();
    write_file(dir / "cfg", "n = 32\nthis line has no equals sign\n");
    CHECK(run({"run", "--config", (dir / "cfg").string(), "--out", (dir / "out").string()}) ==
          cli::kExitUsage);

    write_file(dir / "cfg2", demo_config(32, 4, 2, "unknown_key = 5\n"));
    CHECK(run({"run", "--config", (dir / "cfg2").string(), "--out", (dir / "out").string()}) ==
          cli::kExitUsage);
}

TEST_CASE("verify suites succeed at small instance counts") {
    CHECK(run({"verify", "--suite", "lemma-a1", "--instances", "50", "--seed", "5"}) ==
          cli::kExitOk);
    CHECK(run({"verify", "--suite", "lemma-a2", "--instances", "5", "--seed", "5"}) ==
          cli::kExitOk);
    CHECK(run({"verify", "--suite", "listing-bound", "--instances", "10", "--seed", "5"}) ==
          cli::kExitOk);
    CHECK(run({"verify", "--suite", "counting", "--m", "10"}) == cli::kExitOk);
}

TEST_CASE("unknown verify suite exits 2 with usage text") {
    CHECK(run({"verify", "--suite", "nonsense"}) == cli::kExitUsage);
    CHECK(run({"verify"}) == cli::kExitUsage);
    CHECK(run({"frobnicate"}) == cli::kExitUsage);
}

TEST_CASE("otp command") {
    CHECK(run({"otp", "--m", "10", "--delta", "0.25", "--seed", "7"}) == cli::kExitOk);
    // past the exhaustive budget
    CHECK(run({"otp", "--m", "20", "--delta", "0.25"}) == cli::kExitUsage);
    // collapsing threshold still exits 0 with an empty set
    CHECK(run({"otp", "--m", "10", "--delta", "3.0", "--seed", "7"}) == cli::kExitOk);
    // a maximally incompressible key where the compressor's counting bound
    // genuinely fails: the violation is reported through exit code 1
    CHECK(run({"otp", "--m", "12", "--delta", "0.25", "--seed", "131"}) ==
          cli::kExitViolation);
}

TEST_CASE("keyrate and bound commands") {
    CHECK(run({"keyrate", "--p", "0.01", "--epsilon", "0.01"}) == cli::kExitOk);
    // out-of-regime values are flagged but still exit 0
    CHECK(run({"keyrate", "--p", "0.3", "--epsilon", "0.1"}) == cli::kExitOk);
    // domain violation
    CHECK(run({"keyrate", "--p", "0.5", "--epsilon", "0.1"}) == cli::kExitUsage);

    CHECK(run({"bound", "--n", "10000", "--delta", "0.01", "--epsilon", "0.05"}) == cli::kExitOk);
    CHECK(run({"bound", "--n", "0", "--delta", "0.01", "--epsilon", "0.05"}) == cli::kExitUsage);
}

#ifdef QKDLAB_BIN
TEST_CASE("binary entry point forwards arguments and exit codes") {
    const std::string bin = QKDLAB_BIN;
    CHECK(WEXITSTATUS(std::system((bin + " keyrate --p 0.01 --epsilon 0.01 > /dev/null").c_str())) ==
          cli::kExitOk);
    CHECK(WEXITSTATUS(std::system((bin + " verify --suite nonsense 2> /dev/null").c_str())) ==
          cli::kExitUsage);
    CHECK(WEXITSTATUS(std::system((bin + " --help > /dev/null").c_str())) == cli::kExitOk);
}
#endif
