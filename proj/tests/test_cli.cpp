#include "fixtures.hpp"

#include "helion/cli.hpp"
#include "helion/text.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace helion;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "helion");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

struct Workdir {
    fs::path dir;
    explicit Workdir(const std::string& name) : dir(fs::temp_directory_path() / ("helion_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workdir() { fs::remove_all(dir); }
    std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

const std::string kRoutines = fixtures::kDataDir + "/routines.json";
const std::string kVocab = fixtures::kDataDir + "/vocabulary.tsv";
const std::string kPolicies = fixtures::kDataDir + "/policies.json";

}  // namespace

TEST_CASE("usage errors exit 2") {
    Workdir w("usage");
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"schedule", "--out", w / "c.tsv"}).code == kExitUsage);
    CHECK(run({"schedule", "--routines", w / "missing.json", "--out", w / "c.tsv"}).code == kExitUsage);
    CHECK(run({"schedule", "--routines", kRoutines, "--days", "0", "--out", w / "c.tsv"}).code == kExitUsage);
    CHECK(run({"generate", "--model", kVocab, "--flavor", "sideways"}).code == kExitUsage);
    CHECK_FALSE(fs::exists(w / "c.tsv"));
}

TEST_CASE("schedule, stats and train") {
    Workdir w("pipeline");
    auto r = run({"schedule", "--routines", kRoutines, "--vocab", kVocab, "--days", "30", "--seed", "7", "--out", w / "corpus.tsv"});
    REQUIRE(r.code == kExitOk);
    CHECK(line_count(read_file(w / "corpus.tsv")) == 40);

    auto stats = run({"stats", "--corpus", w / "corpus.tsv"});
    REQUIRE(stats.code == kExitOk);
    CHECK(stats.out.find("sequences\t40\n") != std::string::npos);
    auto events_at = stats.out.find("events\t");
    REQUIRE(events_at != std::string::npos);
    auto events = stats.out.substr(events_at + 7, stats.out.find('\n', events_at) - events_at - 7);
    CHECK(events.size() == 5);

    auto js = run({"stats", "--corpus", w / "corpus.tsv", "--json"});
    auto doc = nlohmann::json::parse(js.out);
    CHECK(doc["sequences"] == 40);
    CHECK(std::to_string(doc["events"].get<std::size_t>()) == events);

    CHECK(run({"train", "--corpus", w / "corpus.tsv", "--order", "7", "--out", w / "m.bin"}).code == kExitUsage);
    CHECK(run({"train", "--corpus", w / "corpus.tsv", "--order", "3", "--out", w / "m.bin"}).code == kExitOk);
    CHECK(fs::exists(w / "m.bin"));
}

TEST_CASE("same seed gives byte-identical corpora") {
    Workdir w("determinism");
    for (const char* name : {"a.tsv", "b.tsv"}) {
        REQUIRE(run({"--seed", "13", "schedule", "--routines", kRoutines, "--out", w / name}).code == kExitOk);
    }
    REQUIRE(run({"--seed", "14", "schedule", "--routines", kRoutines, "--out", w / "c.tsv"}).code == kExitOk);
    CHECK(read_file(w / "a.tsv") == read_file(w / "b.tsv"));
    CHECK(read_file(w / "a.tsv") != read_file(w / "c.tsv"));
}

TEST_CASE("generate and execute") {
    Workdir w("generate");
    REQUIRE(run({"schedule", "--routines", kRoutines, "--out", w / "corpus.tsv"}).code == kExitOk);
    REQUIRE(run({"train", "--corpus", w / "corpus.tsv", "--out", w / "m.bin"}).code == kExitOk);

    auto up = run({"generate", "--model", w / "m.bin", "--k", "5", "--history", "user,presence,away;door_lock,lock,locked", "--out-dir", w / "out"});
    REQUIRE(up.code == kExitOk);
    CHECK(line_count(read_file(w / "out/up.tsv")) == 5);
    auto down = run({"generate", "--model", w / "m.bin", "--flavor", "down", "--out-dir", w / "out"});
    REQUIRE(down.code == kExitOk);
    CHECK(line_count(read_file(w / "out/down.tsv")) == 10);

    CHECK(run({"generate", "--model", w / "m.bin", "--history", "Not,A,Token"}).code == kExitDomain);

    auto ex = run({"execute", "--model", w / "m.bin", "--scenario", w / "out/up.tsv", "--policies", kPolicies, "--vocab", kVocab});
    CHECK(ex.code == kExitOk);
    CHECK(ex.out.rfind("applied 5 events", 0) == 0);
    auto exj = run({"execute", "--model", w / "m.bin", "--scenario", w / "out/up.tsv", "--json"});
    REQUIRE(exj.code == kExitOk);
    auto doc = nlohmann::json::parse(exj.out);
    CHECK(doc["applied"].size() == 5);
    CHECK(doc.contains("snapshot"));

    write_file_atomic(w / "bad.tsv", "garage,door,open\t-1.0\n");
    auto bad = run({"execute", "--model", w / "m.bin", "--scenario", w / "bad.tsv", "--vocab", kVocab});
    CHECK(bad.code == kExitDomain);
    CHECK(bad.err.find("garage,door,open") != std::string::npos);
}

TEST_CASE("the installed binary follows the same exit codes") {
    Workdir w("binary");
    std::string cli = HELION_CLI_PATH;
    auto sh = [](const std::string& cmd) {
        int status = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(sh(cli + " schedule --out " + (w / "c.tsv")) == 2);
    CHECK(sh(cli + " schedule --routines " + kRoutines + " --out " + (w / "c.tsv")) == 0);
    CHECK(sh(cli + " stats --corpus " + (w / "c.tsv")) == 0);
    CHECK(sh(cli + " stats --corpus " + kRoutines) == 1);
}
