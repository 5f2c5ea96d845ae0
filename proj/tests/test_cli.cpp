#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "appealgate/cli/commands.hpp"
#include "appealgate/cli/config.hpp"
#include "appealgate/common/errors.hpp"
#include "appealgate/experiment/event_log.hpp"

using namespace appealgate;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"appealgate"};
    for (const auto& arg : args) argv.push_back(arg.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / fs::path("appealgate_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("config: defaults valid, unknown keys rejected, bad values rejected") {
    CHECK_NOTHROW(cli::Config::defaults().form.validate());

    TempDir tmp;
    {
        std::ofstream out(tmp.file("ok.json"));
        out << R"({"assignment": {"ratio": 0.4, "seed": 5}, "pps": {"l2": 2.0}})";
    }
    const auto cfg = cli::Config::load(tmp.file("ok.json"));
    CHECK(cfg.assignment_ratio == 0.4);
    CHECK(cfg.pps_l2 == 2.0);
    CHECK(cfg.pps_min_df == 2); // untouched default

    {
        std::ofstream out(tmp.file("unknown.json"));
        out << R"({"assignment": {"ratio": 0.4}, "surprise": 1})";
    }
    CHECK_THROWS_AS(cli::Config::load(tmp.file("unknown.json")), ValidationError);

    {
        std::ofstream out(tmp.file("nested_unknown.json"));
        out << R"({"toxicity": {"thresh": 0.7}})";
    }
    CHECK_THROWS_AS(cli::Config::load(tmp.file("nested_unknown.json")), ValidationError);

    {
        std::ofstream out(tmp.file("bad_ratio.json"));
        out << R"({"assignment": {"ratio": 1.5}})";
    }
    CHECK_THROWS_AS(cli::Config::load(tmp.file("bad_ratio.json")), ValidationError);

    {
        std::ofstream out(tmp.file("bad_backend.json"));
        out << R"({"toxicity": {"backend": "psychic"}})";
    }
    CHECK_THROWS_AS(cli::Config::load(tmp.file("bad_backend.json")), ValidationError);
}

TEST_CASE("config: custom form definition parses and validates") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("form.json"));
        out << R"({"form": {"questions": [
            {"key": "q1", "prompt": "copy the reason", "type": "open_text"},
            {"key": "q2", "prompt": "what happened", "type": "open_text"},
            {"key": "q3", "prompt": "next time", "type": "open_text"},
            {"key": "q4", "prompt": "the rule", "type": "open_text"},
            {"key": "q5", "prompt": "pick allowed", "type": "multiple_choice",
             "options": ["a", "b", "c", "d", "e"], "answer_key": [0, 2]}
        ]}})";
    }
    const auto cfg = cli::Config::load(tmp.file("form.json"));
    CHECK(cfg.form.questions[4].answer_key == std::vector<int>{0, 2});

    {
        std::ofstream out(tmp.file("bad_form.json"));
        out << R"({"form": {"questions": [
            {"key": "q1", "prompt": "only one question", "type": "open_text"}
        ]}})";
    }
    CHECK_THROWS_AS(cli::Config::load(tmp.file("bad_form.json")), ValidationError);
}

TEST_CASE("exit codes: missing config 2, missing subcommand 2, bad log 1") {
    TempDir tmp;
    CHECK(run_cli({"simulate", "--config", tmp.file("ghost.json"), "--out", tmp.file("l.jsonl")}) == 2);
    CHECK(run_cli({}) == 2);
    {
        std::ofstream out(tmp.file("garbage.jsonl"));
        out << "not json\n";
    }
    CHECK(run_cli({"report", "--log", tmp.file("garbage.jsonl"), "--out", tmp.file("rep")}) == 1);
}

TEST_CASE("simulate -> report end to end through the CLI surface") {
    TempDir tmp;
    const auto log_path = tmp.file("run.jsonl");
    CHECK(run_cli({"simulate", "--out", log_path, "--n", "300", "--seed", "10"}) == 0);
    CHECK(fs::exists(log_path));

    // --seed changes the log deterministically
    const auto log_path2 = tmp.file("run2.jsonl");
    const auto log_path3 = tmp.file("run3.jsonl");
    CHECK(run_cli({"simulate", "--out", log_path2, "--n", "300", "--seed", "11"}) == 0);
    CHECK(run_cli({"simulate", "--out", log_path3, "--n", "300", "--seed", "10"}) == 0);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(log_path) == slurp(log_path3));
    CHECK(slurp(log_path) != slurp(log_path2));

    const auto report_dir = tmp.file("report");
    CHECK(run_cli({"report", "--log", log_path, "--out", report_dir}) == 0);
    CHECK(fs::exists(fs::path(report_dir) / "report.md"));
    CHECK(fs::exists(fs::path(report_dir) / "hypotheses.csv"));

    // sweep thresholds present in the markdown
    std::ifstream md(fs::path(report_dir) / "report.md");
    const std::string content(std::istreambuf_iterator<char>(md), {});
    CHECK(content.find("| 0.5 |") != std::string::npos);
    CHECK(content.find("| 0.9 |") != std::string::npos);
}

TEST_CASE("train-pps on a synthetic corpus") {
    TempDir tmp;
    const auto corpus = tmp.file("corpus.csv");
    {
        std::ofstream out(corpus);
        out << "text,label\n";
        for (int i = 0; i < 40; ++i) {
            out << "sunny warm pleasant walk," << 1 << "\n";
            out << "grim cold dreadful slog," << 0 << "\n";
        }
    }
    const auto model_path = tmp.file("model.json");
    CHECK(run_cli({"train-pps", "--corpus", corpus, "--out", model_path}) == 0);
    CHECK(fs::exists(model_path));

    // missing label column
    const auto bad = tmp.file("bad.csv");
    {
        std::ofstream out(bad);
        out << "text\n";
        out << "no label here\n";
    }
    CHECK(run_cli({"train-pps", "--corpus", bad, "--out", model_path}) == 2);

    // single-class corpus
    const auto degenerate = tmp.file("degenerate.csv");
    {
        std::ofstream out(degenerate);
        out << "text,label\n";
        for (int i = 0; i < 10; ++i) out << "all the same,1\n";
    }
    CHECK(run_cli({"train-pps", "--corpus", degenerate, "--out", model_path}) == 2);
}

TEST_CASE("score command classifies against the builtin lexicon") {
    CHECK(run_cli({"score", "--text", "a perfectly fine message"}) == 0);
    CHECK(run_cli({"score", "--text", "you scumbag dirtbag cretin"}) == 0);
    CHECK(run_cli({"score"}) == 2); // no text given
}

TEST_CASE("run-bot executes a scripted session") {
    TempDir tmp;
    const auto script = tmp.file("script.jsonl");
    {
        std::ofstream out(script);
        out << R"({"op": "ban", "user": "scripted", "reason": "spam", "as": "thread"})" << "\n";
        out << R"({"op": "advance", "seconds": 120})" << "\n";
        out << R"({"op": "message", "conversation": "thread", "body": "please undo this"})" << "\n";
        out << R"({"op": "outage", "down": true})" << "\n";
        out << R"({"op": "outage", "down": false})" << "\n";
        out << R"({"op": "decide", "conversation": "thread", "decision": "denied"})" << "\n";
    }
    const auto out_log = tmp.file("bot.jsonl");
    CHECK(run_cli({"run-bot", "--script", script, "--out", out_log}) == 0);
    const auto records = experiment::read_log(out_log);
    CHECK_FALSE(records.empty());

    const auto broken = tmp.file("broken.jsonl");
    {
        std::ofstream out(broken);
        out << R"({"op": "listen"})" << "\n";
    }
    CHECK(run_cli({"run-bot", "--script", broken, "--out", out_log}) == 2);
}

TEST_CASE("calibrate prints the solved constants") {
    CHECK(run_cli({"calibrate"}) == 0);
}
