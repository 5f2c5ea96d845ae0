#include "appealgate/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "appealgate/cli/config.hpp"
#include "appealgate/common/errors.hpp"
#include "appealgate/experiment/replay.hpp"
#include "appealgate/experiment/report.hpp"
#include "appealgate/pps/logistic.hpp"
#include "appealgate/sim/calibrate.hpp"
#include "appealgate/sim/simulator.hpp"

namespace appealgate::cli {

namespace {

Config load_config_or_defaults(const std::string& path) {
    if (path.empty()) return Config::defaults();
    return Config::load(path);
}

experiment::TextScorer make_scorer(const Config& cfg) {
    if (cfg.toxicity_backend == "remote") {
        toxicity::RemoteScorerConfig remote = cfg.remote;
        if (const char* url = std::getenv("APPEALGATE_SCORER_URL")) remote.url = url;
        auto scorer = std::make_shared<toxicity::RemoteScorer>(remote);
        return [scorer](const std::string& text) { return scorer->score(text).value; };
    }
    auto scorer = std::make_shared<toxicity::LexiconScorer>(cfg.make_lexicon());
    return [scorer](const std::string& text) { return scorer->score(text).value; };
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed, std::optional<long> n_users) {
    Config cfg = load_config_or_defaults(config_path);
    if (seed) cfg.behavior.seed = *seed;
    if (n_users) cfg.behavior.n_users = *n_users;

    experiment::FileEventLog log(out_path);
    auto env = sim::SimEnv::make(log, cfg.engine, cfg.form, cfg.assignment_ratio, cfg.assignment_seed);
    const auto population = sim::generate_population(cfg.behavior);
    const auto summary = sim::run_simulation(population, env, cfg.behavior);
    log.flush();

    std::cout << "simulated " << cfg.behavior.n_users << " users -> " << out_path << "\n";
    std::cout << "  control:   " << summary.control_total << " appeals, " << summary.control_responded
              << " responded, " << summary.control_granted << " granted\n";
    std::cout << "  treatment: " << summary.treatment_total << " appeals, "
              << summary.treatment_completed << " completed ("
              << std::fixed << std::setprecision(1) << 100.0 * summary.treatment_completion_rate()
              << "%), " << summary.treatment_responded << " responded, " << summary.treatment_granted
              << " granted\n";
    std::cout << "  events:    " << log.count() << "\n";
    return 0;
}

int cmd_report(const std::string& config_path, const std::string& log_path, const std::string& out_dir,
               std::optional<double> threshold, const std::string& model_path) {
    Config cfg = load_config_or_defaults(config_path);
    experiment::ReportOptions options;
    options.threshold = threshold.value_or(cfg.toxicity_threshold);

    std::optional<pps::LogisticModel> model;
    if (!model_path.empty()) model = pps::load_model(model_path);

    const auto scorer = make_scorer(cfg);
    const auto report = experiment::build_report_from_file(log_path, scorer, options,
                                                           model ? &*model : nullptr);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream md(std::filesystem::path(out_dir) / "report.md");
        md << experiment::render_markdown(report);
    }
    experiment::write_csv_tables(report, out_dir);

    std::cout << "report written to " << out_dir << "\n";
    std::cout << "  visible " << report.control.visible << "/" << report.treatment.visible
              << ", responded " << report.control.responded << "/" << report.treatment.responded
              << ", granted " << report.control.granted << "/" << report.treatment.granted << "\n";
    return 0;
}

std::pair<std::vector<std::string>, std::vector<int>> read_corpus_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus " + path);
    std::vector<std::string> texts;
    std::vector<int> labels;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // Minimal CSV: optionally quoted text field, then the label.
        std::string text;
        std::size_t pos = 0;
        if (line[0] == '"') {
            pos = 1;
            while (pos < line.size()) {
                if (line[pos] == '"' && pos + 1 < line.size() && line[pos + 1] == '"') {
                    text.push_back('"');
                    pos += 2;
                } else if (line[pos] == '"') {
                    ++pos;
                    break;
                } else {
                    text.push_back(line[pos++]);
                }
            }
            if (pos >= line.size() || line[pos] != ',')
                throw ValidationError("corpus: malformed quoted row: " + line);
            ++pos;
        } else {
            const auto comma = line.rfind(',');
            if (comma == std::string::npos)
                throw ValidationError("corpus: row without label column: " + line);
            text = line.substr(0, comma);
            pos = comma + 1;
        }
        const std::string label = line.substr(pos);
        if (header && (label == "label")) {
            header = false;
            continue;
        }
        header = false;
        if (label != "0" && label != "1")
            throw ValidationError("corpus: label must be 0 or 1, got \"" + label + "\"");
        texts.push_back(text);
        labels.push_back(label == "1" ? 1 : 0);
    }
    if (texts.empty()) throw ValidationError("corpus: no rows");
    return {texts, labels};
}

int cmd_train_pps(const std::string& config_path, const std::string& corpus_path,
                  const std::string& out_path, std::optional<std::uint64_t> seed) {
    Config cfg = load_config_or_defaults(config_path);
    auto [texts, labels] = read_corpus_csv(corpus_path);

    const auto cv = pps::cross_validate(texts, labels, cfg.pps_cv_folds, cfg.pps_l2, cfg.pps_min_df,
                                        seed.value_or(cfg.pps_cv_seed));
    auto [vocab, X] = pps::featurize(texts, cfg.pps_min_df);
    pps::LogisticModel model = pps::train(vocab, X, labels, cfg.pps_l2);
    model.settings.min_df = cfg.pps_min_df;
    pps::save_model(model, out_path);

    std::cout << "trained on " << texts.size() << " examples, vocabulary " << vocab.size() << "\n";
    std::cout << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < cv.folds.size(); ++i)
        std::cout << "  fold " << i + 1 << ": macro F " << cv.folds[i].macro_f << "\n";
    std::cout << "macro F (" << cv.k << "-fold): " << cv.macro_f << "\n";
    std::cout << "model written to " << out_path << "\n";
    return 0;
}

int cmd_score(const std::string& config_path, std::string text, bool read_stdin,
              std::optional<double> threshold) {
    Config cfg = load_config_or_defaults(config_path);
    if (read_stdin) {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        text = buffer.str();
    }
    if (text.empty()) throw ValidationError("score: no text given (use --text or --stdin)");
    const auto scorer = make_scorer(cfg);
    const double value = scorer(text);
    const double th = threshold.value_or(cfg.toxicity_threshold);
    std::cout << std::fixed << std::setprecision(6) << value << " "
              << (toxicity::classify({value}, th) ? "toxic" : "ok") << " (threshold " << th << ")\n";
    return 0;
}

int cmd_run_bot(const std::string& config_path, const std::string& script_path,
                const std::string& out_path) {
    Config cfg = load_config_or_defaults(config_path);
    std::ifstream in(script_path);
    if (!in) throw std::runtime_error("cannot open script " + script_path);

    experiment::FileEventLog log(out_path);
    auto env = sim::SimEnv::make(log, cfg.engine, cfg.form, cfg.assignment_ratio, cfg.assignment_seed);
    auto& platform = *env.platform;
    auto& engine = *env.engine;

    std::map<std::string, core::ConversationId> names; // script alias -> conversation id
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        nlohmann::json op;
        try {
            op = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("script line " + std::to_string(lineno) + ": " + e.what());
        }
        const std::string kind = op.at("op").get<std::string>();
        if (kind == "advance") {
            platform.advance_clock(op.at("seconds").get<core::Timestamp>());
        } else if (kind == "ban") {
            std::optional<std::string> reason;
            if (op.contains("reason")) reason = op.at("reason").get<std::string>();
            const auto conv = platform.open_ban_conversation(
                op.at("user").get<std::string>(), reason, op.value("permanent", true),
                op.value("body", std::string("you have been banned")));
            names[op.value("as", conv)] = conv;
        } else if (kind == "message") {
            platform.user_sends(names.at(op.at("conversation").get<std::string>()),
                                op.at("body").get<std::string>());
        } else if (kind == "mod_message") {
            platform.moderator_sends(names.at(op.at("conversation").get<std::string>()),
                                     op.at("body").get<std::string>());
        } else if (kind == "submit") {
            std::vector<webform::Answer> answers;
            for (const auto& ja : op.at("answers")) {
                webform::Answer a;
                if (ja.contains("text")) a.text = ja.at("text").get<std::string>();
                if (ja.contains("selected")) a.selected = ja.at("selected").get<std::vector<int>>();
                answers.push_back(std::move(a));
            }
            const auto user = op.at("user").get<std::string>();
            const auto started = op.value("started_at", platform.now());
            env.form->submit(user, std::move(answers), started, platform.now());
        } else if (kind == "outage") {
            env.form->set_outage(op.at("down").get<bool>());
        } else if (kind == "decide") {
            std::optional<int> days;
            if (op.contains("mute_days")) days = op.at("mute_days").get<int>();
            const std::string d = op.at("decision").get<std::string>();
            core::Decision decision = core::Decision::Denied;
            if (d == "granted") decision = core::Decision::Granted;
            else if (d == "denied") decision = core::Decision::Denied;
            else if (d == "ignored") decision = core::Decision::Ignored;
            else if (d == "muted") decision = core::Decision::Muted;
            else throw ValidationError("script: unknown decision " + d);
            engine.record_decision(names.at(op.at("conversation").get<std::string>()), decision, days);
        } else {
            throw ValidationError("script line " + std::to_string(lineno) + ": unknown op " + kind);
        }
        engine.pump();
    }
    log.flush();
    std::cout << "script done; " << log.count() << " events -> " << out_path << "\n";
    for (const auto& conv : engine.appeal_order()) {
        const auto* record = engine.appeal_for(conv);
        std::cout << "  " << conv << " user=" << record->user << " group="
                  << core::to_string(record->group) << " state=" << core::to_string(record->state.kind);
        if (record->state.decision) std::cout << "(" << core::to_string(*record->state.decision) << ")";
        std::cout << " archived=" << (platform.conversation(conv).archived ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_calibrate() {
    const sim::CalibrationTargets targets;
    const auto result = sim::calibrate(targets);
    std::cout << std::setprecision(10);
    std::cout << "behavior config values:\n";
    std::cout << "  pps_alpha:       " << result.pps_alpha << "\n";
    std::cout << "  pps_beta:        " << result.pps_beta << "\n";
    std::cout << "  completion_btox: " << result.beta_tox << "\n";
    std::cout << "  grant_base:      " << result.grant_base << "\n";
    std::cout << "  grant_complete:  " << result.grant_complete << "\n";
    std::cout << "achieved expectations:\n";
    std::cout << "  completion overall  " << result.completion_overall << "\n";
    std::cout << "  completion nontoxic " << result.completion_nontoxic << "\n";
    std::cout << "  completion toxic    " << result.completion_toxic << "\n";
    std::cout << "  grant control       " << result.grant_control << "\n";
    std::cout << "  grant treatment     " << result.grant_treatment << "\n";
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"friction-gated ban-appeal workflow engine"};
    app.require_subcommand(1);

    std::string config_path, out_path, log_path, corpus_path, model_path, script_path, text;
    std::optional<std::uint64_t> seed;
    std::optional<long> n_users;
    std::optional<double> threshold;
    bool read_stdin = false;

    auto* simulate = app.add_subcommand("simulate", "run a seeded behavioral simulation");
    simulate->add_option("--config", config_path);
    simulate->add_option("--out", out_path)->required();
    simulate->add_option("--seed", seed);
    simulate->add_option("--n", n_users);

    auto* report = app.add_subcommand("report", "build the experiment report from an event log");
    report->add_option("--config", config_path);
    report->add_option("--log", log_path)->required();
    report->add_option("--out", out_path)->required();
    report->add_option("--threshold", threshold);
    report->add_option("--pps-model", model_path);

    auto* train = app.add_subcommand("train-pps", "train the success classifier on a CSV corpus");
    train->add_option("--config", config_path);
    train->add_option("--corpus", corpus_path)->required();
    train->add_option("--out", out_path)->required();
    train->add_option("--seed", seed);

    auto* score = app.add_subcommand("score", "score a text with the configured toxicity backend");
    score->add_option("--config", config_path);
    score->add_option("--text", text);
    score->add_flag("--stdin", read_stdin);
    score->add_option("--threshold", threshold);

    auto* run_bot = app.add_subcommand("run-bot", "drive the engine over a scripted event file");
    run_bot->add_option("--config", config_path);
    run_bot->add_option("--script", script_path)->required();
    run_bot->add_option("--out", out_path)->required();

    app.add_subcommand("calibrate", "solve the behavior-model constants from the rate targets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, out_path, seed, n_users);
        if (report->parsed()) return cmd_report(config_path, log_path, out_path, threshold, model_path);
        if (train->parsed()) return cmd_train_pps(config_path, corpus_path, out_path, seed);
        if (score->parsed()) return cmd_score(config_path, text, read_stdin, threshold);
        if (run_bot->parsed()) return cmd_run_bot(config_path, script_path, out_path);
        return cmd_calibrate();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace appealgate::cli
