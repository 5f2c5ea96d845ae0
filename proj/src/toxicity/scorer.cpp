#include "appealgate/toxicity/scorer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "appealgate/common/errors.hpp"
#include "appealgate/pps/featurizer.hpp"

namespace appealgate::toxicity {

LexiconScorer::LexiconScorer(std::map<std::string, double> weights) : weights_(std::move(weights)) {
    for (const auto& [term, weight] : weights_)
        if (weight < 0.0) throw ValidationError("lexicon weight must be non-negative: " + term);
}

LexiconScorer LexiconScorer::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("LexiconScorer: cannot open " + path);
    std::map<std::string, double> weights;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError("LexiconScorer: missing tab on line " + std::to_string(lineno));
        const std::string term = line.substr(0, tab);
        const double weight = std::stod(line.substr(tab + 1));
        weights[term] = weight;
    }
    return LexiconScorer(std::move(weights));
}

const std::vector<std::pair<std::string, double>>& lexicon_ladder() {
    static const std::vector<std::pair<std::string, double>> ladder = {
        {"lame", 0.03125},   {"pathetic", 0.0625}, {"clown", 0.125},  {"idiot", 0.25},
        {"moron", 0.5},      {"scumbag", 1.0},     {"dirtbag", 2.0},  {"cretin", 4.0},
    };
    return ladder;
}

LexiconScorer LexiconScorer::builtin_default() {
    std::map<std::string, double> weights;
    for (const auto& [term, weight] : lexicon_ladder()) weights[term] = weight;
    // Free-weight entries for organic text; the generator never uses these.
    weights["stupid"] = 0.2;
    weights["trash"] = 0.15;
    weights["loser"] = 0.3;
    weights["garbage"] = 0.1;
    weights["worthless"] = 0.35;
    weights["shut"] = 0.05;
    weights["hate"] = 0.25;
    weights["fool"] = 0.18;
    return LexiconScorer(std::move(weights));
}

ToxicityScore LexiconScorer::score(const std::string& text) const {
    if (text.empty()) throw ValidationError("score: text must be non-empty");
    double total = 0.0;
    for (const auto& token : pps::tokenize(text)) {
        auto it = weights_.find(token);
        if (it != weights_.end()) total += it->second;
    }
    double value = 1.0 - std::exp(-total);
    if (value < 0.0) value = 0.0;
    if (value > 1.0) value = 1.0;
    return {value};
}

RemoteScorer::RemoteScorer(RemoteScorerConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw ValidationError("RemoteScorer: url required");
}

ToxicityScore RemoteScorer::score(const std::string& text) const {
    if (text.empty()) throw ValidationError("score: text must be non-empty");

    // Split "http://host:port/path"
    std::string rest = config_.url;
    const auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    const auto slash = rest.find('/');
    const std::string host_port = slash == std::string::npos ? rest : rest.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    nlohmann::json body;
    body["text"] = text;
    const std::string payload = body.dump();

    std::string last_error;
    int backoff_ms = config_.backoff_initial_ms;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        httplib::Client client(("http://" + host_port).c_str());
        client.set_connection_timeout(0, config_.timeout_ms * 1000);
        client.set_read_timeout(0, config_.timeout_ms * 1000);
        auto res = client.Post(path.c_str(), payload, "application/json");
        if (!res) {
            last_error = "transport failure";
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        try {
            const auto parsed = nlohmann::json::parse(res->body);
            const double value = parsed.at("score").get<double>();
            if (value < 0.0 || value > 1.0)
                throw ValidationError("RemoteScorer: score outside [0,1]");
            return {value};
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("bad response: ") + e.what();
        }
    }
    throw OutageError("RemoteScorer: giving up after " + std::to_string(config_.max_retries + 1) +
                      " attempts (" + last_error + ")");
}

bool classify(ToxicityScore score, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw ValidationError("classify: threshold must be in (0, 1)");
    return score.value >= threshold;
}

std::vector<SweepRow> threshold_sweep(const std::vector<AppealObservation>& appeals,
                                      const std::vector<double>& thresholds) {
    std::vector<SweepRow> rows;
    for (double threshold : thresholds) {
        SweepRow row;
        row.threshold = threshold;
        long treatment_visible_toxic = 0;
        for (const auto& appeal : appeals) {
            const bool toxic = classify({appeal.score}, threshold);
            if (!appeal.treatment) {
                if (appeal.visible) {
                    ++row.control_visible;
                    if (toxic) ++row.control_toxic;
                }
            } else {
                if (toxic) ++row.treatment_toxic;
                if (appeal.visible) {
                    ++row.treatment_visible;
                    if (toxic) ++treatment_visible_toxic;
                }
                if (appeal.completed && toxic) ++row.completed_toxic;
            }
        }
        row.control_rate = row.control_visible > 0
                               ? static_cast<double>(row.control_toxic) / static_cast<double>(row.control_visible)
                               : 0.0;
        // "After process" = toxic share of what moderators actually see in
        // the treatment arm (completed plus bypassed appeals).
        row.after_process_rate =
            row.treatment_visible > 0
                ? static_cast<double>(treatment_visible_toxic) / static_cast<double>(row.treatment_visible)
                : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace appealgate::toxicity
