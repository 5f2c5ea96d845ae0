#include "appealgate/experiment/event_log.hpp"

#include "appealgate/common/errors.hpp"

namespace appealgate::experiment {

const char* to_string(EventType type) {
    switch (type) {
        case EventType::Message: return "message";
        case EventType::BotAction: return "bot_action";
        case EventType::Archive: return "archive";
        case EventType::Unarchive: return "unarchive";
        case EventType::Note: return "note";
        case EventType::FormGrant: return "form_grant";
        case EventType::FormSubmit: return "form_submit";
        case EventType::Decision: return "decision";
        case EventType::Outage: return "outage";
        case EventType::Assignment: return "assignment";
    }
    return "?";
}

EventType event_type_from_string(const std::string& name) {
    if (name == "message") return EventType::Message;
    if (name == "bot_action") return EventType::BotAction;
    if (name == "archive") return EventType::Archive;
    if (name == "unarchive") return EventType::Unarchive;
    if (name == "note") return EventType::Note;
    if (name == "form_grant") return EventType::FormGrant;
    if (name == "form_submit") return EventType::FormSubmit;
    if (name == "decision") return EventType::Decision;
    if (name == "outage") return EventType::Outage;
    if (name == "assignment") return EventType::Assignment;
    throw CorruptLogError("unknown event type: " + name);
}

nlohmann::json EventRecord::to_json() const {
    nlohmann::json j;
    j["seq"] = seq;
    j["ts"] = ts;
    j["type"] = to_string(type);
    if (!conversation.empty()) j["conversation"] = conversation;
    if (!user.empty()) j["user"] = user;
    j["payload"] = payload;
    return j;
}

EventRecord EventRecord::from_json(const nlohmann::json& j) {
    EventRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.ts = j.at("ts").get<core::Timestamp>();
    r.type = event_type_from_string(j.at("type").get<std::string>());
    r.conversation = j.value("conversation", "");
    r.user = j.value("user", "");
    r.payload = j.value("payload", nlohmann::json::object());
    return r;
}

FileEventLog::FileEventLog(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("FileEventLog: cannot open " + path);
    nlohmann::json header;
    header["schema"] = kLogSchema;
    header["version"] = kLogVersion;
    out_ << header.dump() << "\n";
}

void FileEventLog::append(EventType type, core::Timestamp ts, std::string conversation, std::string user,
                          nlohmann::json payload) {
    EventRecord r;
    r.seq = next_seq_++;
    r.ts = ts;
    r.type = type;
    r.conversation = std::move(conversation);
    r.user = std::move(user);
    r.payload = std::move(payload);
    out_ << r.to_json().dump() << "\n";
}

void FileEventLog::flush() { out_.flush(); }

void MemoryEventLog::append(EventType type, core::Timestamp ts, std::string conversation, std::string user,
                            nlohmann::json payload) {
    EventRecord r;
    r.seq = static_cast<std::uint64_t>(records_.size()) + 1;
    r.ts = ts;
    r.type = type;
    r.conversation = std::move(conversation);
    r.user = std::move(user);
    r.payload = std::move(payload);
    records_.push_back(std::move(r));
}

void MemoryEventLog::save(const std::string& path) const {
    write_log(path, records_);
}

void for_each_event(const std::string& path, const std::function<void(const EventRecord&)>& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("event log: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw CorruptLogError("event log: empty file");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
        throw CorruptLogError("event log: bad header line");
    }
    if (header.value("schema", "") != kLogSchema)
        throw CorruptLogError("event log: unexpected schema");
    if (header.value("version", 0) != kLogVersion)
        throw CorruptLogError("event log: unsupported version");

    std::uint64_t expected = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EventRecord r;
        try {
            r = EventRecord::from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw CorruptLogError(std::string("event log: bad record: ") + e.what());
        }
        if (r.seq != expected)
            throw CorruptLogError("corrupt log: seq " + std::to_string(r.seq) + " where " +
                                  std::to_string(expected) + " expected");
        ++expected;
        fn(r);
    }
}

std::vector<EventRecord> read_log(const std::string& path) {
    std::vector<EventRecord> records;
    for_each_event(path, [&records](const EventRecord& r) { records.push_back(r); });
    return records;
}

void write_log(const std::string& path, const std::vector<EventRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("event log: cannot open " + path);
    nlohmann::json header;
    header["schema"] = kLogSchema;
    header["version"] = kLogVersion;
    out << header.dump() << "\n";
    for (const auto& r : records) out << r.to_json().dump() << "\n";
}

} // namespace appealgate::experiment
