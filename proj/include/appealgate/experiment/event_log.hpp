#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "appealgate/core/types.hpp"

namespace appealgate::experiment {

enum class EventType {
    Message,    // user or moderator conversation message (incl. ban notices)
    BotAction,  // engine-caused effect: reply / archive / unarchive / note
    Archive,    // manual moderator archive toggle
    Unarchive,  // manual moderator unarchive toggle
    Note,       // moderator private note
    FormGrant,  // engine opened form access for a user
    FormSubmit, // user submitted the form
    Decision,   // moderator decision on an appeal
    Outage,     // form service availability change
    Assignment, // experiment group draw for a user
};

const char* to_string(EventType type);
EventType event_type_from_string(const std::string& name);

struct EventRecord {
    std::uint64_t seq = 0;
    core::Timestamp ts = 0;
    EventType type = EventType::Message;
    std::string conversation; // empty when not applicable
    std::string user;         // empty when not applicable
    nlohmann::json payload;

    nlohmann::json to_json() const;
    static EventRecord from_json(const nlohmann::json& j);

    bool same_content(const EventRecord& other) const {
        return ts == other.ts && type == other.type && conversation == other.conversation &&
               user == other.user && payload == other.payload;
    }
};

// Producers append through this; seq numbering belongs to the sink.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void append(EventType type, core::Timestamp ts, std::string conversation, std::string user,
                        nlohmann::json payload) = 0;
};

inline constexpr const char* kLogSchema = "appealgate.events";
inline constexpr int kLogVersion = 1;

// Streams records to a JSONL file; first line is the schema header.
class FileEventLog : public EventSink {
public:
    explicit FileEventLog(const std::string& path);
    void append(EventType type, core::Timestamp ts, std::string conversation, std::string user,
                nlohmann::json payload) override;
    std::uint64_t count() const { return next_seq_ - 1; }
    void flush();

private:
    std::ofstream out_;
    std::uint64_t next_seq_ = 1;
};

// Keeps records in memory; used by tests and by replay snapshots.
class MemoryEventLog : public EventSink {
public:
    void append(EventType type, core::Timestamp ts, std::string conversation, std::string user,
                nlohmann::json payload) override;
    const std::vector<EventRecord>& records() const { return records_; }
    void save(const std::string& path) const;

private:
    std::vector<EventRecord> records_;
};

// Validates the header and strict seq contiguity (1, 2, 3, ...); throws
// CorruptLogError otherwise.
void for_each_event(const std::string& path, const std::function<void(const EventRecord&)>& fn);
std::vector<EventRecord> read_log(const std::string& path);
void write_log(const std::string& path, const std::vector<EventRecord>& records);

} // namespace appealgate::experiment
