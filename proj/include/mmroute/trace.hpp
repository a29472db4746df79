#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmroute/engine.hpp"

namespace mmr {

struct TraceRecord {
    SimTime t;
    std::string kind;
    NodeId node = 0;
    std::vector<std::pair<std::string, std::string>> fields;

    std::optional<std::string_view> field(std::string_view name) const;
    /// Renders `t_ns=... kind=... node=... k=v ...` on one line.
    std::string to_line() const;
};

/// Append-only, time-ordered log of protocol events.
class TraceLog {
public:
    void append(TraceRecord rec);
    const std::vector<TraceRecord>& records() const { return records_; }
    std::vector<const TraceRecord*> of_kind(std::string_view kind) const;
    void write(std::ostream& os) const;

private:
    std::vector<TraceRecord> records_;
};

}  // namespace mmr
