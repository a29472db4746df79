#include "mmroute/trace.hpp"

#include <stdexcept>

namespace mmr {

std::optional<std::string_view> TraceRecord::field(std::string_view name) const
{
    for (const auto& [k, v] : fields)
        if (k == name)
            return std::string_view(v);
    return std::nullopt;
}

std::string TraceRecord::to_line() const
{
    std::string line = "t_ns=" + std::to_string(t.ns) + " kind=" + kind + " node=" + std::to_string(node);
    for (const auto& [k, v] : fields) {
        line += ' ';
        line += k;
        line += '=';
        line += v;
    }
    return line;
}

void TraceLog::append(TraceRecord rec)
{
    if (!records_.empty() && rec.t < records_.back().t)
        throw std::logic_error("trace records must be appended in time order");
    records_.push_back(std::move(rec));
}

std::vector<const TraceRecord*> TraceLog::of_kind(std::string_view kind) const
{
    std::vector<const TraceRecord*> out;
    for (const auto& r : records_)
        if (r.kind == kind)
            out.push_back(&r);
    return out;
}

void TraceLog::write(std::ostream& os) const
{
    for (const auto& r : records_)
        os << r.to_line() << '\n';
}

}  // namespace mmr
