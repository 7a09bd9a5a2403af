#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <vector>

namespace mlyap::cli {

/// Shortest representation that parses back to the same double.
inline std::string shortest(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

class CsvWriter {
public:
    explicit CsvWriter(std::string& sink) : sink_(sink) {}

    void header(const std::vector<std::string>& names)
    {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i)
                sink_ += ',';
            sink_ += names[i];
        }
        sink_ += '\n';
    }

    CsvWriter& cell(double v) { return raw(shortest(v)); }
    CsvWriter& cell(const std::optional<double>& v) { return raw(v ? shortest(*v) : std::string{}); }
    CsvWriter& cell(const std::string& s) { return raw(s); }

    void end_row()
    {
        sink_ += '\n';
        first_ = true;
    }

private:
    CsvWriter& raw(const std::string& s)
    {
        if (!first_)
            sink_ += ',';
        sink_ += s;
        first_ = false;
        return *this;
    }

    std::string& sink_;
    bool first_ = true;
};

} // namespace mlyap::cli
