#pragma once

// Text output helpers. Every number goes through format_number, which emits
// the shortest decimal string that parses back to the same double.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvac {

std::string format_number(double value);

/// Strict full-string parse; throws InvalidInput on trailing garbage.
double parse_number(std::string_view text);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::span<const std::string> header);

    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    CsvWriter& cell(std::string_view text);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

using KeyValueRecord = std::vector<std::pair<std::string, std::string>>;

/// One "key=value" per line, in insertion order.
void write_record(std::ostream& out, const KeyValueRecord& record);

/// Writes to a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mvac
