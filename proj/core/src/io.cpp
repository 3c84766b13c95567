#include "mvac/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <system_error>

#include "mvac/errors.hpp"

namespace mvac {

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw InvalidInput("format_number: conversion failed");
    return std::string(buf.data(), end);
}

double parse_number(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidInput("not a number: '" + std::string(text) + "'");
    }
    return value;
}

CsvWriter::CsvWriter(std::ostream& out, std::span<const std::string> header)
    : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != 0) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_number(value))); }

CsvWriter& CsvWriter::cell(long long value) {
    return cell(std::string_view(std::to_string(value)));
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (filled_ != 0) out_ << ',';
    out_ << text;
    ++filled_;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) {
        throw InvalidInput("CsvWriter: row has " + std::to_string(filled_) + " cells, expected " +
                           std::to_string(columns_));
    }
    out_ << '\n';
    filled_ = 0;
}

void write_record(std::ostream& out, const KeyValueRecord& record) {
    for (const auto& [key, value] : record) out << key << '=' << value << '\n';
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidInput("cannot open " + tmp.string() + " for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!f) throw InvalidInput("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mvac
