#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fluxpop::csv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line of the row start, for error messages
};

/// Reads a whole file into memory; transparently inflates when the name ends
/// in .gz.
std::string read_file_bytes(const std::filesystem::path& path);

/// RFC-4180 style parser: quoted fields, "" escapes, quoted newlines, CRLF or
/// LF. Returns every row including the header.
std::vector<Row> parse(const std::string& text);

/// Serializes one row, quoting fields that contain commas, quotes or
/// newlines; appends '\n'.
std::string make_row(const std::vector<std::string>& fields);

/// Writes via a temp file + rename so readers never observe partial output.
/// Compresses when gzip is set (the path should then carry a .gz suffix).
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes,
                       bool gzip = false);

/// Shortest round-trip decimal form (to_chars).
std::string format_double(double value);

/// Strict numeric parsing: whole-field match, finite values only.
double parse_double(const std::string& field, const std::string& context);
std::int64_t parse_int64(const std::string& field, const std::string& context);

} // namespace fluxpop::csv
