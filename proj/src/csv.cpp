#include "fluxpop/csv.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "fluxpop/errors.hpp"

namespace fluxpop::csv {

namespace {

bool has_gz_suffix(const std::filesystem::path& path) {
    return path.extension() == ".gz";
}

std::string read_gz(const std::filesystem::path& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw input_error("cannot open " + path.string());
    }
    std::string out;
    char buf[1 << 16];
    int got = 0;
    while ((got = gzread(f, buf, sizeof(buf))) > 0) {
        out.append(buf, static_cast<std::size_t>(got));
    }
    const bool ok = got == 0;
    gzclose(f);
    if (!ok) {
        throw input_error("failed to inflate " + path.string());
    }
    return out;
}

} // namespace

std::string read_file_bytes(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw input_error("missing input: " + path.string());
    }
    if (has_gz_suffix(path)) {
        return read_gz(path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw input_error("cannot open " + path.string());
    }
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

std::vector<Row> parse(const std::string& text) {
    std::vector<Row> rows;
    std::vector<std::string> fields;
    std::string field;
    std::size_t line = 1;
    std::size_t row_line = 1;
    bool quoted = false;
    bool row_started = false;

    const auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
    };
    const auto end_row = [&] {
        end_field();
        rows.push_back(Row{std::move(fields), row_line});
        fields.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (!row_started) {
            row_started = true;
            row_line = line;
        }
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default:
            field.push_back(c);
            break;
        }
    }
    if (quoted) {
        throw input_error("unterminated quote at line " + std::to_string(row_line));
    }
    if (row_started) {
        end_row();
    }
    return rows;
}

std::string make_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            out.push_back(',');
        }
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n\r") != std::string::npos) {
            out.push_back('"');
            for (char c : f) {
                if (c == '"') {
                    out.push_back('"');
                }
                out.push_back(c);
            }
            out.push_back('"');
        } else {
            out += f;
        }
    }
    out.push_back('\n');
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes, bool gzip) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    if (gzip) {
        gzFile f = gzopen(tmp.c_str(), "wb");
        if (f == nullptr) {
            throw input_error("cannot write " + tmp.string());
        }
        const auto written =
            gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
        const bool ok = static_cast<std::size_t>(written) == bytes.size();
        gzclose(f);
        if (!ok) {
            throw input_error("short write to " + tmp.string());
        }
    } else {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw input_error("cannot write " + tmp.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw input_error("short write to " + tmp.string());
        }
        out.close();
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& context) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || field.empty()) {
        throw input_error(context + ": not a number: '" + field + "'");
    }
    if (!std::isfinite(value)) {
        throw input_error(context + ": non-finite value '" + field + "'");
    }
    return value;
}

std::int64_t parse_int64(const std::string& field, const std::string& context) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || field.empty()) {
        throw input_error(context + ": not an integer: '" + field + "'");
    }
    return value;
}

} // namespace fluxpop::csv
