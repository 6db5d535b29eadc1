#include "kronmde/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace kronmde {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string format_complex(cx z) {
    std::string s = format_double(z.real());
    double im = z.imag();
    // Keep the sign attached to the imaginary part: "a+bi" / "a-bi".
    if (std::signbit(im) && !std::isnan(im)) {
        s += '-';
        s += format_double(-im);
    } else {
        s += '+';
        s += format_double(im);
    }
    s += 'i';
    return s;
}

CsvReport::CsvReport(std::string tool_line) : tool_line_(std::move(tool_line)) {}

void CsvReport::meta(const std::string& key, const std::string& value) {
    meta_.push_back({key, value});
}

void CsvReport::meta(const std::string& key, double value) {
    meta_.push_back({key, format_double(value)});
}

void CsvReport::volatile_meta(const std::string& key, const std::string& value) {
    volatile_.push_back({key, value});
}

void CsvReport::columns(const std::vector<std::string>& names) { columns_ = names; }

void CsvReport::row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

static void append_joined(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

std::string CsvReport::body() const {
    std::string out;
    append_joined(out, columns_);
    for (const auto& r : rows_) append_joined(out, r);
    return out;
}

std::string CsvReport::str() const {
    std::string out = "# " + tool_line_ + "\n";
    for (const auto& m : meta_) out += "# " + m.key + ": " + m.value + "\n";
    for (const auto& m : volatile_) out += "# " + m.key + ": " + m.value + "\n";
    out += body();
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ContractError("cannot open output file: " + path);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.flush();
    if (!f) throw ContractError("failed writing output file: " + path);
}

std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tmv{};
    gmtime_r(&t, &tmv);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tmv.tm_year + 1900,
                  tmv.tm_mon + 1, tmv.tm_mday, tmv.tm_hour, tmv.tm_min, tmv.tm_sec);
    return buf;
}

}  // namespace kronmde
