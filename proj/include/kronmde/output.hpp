#pragma once

// Deterministic report writing.  All numeric output goes through
// shortest-round-trip formatting (std::to_chars) so that a rerun with the
// same seed produces byte-identical file bodies regardless of locale or
// thread count.  Volatile information (timestamps, wall-clock durations)
// is confined to "#" comment lines in the header block.

#include <string>
#include <vector>

#include "kronmde/types.hpp"

namespace kronmde {

// Shortest decimal string that round-trips to the same double.
// NaN -> "nan", infinities -> "inf"/"-inf".
std::string format_double(double x);

// Complex in "a+bi" form, e.g. "1.5-0.25i".  Both parts always present.
std::string format_complex(cx z);

// One key/value line of run metadata.  Values are preformatted strings.
struct MetaLine {
    std::string key;
    std::string value;
};

// A CSV report: "#"-prefixed header lines (metadata + timing), then a
// column-name row, then data rows.  Only the header may contain
// nondeterministic content.
class CsvReport {
  public:
    explicit CsvReport(std::string tool_line);

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);

    // Timing/timestamp lines: kept in the header, never in the body.
    void volatile_meta(const std::string& key, const std::string& value);

    void columns(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

    // Render.  Header lines are "# key: value"; the tool line goes first.
    std::string str() const;

    // Body only (column row + data rows) -- the part that must be
    // byte-identical across reruns.
    std::string body() const;

  private:
    std::string tool_line_;
    std::vector<MetaLine> meta_;
    std::vector<MetaLine> volatile_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes text to path atomically enough for our purposes (truncate +
// write + flush); throws ContractError on I/O failure.
void write_text_file(const std::string& path, const std::string& text);

// ISO-8601 UTC timestamp for header lines.
std::string utc_timestamp();

}  // namespace kronmde
