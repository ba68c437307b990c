#pragma once

/// @file data_pipeline.hpp
/// @brief Ingestion of two asynchronously sampled series (a predictor table
/// and a response series), variable screening, interval-averaged alignment,
/// date-based train/test splitting, and the on-disk dataset format.
///
/// All instants are held as UTC seconds. Files declare the fixed UTC offset
/// their timestamps are written in; alignment emits calendar components in
/// one configured offset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "text.hpp"

namespace pgp {

// ---------------------------------------------------------------------------
// Time helpers

struct CivilTime {
    int year = 1970;
    unsigned month = 1, day = 1, hour = 0, minute = 0, second = 0;
};

inline std::int64_t to_utc_seconds(const CivilTime& c, int utc_offset_minutes = 0) {
    using namespace std::chrono;
    const sys_days d{year{c.year} / month{c.month} / day{c.day}};
    return static_cast<std::int64_t>(d.time_since_epoch().count()) * 86400 + c.hour * 3600 + c.minute * 60 +
           c.second - static_cast<std::int64_t>(utc_offset_minutes) * 60;
}

inline CivilTime to_civil(std::int64_t utc_seconds, int utc_offset_minutes = 0) {
    using namespace std::chrono;
    const std::int64_t local = utc_seconds + static_cast<std::int64_t>(utc_offset_minutes) * 60;
    std::int64_t days = local / 86400;
    std::int64_t secs = local % 86400;
    if (secs < 0) {
        secs += 86400;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
            static_cast<unsigned>(secs / 3600), static_cast<unsigned>((secs / 60) % 60),
            static_cast<unsigned>(secs % 60)};
}

/// "UTC", "Z", "+10:00", "-0330", "+10" -> minutes east of UTC.
inline int parse_utc_offset(std::string_view s) {
    if (s.empty() || s == "UTC" || s == "Z" || s == "utc") return 0;
    std::string_view body = s;
    if (body.substr(0, 3) == "UTC") body.remove_prefix(3);
    if (body.empty() || (body[0] != '+' && body[0] != '-')) throw InputError("bad timezone offset '" + std::string(s) + "'");
    const int sign = body[0] == '-' ? -1 : 1;
    body.remove_prefix(1);
    std::string digits;
    for (char c : body)
        if (c != ':') digits += c;
    if (digits.empty() || digits.size() > 4 || !std::all_of(digits.begin(), digits.end(), ::isdigit))
        throw InputError("bad timezone offset '" + std::string(s) + "'");
    int h = 0, m = 0;
    if (digits.size() <= 2) {
        h = std::stoi(digits);
    } else {
        h = std::stoi(digits.substr(0, digits.size() - 2));
        m = std::stoi(digits.substr(digits.size() - 2));
    }
    if (h > 14 || m > 59) throw InputError("bad timezone offset '" + std::string(s) + "'");
    return sign * (h * 60 + m);
}

/// strptime-style parse (std::get_time); the whole string must be consumed.
inline std::optional<std::int64_t> parse_timestamp(std::string_view text, const std::string& pattern,
                                                   int utc_offset_minutes) {
    std::tm tm{};
    std::istringstream in{std::string(text)};
    in.imbue(std::locale::classic());
    in >> std::get_time(&tm, pattern.c_str());
    if (in.fail()) return std::nullopt;
    in >> std::ws;
    if (!in.eof()) return std::nullopt;
    CivilTime c{tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1), static_cast<unsigned>(tm.tm_mday),
                static_cast<unsigned>(tm.tm_hour), static_cast<unsigned>(tm.tm_min),
                static_cast<unsigned>(std::min(tm.tm_sec, 59))};
    using namespace std::chrono;
    if (!year_month_day{year{c.year} / month{c.month} / day{c.day}}.ok()) return std::nullopt;
    return to_utc_seconds(c, utc_offset_minutes);
}

/// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM", "YYYY-MM-DD HH:MM:SS" and the
/// 'T'-separated forms.
inline std::int64_t parse_datetime(std::string_view text, int utc_offset_minutes) {
    std::string s(text);
    if (!s.empty() && s.back() == 'Z') s.pop_back();
    std::replace(s.begin(), s.end(), 'T', ' ');
    for (const char* p : {"%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%d"})
        if (auto t = parse_timestamp(s, p, utc_offset_minutes)) return *t;
    throw InputError("cannot parse date/time '" + std::string(text) + "'");
}

inline std::string format_timestamp(std::int64_t utc_seconds, const std::string& pattern, int utc_offset_minutes) {
    const auto c = to_civil(utc_seconds, utc_offset_minutes);
    std::tm tm{};
    tm.tm_year = c.year - 1900;
    tm.tm_mon = static_cast<int>(c.month) - 1;
    tm.tm_mday = static_cast<int>(c.day);
    tm.tm_hour = static_cast<int>(c.hour);
    tm.tm_min = static_cast<int>(c.minute);
    tm.tm_sec = static_cast<int>(c.second);
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << std::put_time(&tm, pattern.c_str());
    return out.str();
}

inline std::string format_iso_utc(std::int64_t utc_seconds) {
    return format_timestamp(utc_seconds, "%Y-%m-%dT%H:%M:%SZ", 0);
}

// ---------------------------------------------------------------------------
// Raw tables

struct TableFormat {
    char delimiter = ',';
    std::string timestamp_column = "timestamp";
    std::string timestamp_format = "%Y-%m-%d %H:%M";
    int utc_offset_minutes = 0;
};

/// A parsed delimited table. Missing or unparseable numeric cells are NaN.
struct RawSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<std::size_t> text_cells;  // per column: non-numeric, non-placeholder cells
    std::vector<std::string> log;

    [[nodiscard]] std::size_t rows() const noexcept { return timestamps.size(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = line.find(delim, start);
        out.push_back(trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

inline bool is_placeholder(const std::string& cell) {
    static const char* const kTokens[] = {"", "-", "\xE2\x80\x93", "\xE2\x80\x94", "NA", "N/A", "n/a",
                                          "NaN", "nan", "null", "NULL", "?"};
    return std::any_of(std::begin(kTokens), std::end(kTokens), [&](const char* t) { return cell == t; });
}

inline std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto res = std::from_chars(first, cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

inline RawSeries parse_table(std::istream& in, const TableFormat& fmt, const std::string& source = "<stream>") {
    RawSeries out;
    std::string line;
    if (!std::getline(in, line)) throw InputError(source + ": empty file");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto header = detail::split(line, fmt.delimiter);
    const auto ts_it = std::find(header.begin(), header.end(), fmt.timestamp_column);
    if (ts_it == header.end())
        throw InputError(source + ": timestamp column '" + fmt.timestamp_column + "' not found");
    const auto ts_col = static_cast<std::size_t>(ts_it - header.begin());
    std::vector<std::size_t> value_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == ts_col) continue;
        value_cols.push_back(c);
        out.names.push_back(header[c]);
    }
    struct Row {
        std::int64_t t;
        std::size_t order;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    out.text_cells.assign(value_cols.size(), 0);
    std::size_t bad_time = 0, line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line, fmt.delimiter);
        const auto t = ts_col < cells.size()
                           ? parse_timestamp(cells[ts_col], fmt.timestamp_format, fmt.utc_offset_minutes)
                           : std::nullopt;
        if (!t) {
            ++bad_time;
            continue;
        }
        Row r{*t, rows.size(), std::vector<double>(value_cols.size(), std::numeric_limits<double>::quiet_NaN())};
        for (std::size_t k = 0; k < value_cols.size(); ++k) {
            if (value_cols[k] >= cells.size()) continue;
            const auto& cell = cells[value_cols[k]];
            if (auto v = detail::parse_number(cell)) r.values[k] = *v;
            else if (!detail::is_placeholder(cell)) ++out.text_cells[k];
        }
        rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    std::size_t dups = 0;
    out.columns.assign(value_cols.size(), {});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].t == rows[i - 1].t) {
            ++dups;
            continue;
        }
        out.timestamps.push_back(rows[i].t);
        for (std::size_t k = 0; k < value_cols.size(); ++k) out.columns[k].push_back(rows[i].values[k]);
    }
    if (dups > 0) out.log.push_back(source + ": collapsed " + std::to_string(dups) + " duplicate timestamp rows");
    if (bad_time > 0) out.log.push_back(source + ": skipped " + std::to_string(bad_time) + " rows with unparseable timestamps");
    return out;
}

inline RawSeries parse_table(const std::filesystem::path& path, const TableFormat& fmt) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    return parse_table(in, fmt, path.string());
}

/// Writes `s` in the layout parse_table() reads. NaN cells are left empty.
inline void write_table(std::ostream& out, const RawSeries& s, const TableFormat& fmt) {
    out << fmt.timestamp_column;
    for (const auto& n : s.names) out << fmt.delimiter << n;
    out << '\n';
    for (std::size_t r = 0; r < s.rows(); ++r) {
        out << format_timestamp(s.timestamps[r], fmt.timestamp_format, fmt.utc_offset_minutes);
        for (const auto& col : s.columns) {
            out << fmt.delimiter;
            if (std::isfinite(col[r])) out << format_number(col[r]);
        }
        out << '\n';
    }
}

/// Drops columns that are mostly text or whose missing share exceeds
/// `missing_fraction_threshold`, then rows with any remaining gap. Every
/// drop is appended to the series log.
inline RawSeries screen_variables(const RawSeries& in, double missing_fraction_threshold = 0.75) {
    RawSeries out;
    out.log = in.log;
    const std::size_t n = in.rows();
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < in.columns.size(); ++c) {
        const auto& col = in.columns[c];
        const auto numeric = static_cast<std::size_t>(std::count_if(col.begin(), col.end(), [](double v) { return std::isfinite(v); }));
        const std::size_t text = c < in.text_cells.size() ? in.text_cells[c] : 0;
        const double missing = n == 0 ? 1.0 : static_cast<double>(n - numeric) / static_cast<double>(n);
        if (text > numeric) {
            out.log.push_back("dropped column '" + in.names[c] + "': non-numeric (" + std::to_string(text) +
                              " text cells)");
        } else if (missing > missing_fraction_threshold) {
            std::ostringstream msg;
            msg << "dropped column '" << in.names[c] << "': " << std::fixed << std::setprecision(1) << missing * 100.0
                << "% missing";
            out.log.push_back(msg.str());
        } else {
            keep.push_back(c);
        }
    }
    if (keep.empty()) throw InputError("screen_variables: every column was dropped");
    for (auto c : keep) {
        out.names.push_back(in.names[c]);
        out.text_cells.push_back(0);
    }
    out.columns.assign(keep.size(), {});
    std::size_t dropped_rows = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const bool complete = std::all_of(keep.begin(), keep.end(), [&](std::size_t c) { return std::isfinite(in.columns[c][r]); });
        if (!complete) {
            ++dropped_rows;
            continue;
        }
        out.timestamps.push_back(in.timestamps[r]);
        for (std::size_t k = 0; k < keep.size(); ++k) out.columns[k].push_back(in.columns[keep[k]][r]);
    }
    if (dropped_rows > 0) out.log.push_back("dropped " + std::to_string(dropped_rows) + " rows with missing values");
    return out;
}

// ---------------------------------------------------------------------------
// Alignment

inline const std::vector<std::string> kTimeComponents = {"year", "month", "day", "hour", "minute"};

struct AlignOptions {
    int utc_offset_minutes = 0;  // zone of the emitted calendar components
    int window_minutes = 25;     // response averaged over [t, t + window]
    std::string response_column;  // empty: first column of the response series
};

/// Pairs each predictor row stamped at minute 0 or 30 (local to the
/// configured offset) with the mean of the response samples in
/// [t, t + window] inclusive. Rows with gaps or an empty window are skipped.
/// Calendar components of t lead the input variables.
inline AlignedDataset align(const RawSeries& predictors, const RawSeries& response, const AlignOptions& opt = {}) {
    if (predictors.rows() == 0 || response.rows() == 0) throw InputError("align: empty series");
    std::size_t rc = 0;
    if (!opt.response_column.empty()) {
        auto it = std::find(response.names.begin(), response.names.end(), opt.response_column);
        if (it == response.names.end()) throw InputError("align: response column '" + opt.response_column + "' not found");
        rc = static_cast<std::size_t>(it - response.names.begin());
    } else if (response.names.empty()) {
        throw InputError("align: response series has no value column");
    }
    const auto& rt = response.timestamps;
    const auto& rv = response.columns[rc];

    AlignedDataset ds;
    ds.variables = kTimeComponents;
    ds.variables.insert(ds.variables.end(), predictors.names.begin(), predictors.names.end());
    ds.response_name = response.names[rc];
    ds.columns.assign(ds.variables.size(), {});
    const std::int64_t window = static_cast<std::int64_t>(opt.window_minutes) * 60;

    for (std::size_t r = 0; r < predictors.rows(); ++r) {
        const std::int64_t t = predictors.timestamps[r];
        const auto c = to_civil(t, opt.utc_offset_minutes);
        if (c.second != 0 || (c.minute != 0 && c.minute != 30)) continue;
        bool complete = true;
        for (const auto& col : predictors.columns) complete = complete && std::isfinite(col[r]);
        if (!complete) continue;
        auto lo = std::lower_bound(rt.begin(), rt.end(), t);
        auto hi = std::upper_bound(rt.begin(), rt.end(), t + window);
        double sum = 0.0;
        std::size_t count = 0;
        for (auto it = lo; it != hi; ++it) {
            const double v = rv[static_cast<std::size_t>(it - rt.begin())];
            if (std::isfinite(v)) {
                sum += v;
                ++count;
            }
        }
        if (count == 0) continue;
        const double comps[5] = {static_cast<double>(c.year), static_cast<double>(c.month), static_cast<double>(c.day),
                                 static_cast<double>(c.hour), static_cast<double>(c.minute)};
        for (std::size_t k = 0; k < 5; ++k) ds.columns[k].push_back(comps[k]);
        for (std::size_t k = 0; k < predictors.columns.size(); ++k) ds.columns[5 + k].push_back(predictors.columns[k][r]);
        ds.response.push_back(sum / static_cast<double>(count));
        ds.timestamps.push_back(t);
    }
    if (ds.response.empty()) throw InputError("align: no overlapping predictor/response pairs");
    ds.compute_ranges();
    return ds;
}

// ---------------------------------------------------------------------------
// Splitting

/// Half-open [begin, end) in UTC seconds.
struct TimeRange {
    std::int64_t begin = 0;
    std::int64_t end = 0;
    [[nodiscard]] bool contains(std::int64_t t) const { return begin <= t && t < end; }
};

/// Partitions rows by timestamp. Each part gets ranges from its own rows;
/// models are screened against the training part's ranges.
inline std::pair<AlignedDataset, AlignedDataset> split_by_date(const AlignedDataset& ds, const TimeRange& train,
                                                               const TimeRange& test) {
    if (ds.timestamps.size() != ds.rows()) throw InputError("split_by_date: dataset has no timestamps");
    if (train.begin >= train.end || test.begin >= test.end) throw InputError("split_by_date: empty date range");
    if (train.begin < test.end && test.begin < train.end) throw InputError("split_by_date: train and test ranges overlap");
    std::vector<std::size_t> a, b;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        if (train.contains(ds.timestamps[r])) a.push_back(r);
        else if (test.contains(ds.timestamps[r])) b.push_back(r);
    }
    if (a.empty()) throw InputError("split_by_date: training partition is empty");
    if (b.empty()) throw InputError("split_by_date: test partition is empty");
    return {take_rows(ds, a), take_rows(ds, b)};
}

// ---------------------------------------------------------------------------
// Persistence: one delimited file plus a JSON sidecar

inline void write_dataset(const AlignedDataset& ds, const std::filesystem::path& csv_path,
                          const std::filesystem::path& json_path, const std::vector<std::string>& log = {}) {
    ds.check();
    const bool timed = !ds.timestamps.empty();
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw InputError("cannot write '" + csv_path.string() + "'");
        if (timed) out << "timestamp,";
        for (const auto& v : ds.variables) out << v << ',';
        out << ds.response_name << '\n';
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            if (timed) out << format_iso_utc(ds.timestamps[r]) << ',';
            for (const auto& col : ds.columns) out << format_number(col[r]) << ',';
            out << format_number(ds.response[r]) << '\n';
        }
    }
    nlohmann::json j;
    j["variables"] = ds.variables;
    j["response"] = ds.response_name;
    j["rows"] = ds.rows();
    j["timestamped"] = timed;
    auto& ranges = j["ranges"] = nlohmann::json::array();
    for (const auto& r : ds.ranges) ranges.push_back({r.lo, r.hi});
    j["drop_log"] = log;
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + json_path.string() + "'");
    out << j.dump(2) << '\n';
}

inline AlignedDataset read_dataset(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
    std::ifstream js(json_path);
    if (!js) throw InputError("cannot read '" + json_path.string() + "'");
    nlohmann::json j;
    try {
        js >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(json_path.string() + ": " + e.what());
    }
    AlignedDataset ds;
    ds.variables = j.at("variables").get<std::vector<std::string>>();
    ds.response_name = j.at("response").get<std::string>();
    const bool timed = j.value("timestamped", false);
    for (const auto& r : j.at("ranges")) ds.ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>(), false});

    std::ifstream in(csv_path);
    if (!in) throw InputError("cannot read '" + csv_path.string() + "'");
    std::string line;
    std::getline(in, line);
    auto header = detail::split(line, ',');
    std::vector<std::string> expected;
    if (timed) expected.push_back("timestamp");
    expected.insert(expected.end(), ds.variables.begin(), ds.variables.end());
    expected.push_back(ds.response_name);
    if (header != expected) throw InputError(csv_path.string() + ": header does not match " + json_path.string());
    ds.columns.assign(ds.variables.size(), {});
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = detail::split(line, ',');
        if (cells.size() != expected.size())
            throw InputError(csv_path.string() + ": wrong field count on line " + std::to_string(line_no));
        std::size_t k = 0;
        if (timed) ds.timestamps.push_back(parse_datetime(cells[k++], 0));
        for (std::size_t v = 0; v < ds.variables.size(); ++v, ++k) {
            auto x = detail::parse_number(cells[k]);
            if (!x) throw InputError(csv_path.string() + ": bad number on line " + std::to_string(line_no));
            ds.columns[v].push_back(*x);
        }
        auto y = detail::parse_number(cells[k]);
        if (!y) throw InputError(csv_path.string() + ": bad number on line " + std::to_string(line_no));
        ds.response.push_back(*y);
    }
    ds.check();
    return ds;
}

}  // namespace pgp
