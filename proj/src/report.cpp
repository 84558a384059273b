#include "tabcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "tabcheck/version.hpp"

namespace tabcheck {

Json sanitize_numbers(const Json& value, bool& nonfinite) {
    if (value.is_number_float()) {
        const double v = value.get<double>();
        if (!std::isfinite(v)) {
            nonfinite = true;
            return nullptr;
        }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::strtod(buf, nullptr);
    }
    if (value.is_array()) {
        Json out = Json::array();
        for (const auto& v : value) out.push_back(sanitize_numbers(v, nonfinite));
        return out;
    }
    if (value.is_object()) {
        Json out = Json::object();
        for (const auto& [k, v] : value.items()) out[k] = sanitize_numbers(v, nonfinite);
        return out;
    }
    return value;
}

namespace {

Json summary_json(const Summary& s) {
    return Json{{"passed", s.passed}, {"failed", s.failed}, {"warned", s.warned}, {"skipped", s.skipped}, {"errored", s.errored}};
}

}  // namespace

Json report_document(const SuiteResult& result) {
    Json checks = Json::array();
    for (const auto& e : result.entries) {
        bool nonfinite = false;
        Json conditions = Json::array();
        for (const auto& c : e.conditions) {
            conditions.push_back(Json{{"name", c.name}, {"status", to_string(c.status)}, {"details", c.detail}});
        }
        Json displays = Json::array();
        for (const auto& d : e.check.displays) {
            displays.push_back(Json{{"kind", to_string(d.kind)}, {"title", d.title}, {"payload", sanitize_numbers(d.payload, nonfinite)}});
        }
        Json value = sanitize_numbers(e.check.value, nonfinite);
        checks.push_back(Json{{"check_id", e.check.check_id},
                              {"category", to_string(e.check.category)},
                              {"status", to_string(e.check.status)},
                              {"message", e.check.message},
                              {"value", value},
                              {"conditions", conditions},
                              {"displays", displays},
                              {"nonfinite", nonfinite}});
    }
    const auto& m = result.metadata;
    bool meta_nonfinite = false;
    return Json{{"schema_version", kReportSchemaVersion},
                {"engine", Json{{"name", kEngineName}, {"version", kEngineVersion}}},
                {"suite", result.suite_name},
                {"metadata", Json{{"started_at", m.started_at},
                                  {"finished_at", m.finished_at},
                                  {"seed", m.seed},
                                  {"datasets", sanitize_numbers(m.datasets, meta_nonfinite)},
                                  {"notes", m.notes}}},
                {"summary", summary_json(result.summary)},
                {"checks", checks}};
}

std::string render_json(const SuiteResult& result) { return report_document(result).dump(2) + "\n"; }

namespace {

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            case '/':
                // Keeps URL schemes in user text from forming links.
                out += (i > 0 && text[i - 1] == ':') ? "&#47;" : "/";
                break;
            default: out += ch;
        }
    }
    return out;
}

std::string num(double v) {
    if (!std::isfinite(v)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string cell_text(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return num(v.get<double>());
    return v.dump();
}

std::vector<double> doubles(const Json& arr) {
    std::vector<double> out;
    for (const auto& v : arr) out.push_back(v.is_number() ? v.get<double>() : std::nan(""));
    return out;
}

const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};

struct Frame {
    double width = 640;
    double height = 260;
    double left = 56;
    double right = 16;
    double top = 16;
    double bottom = 64;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

std::string svg_open(const Frame& f) {
    return "<svg class=\"chart\" width=\"" + coord(f.width) + "\" height=\"" + coord(f.height) + "\" viewBox=\"0 0 " +
           coord(f.width) + " " + coord(f.height) + "\" role=\"img\">\n";
}

std::string axes(const Frame& f, double y_lo, double y_hi, const std::string& x_label, const std::string& y_label) {
    std::string s;
    const double x0 = f.left;
    const double y0 = f.top + f.plot_h();
    s += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(f.top) + "\" x2=\"" + coord(x0) + "\" y2=\"" + coord(y0) +
         "\" stroke=\"#333\"/>\n";
    s += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(x0 + f.plot_w()) + "\" y2=\"" +
         coord(y0) + "\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = y_lo + (y_hi - y_lo) * t / 4.0;
        const double y = y0 - f.plot_h() * t / 4.0;
        s += "<line x1=\"" + coord(x0 - 4) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(x0) + "\" y2=\"" + coord(y) +
             "\" stroke=\"#333\"/>\n";
        s += "<text x=\"" + coord(x0 - 6) + "\" y=\"" + coord(y + 4) + "\" text-anchor=\"end\" class=\"tick\">" +
             escape(num(v)) + "</text>\n";
    }
    if (!x_label.empty()) {
        s += "<text x=\"" + coord(x0 + f.plot_w() / 2) + "\" y=\"" + coord(f.height - 4) +
             "\" text-anchor=\"middle\" class=\"axis\">" + escape(x_label) + "</text>\n";
    }
    if (!y_label.empty()) {
        s += "<text x=\"12\" y=\"" + coord(f.top + f.plot_h() / 2) + "\" text-anchor=\"middle\" class=\"axis\" transform=\"rotate(-90 12 " +
             coord(f.top + f.plot_h() / 2) + ")\">" + escape(y_label) + "</text>\n";
    }
    return s;
}

std::string legend(const Frame& f, const std::vector<std::string>& names) {
    std::string s;
    double x = f.left + 8;
    for (std::size_t i = 0; i < names.size(); ++i) {
        s += "<rect x=\"" + coord(x) + "\" y=\"" + coord(f.top) + "\" width=\"10\" height=\"10\" fill=\"" +
             kPalette[i % 6] + "\" fill-opacity=\"0.7\"/>\n";
        s += "<text x=\"" + coord(x + 14) + "\" y=\"" + coord(f.top + 9) + "\" class=\"tick\">" + escape(names[i]) +
             "</text>\n";
        x += 24 + 7.0 * static_cast<double>(names[i].size());
    }
    return s;
}

std::string category_labels(const Frame& f, const std::vector<std::string>& labels) {
    std::string s;
    const std::size_t n = labels.size();
    if (n == 0) return s;
    const double slot = f.plot_w() / static_cast<double>(n);
    const std::size_t stride = std::max<std::size_t>(1, n / 20 + (n % 20 ? 1 : 0));
    for (std::size_t i = 0; i < n; i += stride) {
        const double x = f.left + slot * (static_cast<double>(i) + 0.5);
        const double y = f.top + f.plot_h() + 12;
        std::string text = labels[i].size() > 18 ? labels[i].substr(0, 17) + "~" : labels[i];
        s += "<text x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" text-anchor=\"end\" class=\"tick\" transform=\"rotate(-35 " +
             coord(x) + " " + coord(y) + ")\">" + escape(text) + "</text>\n";
    }
    return s;
}

std::string bar_chart(const std::vector<std::string>& labels, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                      bool overlay) {
    Frame f;
    double hi = 0.0;
    double lo = 0.0;
    for (const auto& [name, values] : series) {
        for (double v : values) {
            if (!std::isfinite(v)) continue;
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
    }
    if (hi == lo) hi = lo + 1.0;
    std::string s = svg_open(f) + axes(f, lo, hi, "", "");
    const std::size_t n = labels.size();
    const double slot = n ? f.plot_w() / static_cast<double>(n) : f.plot_w();
    const std::size_t k = std::max<std::size_t>(1, series.size());
    auto y_of = [&](double v) { return f.top + f.plot_h() * (hi - v) / (hi - lo); };
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& values = series[si].second;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = values[i];
            if (!std::isfinite(v)) continue;
            const double w = overlay ? slot * 0.9 : slot * 0.9 / static_cast<double>(k);
            const double x = f.left + slot * static_cast<double>(i) + slot * 0.05 + (overlay ? 0.0 : w * static_cast<double>(si));
            const double y1 = y_of(std::max(v, 0.0));
            const double y2 = y_of(std::min(v, 0.0));
            s += "<rect x=\"" + coord(x) + "\" y=\"" + coord(y1) + "\" width=\"" + coord(w) + "\" height=\"" +
                 coord(std::max(y2 - y1, 0.0)) + "\" fill=\"" + kPalette[si % 6] + "\" fill-opacity=\"" +
                 (overlay ? "0.5" : "0.8") + "\"><title>" + escape(labels[i] + ": " + num(v)) + "</title></rect>\n";
        }
    }
    std::vector<std::string> names;
    for (const auto& [name, values] : series) names.push_back(name);
    s += category_labels(f, labels) + legend(f, names) + "</svg>\n";
    return s;
}

std::string line_chart(const std::vector<double>& x, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                       const std::string& x_label, const std::string& y_label) {
    Frame f;
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;
    bool first = true;
    for (double v : x) {
        if (!std::isfinite(v)) continue;
        if (first) {
            x_lo = x_hi = v;
            first = false;
        }
        x_lo = std::min(x_lo, v);
        x_hi = std::max(x_hi, v);
    }
    first = true;
    for (const auto& [name, values] : series) {
        for (double v : values) {
            if (!std::isfinite(v)) continue;
            if (first) {
                y_lo = y_hi = v;
                first = false;
            }
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    std::string s = svg_open(f) + axes(f, y_lo, y_hi, x_label, y_label);
    s += "<text x=\"" + coord(f.left) + "\" y=\"" + coord(f.top + f.plot_h() + 14) + "\" class=\"tick\">" + escape(num(x_lo)) + "</text>\n";
    s += "<text x=\"" + coord(f.left + f.plot_w()) + "\" y=\"" + coord(f.top + f.plot_h() + 14) +
         "\" text-anchor=\"end\" class=\"tick\">" + escape(num(x_hi)) + "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        std::string points;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double v = series[si].second[i];
            if (!std::isfinite(v) || !std::isfinite(x[i])) continue;
            const double px = f.left + f.plot_w() * (x[i] - x_lo) / (x_hi - x_lo);
            const double py = f.top + f.plot_h() * (y_hi - v) / (y_hi - y_lo);
            points += coord(px) + "," + coord(py) + " ";
            s += "<circle cx=\"" + coord(px) + "\" cy=\"" + coord(py) + "\" r=\"2.5\" fill=\"" + kPalette[si % 6] + "\"/>\n";
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[si % 6]) + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    }
    std::vector<std::string> names;
    for (const auto& [name, values] : series) names.push_back(name);
    s += legend(f, names) + "</svg>\n";
    return s;
}

std::vector<std::pair<std::string, std::vector<double>>> series_of(const Json& arr) {
    std::vector<std::pair<std::string, std::vector<double>>> out;
    for (const auto& s : arr) out.emplace_back(s.at("name").get<std::string>(), doubles(s.at("values")));
    return out;
}

std::string render_display(const DisplayItem& d) {
    std::string s = "<figure class=\"display\">\n<figcaption>" + escape(d.title) + "</figcaption>\n";
    const Json& p = d.payload;
    switch (d.kind) {
        case DisplayKind::Table: {
            const auto& rows = p.at("rows");
            if (rows.empty()) {
                s += "<p class=\"empty\">(no rows)</p>\n";
                break;
            }
            s += "<table class=\"data\">\n<tr>";
            for (const auto& c : p.at("columns")) s += "<th>" + escape(c.get<std::string>()) + "</th>";
            s += "</tr>\n";
            for (const auto& row : rows) {
                s += "<tr>";
                for (const auto& cell : row) s += "<td>" + escape(cell_text(cell)) + "</td>";
                s += "</tr>\n";
            }
            s += "</table>\n";
            break;
        }
        case DisplayKind::BarSeries:
            s += bar_chart(p.at("labels").get<std::vector<std::string>>(), series_of(p.at("series")), false);
            break;
        case DisplayKind::LineSeries:
            s += line_chart(doubles(p.at("x")), series_of(p.at("series")), p.at("x_label").get<std::string>(),
                            p.at("y_label").get<std::string>());
            break;
        case DisplayKind::HistogramPair:
            s += "<p class=\"score\">" + escape(p.at("method").get<std::string>()) + " score: " +
                 escape(p.at("score").is_number() ? num(p.at("score").get<double>()) : "n/a") + "</p>\n";
            s += bar_chart(p.at("bins").get<std::vector<std::string>>(),
                           {{"reference (train)", doubles(p.at("reference"))}, {"current (test)", doubles(p.at("current"))}}, true);
            break;
        case DisplayKind::Text:
            s += "<pre>" + escape(p.at("text").get<std::string>()) + "</pre>\n";
            break;
    }
    return s + "</figure>\n";
}

std::string badge(std::string_view status) {
    return "<span class=\"badge " + std::string(status) + "\">" + escape(status) + "</span>";
}

std::string overall_status(const SuiteEntryResult& e) {
    if (e.check.status != CheckStatus::Ran) return std::string(to_string(e.check.status));
    bool warned = false;
    for (const auto& c : e.conditions) {
        if (c.status == ConditionStatus::Fail) return "fail";
        if (c.status == ConditionStatus::Warning) warned = true;
    }
    return warned ? "warning" : "pass";
}

constexpr const char* kStyle = R"(body{font-family:system-ui,sans-serif;margin:24px;color:#222;max-width:1100px}
h1{font-size:22px}h2{font-size:17px;margin:0}
.summary span{margin-right:16px;font-weight:600}
section.check{border:1px solid #ddd;border-radius:6px;padding:12px 16px;margin:14px 0}
.meta{color:#666;font-size:13px}
.badge{display:inline-block;padding:1px 8px;border-radius:10px;font-size:12px;color:#fff;margin-left:8px}
.badge.pass{background:#2e7d32}.badge.fail{background:#c62828}.badge.warning{background:#ef8f00}
.badge.skipped{background:#757575}.badge.errored{background:#6a1b9a}
table{border-collapse:collapse;margin:6px 0;font-size:13px}
td,th{border:1px solid #ccc;padding:3px 8px;text-align:left}
th{background:#f3f3f3}
figure{margin:10px 0}figcaption{font-weight:600;font-size:14px;margin-bottom:4px}
.tick{font-size:10px;fill:#333}.axis{font-size:11px;fill:#333}
pre{background:#f6f6f6;padding:8px;white-space:pre-wrap}
.message{white-space:pre-wrap}
)";

}  // namespace

std::string render_html(const SuiteResult& result) {
    const auto& s = result.summary;
    const auto& m = result.metadata;
    std::string h = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
                    escape(std::string(kEngineName) + " report: " + result.suite_name) + "</title>\n<style>\n" + kStyle +
                    "</style>\n</head>\n<body>\n";
    h += "<h1>Suite " + escape(result.suite_name) + "</h1>\n";
    h += "<p class=\"meta\">" + escape(std::string(kEngineName) + " " + kEngineVersion + " | started " + m.started_at +
                                       " | finished " + m.finished_at + " | seed " + std::to_string(m.seed)) + "</p>\n";
    h += "<p class=\"summary\"><span>passed: " + std::to_string(s.passed) + "</span><span>failed: " + std::to_string(s.failed) +
         "</span><span>warned: " + std::to_string(s.warned) + "</span><span>skipped: " + std::to_string(s.skipped) +
         "</span><span>errored: " + std::to_string(s.errored) + "</span></p>\n";
    if (m.datasets.is_object() && !m.datasets.empty()) {
        h += "<table class=\"datasets\">\n<tr><th>split</th><th>source</th><th>rows</th><th>sha256</th></tr>\n";
        for (const auto& [split, d] : m.datasets.items()) {
            h += "<tr><td>" + escape(split) + "</td><td>" + escape(d.value("source", "")) + "</td><td>" +
                 escape(cell_text(d.value("rows", Json(nullptr)))) + "</td><td>" + escape(d.value("sha256", "")) +
                 "</td></tr>\n";
        }
        h += "</table>\n";
    }
    for (const auto& note : m.notes) h += "<p class=\"meta\">" + escape(note) + "</p>\n";

    h += "<h2>Overview</h2>\n<table class=\"overview\">\n<tr><th>check</th><th>category</th><th>result</th></tr>\n";
    for (const auto& e : result.entries) {
        h += "<tr><td><a href=\"#" + escape(e.check.check_id) + "\">" + escape(e.check.check_id) + "</a></td><td>" +
             escape(to_string(e.check.category)) + "</td><td>" + badge(overall_status(e)) + "</td></tr>\n";
    }
    h += "</table>\n";

    for (const auto& e : result.entries) {
        h += "<section class=\"check\" id=\"" + escape(e.check.check_id) + "\">\n<h2>" + escape(e.check.check_id) +
             badge(overall_status(e)) + "</h2>\n";
        h += "<p class=\"meta\">" + escape(to_string(e.check.category)) + " | " + escape(to_string(e.check.status)) + "</p>\n";
        if (!e.check.message.empty()) h += "<p class=\"message\">" + escape(e.check.message) + "</p>\n";
        if (!e.conditions.empty()) {
            h += "<table class=\"conditions\">\n<tr><th>condition</th><th>status</th><th>details</th></tr>\n";
            for (const auto& c : e.conditions) {
                h += "<tr><td>" + escape(c.name) + "</td><td>" + badge(to_string(c.status)) + "</td><td>" + escape(c.detail) +
                     "</td></tr>\n";
            }
            h += "</table>\n";
        }
        for (const auto& d : e.check.displays) h += render_display(d);
        h += "</section>\n";
    }
    h += "</body>\n</html>\n";
    return h;
}

}  // namespace tabcheck
