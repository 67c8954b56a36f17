#pragma once

// Word-score bar panels: one panel per topic (grid of up to 4 columns),
// horizontal bars with length proportional to the c-TF-IDF weight.

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "topics.hpp"

namespace stackmine {

namespace svg_detail {

constexpr double kPanelW = 280.0;
constexpr double kPanelH = 170.0;
constexpr double kMargin = 16.0;
constexpr double kBarMax = 160.0;
constexpr double kBarH = 18.0;
constexpr double kLabelX = 96.0;

inline const char* panel_color(std::size_t i) {
    static const char* kPalette[] = {"#4c78a8", "#f58518", "#54a24b", "#e45756",
                                     "#72b7b2", "#eeca3b", "#b279a2", "#9d755d"};
    return kPalette[i % 8];
}

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace svg_detail

inline std::string render_wordscore_svg(const std::vector<WordScoreRow>& rows) {
    using namespace svg_detail;
    std::map<std::int32_t, std::vector<const WordScoreRow*>> panels;
    for (const auto& r : rows) panels[r.topic_id].push_back(&r);

    std::size_t n_panels = panels.size();
    std::size_t cols = n_panels == 0 ? 1 : std::min<std::size_t>(4, n_panels);
    std::size_t grid_rows = n_panels == 0 ? 1 : (n_panels + cols - 1) / cols;
    double width = kMargin + cols * (kPanelW + kMargin);
    double height = kMargin + grid_rows * (kPanelH + kMargin);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           format_double(width) + "\" height=\"" + format_double(height) +
           "\" viewBox=\"0 0 " + format_double(width) + " " + format_double(height) +
           "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (panels.empty()) {
        svg += "<text x=\"" + format_double(width / 2) + "\" y=\"" +
               format_double(height / 2) +
               "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#666\">"
               "no word scores to plot</text>\n";
        svg += "</svg>\n";
        return svg;
    }

    std::size_t panel_i = 0;
    for (const auto& [topic_id, bars] : panels) {
        double px = kMargin + static_cast<double>(panel_i % cols) * (kPanelW + kMargin);
        double py = kMargin + static_cast<double>(panel_i / cols) * (kPanelH + kMargin);
        const std::string& label = bars.front()->label;
        svg += "<g transform=\"translate(" + format_double(px) + "," +
               format_double(py) + ")\">\n";
        svg += "<text x=\"0\" y=\"14\" font-size=\"13\" font-weight=\"bold\">Topic " +
               std::to_string(topic_id) + "</text>\n";
        svg += "<text x=\"0\" y=\"30\" font-size=\"10\" fill=\"#555\">" +
               escape_xml(label) + "</text>\n";
        double max_w = 0.0;
        for (const auto* b : bars) max_w = std::max(max_w, b->weight);
        double scale = max_w > 0.0 ? kBarMax / max_w : 0.0;
        double y = 42.0;
        for (const auto* b : bars) {
            double len = b->weight * scale;
            svg += "<text x=\"" + format_double(kLabelX - 6) + "\" y=\"" +
                   format_double(y + kBarH - 5) +
                   "\" text-anchor=\"end\" font-size=\"11\">" + escape_xml(b->term) +
                   "</text>\n";
            svg += "<rect x=\"" + format_double(kLabelX) + "\" y=\"" +
                   format_double(y) + "\" width=\"" + format_double(len) +
                   "\" height=\"" + format_double(kBarH) + "\" fill=\"" +
                   panel_color(panel_i) + "\"/>\n";
            svg += "<text x=\"" + format_double(kLabelX + len + 4) + "\" y=\"" +
                   format_double(y + kBarH - 5) + "\" font-size=\"9\" fill=\"#555\">" +
                   format_double(b->weight) + "</text>\n";
            y += kBarH + 6.0;
        }
        svg += "</g>\n";
        ++panel_i;
    }
    svg += "</svg>\n";
    return svg;
}

inline void emit_wordscore_plot(const std::vector<WordScoreRow>& rows,
                                const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << render_wordscore_svg(rows);
    if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace stackmine
