#pragma once

#include <string>
#include <vector>

#include "summarize.hpp"

namespace stackmine {

namespace detail {

inline std::string md_cell(const std::vector<std::string>& sentences) {
    std::string out;
    for (const std::string& s : sentences) {
        if (!out.empty()) out += ' ';
        for (char c : s) {
            if (c == '|')
                out += "\\|";
            else if (c == '\n')
                out += ' ';
            else
                out += c;
        }
    }
    return out.empty() ? "(no prose)" : out;
}

}  // namespace detail

// One Problem/Solution table row per pair, with the pair's code fenced right
// beneath its row.
inline std::string render_topic_markdown(const TopicReport& report) {
    std::string md;
    md += "# Topic " + std::to_string(report.topic.topic_id) + ": " +
          report.topic.label + "\n\n";
    md += std::to_string(report.topic.size) + " documents, " +
          std::to_string(report.pairs.size()) + " problem/solution pairs\n\n";
    if (report.pairs.empty()) {
        md += "_No question in this topic cleared the score thresholds._\n";
        return md;
    }
    for (const ProblemSolutionPair& p : report.pairs) {
        md += "## Q" + std::to_string(p.question_id) + " (score " +
              std::to_string(p.question_score) + ") / A" +
              std::to_string(p.answer_id) +
              (p.answer_accepted ? " (accepted)"
                                 : " (score " + std::to_string(p.answer_score) + ")") +
              "\n\n";
        md += "| Problem | Solution |\n";
        md += "| --- | --- |\n";
        md += "| " + detail::md_cell(p.problem_summary) + " | " +
              detail::md_cell(p.solution_summary) + " |\n\n";
        for (const std::string& snippet : p.code_snippets) {
            md += "```\n";
            md += snippet;
            if (snippet.empty() || snippet.back() != '\n') md += '\n';
            md += "```\n\n";
        }
    }
    return md;
}

}  // namespace stackmine
