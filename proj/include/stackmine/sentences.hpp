#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace stackmine {

// Splits prose at '.', '!' or '?' followed by whitespace and an uppercase
// letter or digit. A trailing fragment without a terminator is its own
// sentence. Offsets are byte indices into the input (== character indices
// for ASCII text); inter-sentence whitespace belongs to no span.
inline std::vector<Sentence> segment_sentences(std::string_view prose) {
    std::vector<Sentence> out;
    const std::size_t n = prose.size();
    std::size_t start = 0;
    // skip leading whitespace
    while (start < n && std::isspace(static_cast<unsigned char>(prose[start]))) ++start;
    for (std::size_t i = start; i < n; ++i) {
        char c = prose[i];
        if (c != '.' && c != '!' && c != '?') continue;
        std::size_t j = i + 1;
        if (j >= n || !std::isspace(static_cast<unsigned char>(prose[j]))) continue;
        while (j < n && std::isspace(static_cast<unsigned char>(prose[j]))) ++j;
        if (j >= n) break;  // trailing whitespace only; handled below
        unsigned char next = static_cast<unsigned char>(prose[j]);
        if (!std::isupper(next) && !std::isdigit(next)) continue;
        out.push_back({std::string(prose.substr(start, i + 1 - start)), start, i + 1});
        start = j;
        i = j - 1;
    }
    if (start < n) {
        std::size_t end = n;
        while (end > start && std::isspace(static_cast<unsigned char>(prose[end - 1])))
            --end;
        if (end > start)
            out.push_back({std::string(prose.substr(start, end - start)), start, end});
    }
    return out;
}

}  // namespace stackmine
