#pragma once

// The classic Porter stemming algorithm: five measure-based suffix-stripping
// steps, longest matching suffix per step. Follows the maintained reference
// (words of length <= 2 are left alone, bli/logi rules in step 2).

#include <array>
#include <string>
#include <string_view>

namespace stackmine {

namespace porter_detail {

struct Stemmer {
    std::string b;
    int k = 0;  // index of last letter
    int j = 0;  // suffix boundary set by ends()

    bool cons(int i) const {
        switch (b[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // number of VC sequences in b[0..j]
    int measure() const {
        int n = 0, i = 0;
        for (;;) {
            if (i > j) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(int i) const {
        if (i < 1) return false;
        if (b[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i - 1)])
            return false;
        return cons(i);
    }

    // consonant-vowel-consonant ending at i, last consonant not w/x/y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char c = b[static_cast<std::size_t>(i)];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool peek(std::string_view s) const {
        int len = static_cast<int>(s.size());
        if (len > k + 1) return false;
        return std::string_view(b).substr(static_cast<std::size_t>(k - len + 1),
                                          static_cast<std::size_t>(len)) == s;
    }

    bool ends(std::string_view s) {
        if (!peek(s)) return false;
        j = k - static_cast<int>(s.size());
        return true;
    }

    void set_to(std::string_view s) {
        b.replace(static_cast<std::size_t>(j + 1), std::string::npos, s);
        k = j + static_cast<int>(s.size());
        b.resize(static_cast<std::size_t>(k + 1));
    }

    void replace_if_measure(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    void step1ab() {
        if (b[static_cast<std::size_t>(k)] == 's') {
            if (ends("sses")) k -= 2;
            else if (ends("ies")) set_to("i");
            else if (b[static_cast<std::size_t>(k - 1)] != 's') --k;
        }
        if (ends("eed")) {
            if (measure() > 0) --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            if (ends("at")) set_to("ate");
            else if (ends("bl")) set_to("ble");
            else if (ends("iz")) set_to("ize");
            else if (double_cons(k)) {
                --k;
                char c = b[static_cast<std::size_t>(k)];
                if (c == 'l' || c == 's' || c == 'z') ++k;
            } else {
                j = k;
                if (measure() == 1 && cvc(k)) set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b[static_cast<std::size_t>(k)] = 'i';
    }

    template <std::size_t N>
    void apply_longest(const std::array<std::pair<std::string_view, std::string_view>, N>& rules) {
        std::string_view best_from, best_to;
        for (const auto& [from, to] : rules) {
            if (from.size() > best_from.size() && peek(from)) {
                best_from = from;
                best_to = to;
            }
        }
        if (!best_from.empty() && ends(best_from)) replace_if_measure(best_to);
    }

    void step2() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 21> rules{{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
            {"anci", "ance"},   {"izer", "ize"},    {"bli", "ble"},
            {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
            {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
            {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
            {"iviti", "ive"},   {"biliti", "ble"},  {"logi", "log"},
        }};
        apply_longest(rules);
    }

    void step3() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> rules{{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        }};
        apply_longest(rules);
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes{
            "al",  "ance", "ence", "er",    "ic",   "able", "ible",
            "ant", "ement", "ment", "ent",  "ion",  "ou",   "ism",
            "ate", "iti",  "ous",  "ive",   "ize",
        };
        std::string_view best;
        for (std::string_view s : suffixes)
            if (s.size() > best.size() && peek(s)) best = s;
        if (best.empty() || !ends(best)) return;
        bool ok = measure() > 1;
        if (best == "ion") {
            char c = j >= 0 ? b[static_cast<std::size_t>(j)] : '\0';
            ok = ok && (c == 's' || c == 't');
        }
        if (ok) {
            k = j;
            b.resize(static_cast<std::size_t>(k + 1));
        }
    }

    void step5() {
        j = k;
        if (b[static_cast<std::size_t>(k)] == 'e') {
            int a = measure();
            if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
        }
        if (b[static_cast<std::size_t>(k)] == 'l' && double_cons(k)) {
            j = k;
            if (measure() > 1) --k;
        }
        b.resize(static_cast<std::size_t>(k + 1));
    }
};

}  // namespace porter_detail

// pre: word is lowercase ASCII letters
inline std::string porter_stem(std::string_view word) {
    if (word.size() <= 2) return std::string(word);
    porter_detail::Stemmer st;
    st.b = std::string(word);
    st.k = static_cast<int>(word.size()) - 1;
    st.step1ab();
    st.step1c();
    st.step2();
    st.step3();
    st.step4();
    st.step5();
    return st.b;
}

}  // namespace stackmine
