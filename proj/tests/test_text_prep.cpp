#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include <stackmine/porter.hpp>
#include <stackmine/sentences.hpp>
#include <stackmine/tokens.hpp>

#include "support/fixtures.hpp"

using namespace stackmine;

namespace {

const TextResources& resources() {
    static TextResources res = TextResources::load(fixtures::resources_dir());
    return res;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

TEST_CASE("porter handles the classic rule examples") {
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("run") == "run");
    CHECK(porter_stem("running") == "run");
    CHECK(porter_stem("occurred") == "occur");
    CHECK(porter_stem("relational") == "relat");
    CHECK(porter_stem("sky") == "sky");
    CHECK(porter_stem("happy") == "happi");
    CHECK(porter_stem("controll") == "control");
    CHECK(porter_stem("at") == "at");  // two letters stay put
}

TEST_CASE("porter agrees with the reference vocabulary fixture") {
    std::ifstream in(fixtures::fixtures_dir() + "/porter_pairs.tsv");
    REQUIRE(in.good());
    std::string line;
    std::size_t checked = 0;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        std::string word = line.substr(0, tab);
        std::string want = line.substr(tab + 1);
        INFO(word);
        CHECK(porter_stem(word) == want);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("sentence segmentation matches hand-counted offsets") {
    auto s = segment_sentences("It fails. I retried.");
    REQUIRE(s.size() == 2);
    CHECK(s[0].text == "It fails.");
    CHECK(s[0].begin == 0);
    CHECK(s[0].end == 9);
    CHECK(s[1].text == "I retried.");
    CHECK(s[1].begin == 10);
    CHECK(s[1].end == 20);
}

TEST_CASE("sentence segmentation edge cases") {
    CHECK(segment_sentences("").empty());

    auto version = segment_sentences("ver 3.3.2 broke it");
    REQUIRE(version.size() == 1);
    CHECK(version[0].text == "ver 3.3.2 broke it");
    CHECK(version[0].begin == 0);
    CHECK(version[0].end == 18);

    auto trailing = segment_sentences("Build failed! 2 retries left");
    REQUIRE(trailing.size() == 2);
    CHECK(trailing[0].text == "Build failed!");
    CHECK(trailing[1].text == "2 retries left");

    auto lower = segment_sentences("it broke. then it worked");
    REQUIRE(lower.size() == 1);  // lowercase after the period: no split
}

TEST_CASE("sentence spans partition-cover the prose") {
    const std::string texts[] = {
        "It fails. I retried. Then it worked!",
        "One two three. Four? Five六 ok.",
        "  leading spaces. Trailing too.  ",
        "no terminator at all",
    };
    for (const std::string& prose : texts) {
        auto sents = segment_sentences(prose);
        // each span reproduces its slice
        for (const auto& s : sents)
            CHECK(prose.substr(s.begin, s.end - s.begin) == s.text);
        // spans plus inter-span whitespace reconstruct the trimmed prose
        std::size_t cursor = 0;
        std::string rebuilt;
        for (const auto& s : sents) {
            for (std::size_t i = cursor; i < s.begin; ++i) {
                CHECK(std::isspace(static_cast<unsigned char>(prose[i])));
                rebuilt += prose[i];
            }
            rebuilt += s.text;
            cursor = s.end;
        }
        for (std::size_t i = cursor; i < prose.size(); ++i)
            CHECK(std::isspace(static_cast<unsigned char>(prose[i])));
    }
}

TEST_CASE("normalize_tokens applies the documented pipeline") {
    CHECK(normalize_tokens("Running the Apps!", resources()) ==
          std::vector<std::string>{"run", "app"});
    CHECK(normalize_tokens("the and of", resources()).empty());
    CHECK(normalize_tokens("error 404 occurred", resources()) ==
          std::vector<std::string>{"error", "occur"});
}

TEST_CASE("normalized tokens carry no stopwords, digits or uppercase") {
    auto tokens = normalize_tokens(
        "Doing THESES tests, the 2nd build failed; mens item costs $5. "
        "Occurred while running APPS!",
        resources());
    for (const auto& t : tokens) {
        INFO(t);
        CHECK(t.size() >= 2);
        CHECK(!resources().stopwords.count(t));
        for (char ch : t) {
            CHECK(!std::isupper(static_cast<unsigned char>(ch)));
            CHECK(!std::isdigit(static_cast<unsigned char>(ch)));
            CHECK(std::isalnum(static_cast<unsigned char>(ch)));
        }
    }
}

TEST_CASE("normalization is idempotent") {
    const std::string samples[] = {
        "Running the Apps!",
        "Jenkins tries to launch tools instead of emulator",
        "configure kotlin in your project following these steps in build gradle",
        "theses mens doing going studies carried stopped libraries",
        "abilities activities analyses criteria data feet women",
    };
    for (const std::string& text : samples) {
        auto once = normalize_tokens(text, resources());
        auto twice = normalize_tokens(join(once), resources());
        INFO(text);
        CHECK(once == twice);
    }
}

TEST_CASE("idempotence holds for seeded random alphabetic words") {
    Pcg32 rng(20240809, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        int words = 1 + static_cast<int>(rng.next_below(8));
        for (int w = 0; w < words; ++w) {
            if (w) text += ' ';
            int len = 1 + static_cast<int>(rng.next_below(10));
            for (int i = 0; i < len; ++i)
                text += static_cast<char>('a' + rng.next_below(26));
        }
        auto once = normalize_tokens(text, resources());
        auto twice = normalize_tokens(join(once), resources());
        INFO(text);
        REQUIRE(once == twice);
    }
}

TEST_CASE("surface map remembers readable pre-stem forms") {
    SurfaceMap surfaces;
    normalize_tokens("gradle gradle errors building", resources(), &surfaces);
    CHECK(surfaces.surface_of("gradl") == "gradle");
    CHECK(surfaces.surface_of("error") == "error");
    CHECK(surfaces.surface_of("build") == "build");
    CHECK(surfaces.surface_of("unseen") == "unseen");
}
