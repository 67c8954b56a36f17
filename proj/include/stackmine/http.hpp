#pragma once

// httplib-backed pieces: the remote embedding protocol and the Stack Exchange
// API v2.3 client. Kept in one header so numeric translation units do not pay
// for the HTTP stack.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "corpus.hpp"
#include "embed.hpp"
#include "types.hpp"

namespace stackmine {

namespace detail {

inline void default_sleep(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

inline void run_sleeper(const std::function<void(double)>& sleeper, double seconds) {
    if (seconds <= 0) return;
    if (sleeper)
        sleeper(seconds);
    else
        default_sleep(seconds);
}

}  // namespace detail

// POST <endpoint>/embed  {"texts": [...]} -> {"vectors": [[...], ...]}
inline std::vector<std::vector<double>> remote_embed_texts(
    const std::vector<std::string>& texts, const EmbeddingProviderConfig& cfg) {
    httplib::Client client(cfg.endpoint);
    client.set_read_timeout(30, 0);
    nlohmann::json body{{"texts", texts}};
    std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0)
            detail::run_sleeper(cfg.sleeper, std::ldexp(1.0, attempt - 1));
        auto res = client.Post("/embed", payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw std::runtime_error("embed endpoint returned HTTP " +
                                     std::to_string(res->status));
        auto j = nlohmann::json::parse(res->body);
        return j.at("vectors").get<std::vector<std::vector<double>>>();
    }
    throw std::runtime_error("embed endpoint unreachable after " +
                             std::to_string(cfg.max_retries + 1) + " attempts (" +
                             last_error + ")");
}

struct ApiClientConfig {
    std::string base_url = "https://api.stackexchange.com";
    std::string site = "stackoverflow";
    std::size_t page_size = 100;
    int max_retries = 4;
    std::function<void(double)> sleeper;  // test seam; real sleep when unset
    std::string resume_path;              // where to persist a quota cursor
};

struct FetchResult {
    std::vector<RawPost> posts;
    bool complete = false;
    std::size_t requests_made = 0;
    std::string error;                // non-empty when the stream aborted
    std::optional<int> resume_page;   // set on quota exhaustion
};

namespace detail {

struct ApiPage {
    nlohmann::json body;
    bool ok = false;
    std::string error;
};

inline ApiPage api_get(httplib::Client& client, const std::string& path,
                       const ApiClientConfig& cfg, std::size_t& requests) {
    ApiPage page;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) run_sleeper(cfg.sleeper, std::ldexp(1.0, attempt - 1));
        ++requests;
        auto res = client.Get(path);
        if (!res) {
            page.error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            page.error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            page.error = "HTTP " + std::to_string(res->status);
            return page;
        }
        try {
            page.body = nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
            page.error = std::string("bad JSON: ") + e.what();
            return page;
        }
        page.ok = true;
        return page;
    }
    return page;
}

inline RawPost question_from_api(const nlohmann::json& item) {
    RawPost p;
    p.kind = PostKind::question;
    p.post_id = item.at("question_id").get<std::int64_t>();
    if (item.contains("title")) p.title = item["title"].get<std::string>();
    if (item.contains("body")) p.body_html = item["body"].get<std::string>();
    if (item.contains("tags"))
        for (auto& t : item["tags"]) {
            std::string tag = t.get<std::string>();
            for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            p.tags.push_back(tag);
        }
    p.score = item.value("score", 0);
    if (item.contains("accepted_answer_id"))
        p.accepted_answer_id = item["accepted_answer_id"].get<std::int64_t>();
    p.created_at = item.value("creation_date", std::int64_t{0});
    return p;
}

inline RawPost answer_from_api(const nlohmann::json& item) {
    RawPost p;
    p.kind = PostKind::answer;
    p.post_id = item.at("answer_id").get<std::int64_t>();
    p.parent_id = item.at("question_id").get<std::int64_t>();
    if (item.contains("body")) p.body_html = item["body"].get<std::string>();
    p.score = item.value("score", 0);
    p.created_at = item.value("creation_date", std::int64_t{0});
    return p;
}

}  // namespace detail

// Pages through /2.3/questions for the tag and window, then fetches answers
// for the retained questions. Honors the per-response `backoff` field, stops
// cleanly with a resume cursor when the quota runs out, and aborts with the
// partial corpus flagged after exhausting retries.
inline FetchResult fetch_api_pages(const std::string& tag, const DateWindow& window,
                                   const ApiClientConfig& cfg) {
    FetchResult out;
    httplib::Client client(cfg.base_url);
    client.set_read_timeout(30, 0);

    auto persist_cursor = [&](int page) {
        if (cfg.resume_path.empty()) return;
        nlohmann::json cur{{"tag", tag},
                           {"from", window.from},
                           {"to", window.to},
                           {"next_page", page}};
        std::ofstream f(cfg.resume_path, std::ios::binary);
        f << cur.dump(2) << '\n';
    };

    std::vector<std::int64_t> question_ids;
    for (int page = 1;; ++page) {
        std::ostringstream path;
        path << "/2.3/questions?order=asc&sort=creation&tagged=" << tag
             << "&fromdate=" << window.from << "&todate=" << window.to
             << "&page=" << page << "&pagesize=" << cfg.page_size
             << "&site=" << cfg.site << "&filter=withbody";
        auto res = detail::api_get(client, path.str(), cfg, out.requests_made);
        if (!res.ok) {
            out.error = "question page " + std::to_string(page) + ": " + res.error;
            return out;
        }
        for (const auto& item : res.body.value("items", nlohmann::json::array())) {
            RawPost q = detail::question_from_api(item);
            question_ids.push_back(q.post_id);
            out.posts.push_back(std::move(q));
        }
        if (res.body.value("quota_remaining", 1) <= 0) {
            out.resume_page = page + 1;
            persist_cursor(page + 1);
            out.error = "quota exhausted";
            return out;
        }
        double backoff = res.body.value("backoff", 0.0);
        if (backoff > 0) detail::run_sleeper(cfg.sleeper, backoff);
        if (!res.body.value("has_more", false)) break;
    }

    // answers for retained questions, batched ids
    constexpr std::size_t kIdsPerRequest = 100;
    for (std::size_t start = 0; start < question_ids.size(); start += kIdsPerRequest) {
        std::size_t stop = std::min(question_ids.size(), start + kIdsPerRequest);
        std::ostringstream ids;
        for (std::size_t i = start; i < stop; ++i) {
            if (i > start) ids << ';';
            ids << question_ids[i];
        }
        for (int page = 1;; ++page) {
            std::ostringstream path;
            path << "/2.3/questions/" << ids.str()
                 << "/answers?order=asc&sort=creation&page=" << page
                 << "&pagesize=" << cfg.page_size << "&site=" << cfg.site
                 << "&filter=withbody";
            auto res = detail::api_get(client, path.str(), cfg, out.requests_made);
            if (!res.ok) {
                out.error = "answer page " + std::to_string(page) + ": " + res.error;
                return out;
            }
            for (const auto& item : res.body.value("items", nlohmann::json::array()))
                out.posts.push_back(detail::answer_from_api(item));
            double backoff = res.body.value("backoff", 0.0);
            if (backoff > 0) detail::run_sleeper(cfg.sleeper, backoff);
            if (!res.body.value("has_more", false)) break;
        }
    }
    out.complete = true;
    return out;
}

}  // namespace stackmine
