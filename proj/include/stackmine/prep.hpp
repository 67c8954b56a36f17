#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"
#include "html_split.hpp"
#include "sentences.hpp"
#include "tokens.hpp"
#include "types.hpp"

namespace stackmine {

// Question prose carries the title as its leading sentence so titles reach
// both the embedding text and the problem summaries.
inline std::string join_title_and_body(const std::string& title,
                                       const std::string& body_prose) {
    if (body_prose.empty()) return title;
    if (title.empty()) return body_prose;
    char last = title.back();
    if (last == '.' || last == '!' || last == '?') return title + " " + body_prose;
    return title + ". " + body_prose;
}

inline CleanDocument clean_post(const RawPost& post, std::int64_t doc_id,
                                const TextResources& res,
                                SurfaceMap* surfaces = nullptr) {
    CleanDocument d;
    d.doc_id = doc_id;
    d.source_post_id = post.post_id;
    SplitBody split = split_html(post.body_html);
    d.code_snippets = std::move(split.code_snippets);
    if (post.kind == PostKind::question && post.title)
        d.prose_text = join_title_and_body(*post.title, split.prose_text);
    else
        d.prose_text = std::move(split.prose_text);
    d.sentences = segment_sentences(d.prose_text);
    d.tokens = normalize_tokens(d.prose_text, res, surfaces);
    return d;
}

// The modeling corpus: one CleanDocument per question, doc_ids dense in
// corpus order. Answers are cleaned on demand at summary time.
inline std::vector<CleanDocument> prepare_documents(const std::vector<RawPost>& corpus,
                                                    const TextResources& res,
                                                    SurfaceMap* surfaces = nullptr) {
    std::vector<CleanDocument> docs;
    std::int64_t next_id = 0;
    for (const RawPost& p : corpus) {
        if (p.kind != PostKind::question) continue;
        docs.push_back(clean_post(p, next_id++, res, surfaces));
    }
    return docs;
}

}  // namespace stackmine
