#pragma once

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "embed.hpp"
#include "hdbscan.hpp"
#include "http.hpp"
#include "matrix.hpp"
#include "pca.hpp"
#include "prep.hpp"
#include "report_md.hpp"
#include "summarize.hpp"
#include "svg.hpp"
#include "topics.hpp"
#include "types.hpp"
#include "umap.hpp"
#include "xml_dump.hpp"

namespace stackmine {

enum class Stage { ingest, prep, embed, reduce, cluster, topics, summarize, report };

inline const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> kOrder = {
        Stage::ingest, Stage::prep,   Stage::embed,     Stage::reduce,
        Stage::cluster, Stage::topics, Stage::summarize, Stage::report};
    return kOrder;
}

inline std::string to_string(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::prep: return "prep";
        case Stage::embed: return "embed";
        case Stage::reduce: return "reduce";
        case Stage::cluster: return "cluster";
        case Stage::topics: return "topics";
        case Stage::summarize: return "summarize";
        case Stage::report: return "report";
    }
    return "?";
}

inline Stage stage_from_string(const std::string& s) {
    for (Stage st : all_stages())
        if (to_string(st) == s) return st;
    throw std::runtime_error("unknown stage: " + s);
}

struct PipelineConfig {
    std::string dump_path;
    std::string out_dir = "out";
    std::string resources_dir = "resources";
    std::string source = "dump";  // dump | api
    std::string api_base = "https://api.stackexchange.com";
    std::string api_site = "stackoverflow";
    std::string tag = "android";
    std::string from = "2009-01-01";
    std::string to = "2023-04-30";
    std::string reducer = "umap";        // umap | pca (deterministic fallback)
    std::string cluster_space = "reduced";  // reduced | original
    EmbeddingProviderConfig provider;
    UmapParams umap;
    HdbscanParams hdbscan;
    int q_min = 3;
    int a_min = 2;
    std::size_t max_pairs = 5;
    std::size_t snippet_byte_cap = 2048;
    std::size_t top_n_topics = 12;
    std::size_t top_k_terms = 5;
    std::uint64_t seed = 1;  // fixed default; never derived from the clock

    DateWindow window() const { return {parse_utc(from), parse_utc(to) + 86399}; }

    std::string artifact(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }
};

inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        if (p.contains("dump")) c.dump_path = p.at("dump").get<std::string>();
        if (p.contains("out")) c.out_dir = p.at("out").get<std::string>();
        if (p.contains("resources")) c.resources_dir = p.at("resources").get<std::string>();
    }
    get("source", c.source);
    get("api_base", c.api_base);
    get("api_site", c.api_site);
    get("tag", c.tag);
    get("from", c.from);
    get("to", c.to);
    get("reducer", c.reducer);
    get("cluster_space", c.cluster_space);
    if (j.contains("provider")) {
        const auto& p = j.at("provider");
        if (p.contains("kind"))
            c.provider.kind = embedder_kind_from_string(p.at("kind").get<std::string>());
        if (p.contains("dim")) c.provider.dim = p.at("dim").get<std::size_t>();
        if (p.contains("endpoint")) c.provider.endpoint = p.at("endpoint").get<std::string>();
        if (p.contains("vectors_path"))
            c.provider.vectors_path = p.at("vectors_path").get<std::string>();
        if (p.contains("batch_size"))
            c.provider.batch_size = p.at("batch_size").get<std::size_t>();
    }
    if (j.contains("umap")) {
        const auto& u = j.at("umap");
        if (u.contains("n_neighbors")) c.umap.n_neighbors = u.at("n_neighbors").get<std::size_t>();
        if (u.contains("min_dist")) c.umap.min_dist = u.at("min_dist").get<double>();
        if (u.contains("dim_out")) c.umap.dim_out = u.at("dim_out").get<std::size_t>();
        if (u.contains("n_epochs")) c.umap.n_epochs = u.at("n_epochs").get<std::size_t>();
        if (u.contains("negative_sample_rate"))
            c.umap.negative_sample_rate = u.at("negative_sample_rate").get<std::size_t>();
    }
    if (j.contains("hdbscan")) {
        const auto& h = j.at("hdbscan");
        if (h.contains("min_cluster_size"))
            c.hdbscan.min_cluster_size = h.at("min_cluster_size").get<std::size_t>();
        if (h.contains("min_samples"))
            c.hdbscan.min_samples = h.at("min_samples").get<std::size_t>();
    }
    get("q_min", c.q_min);
    get("a_min", c.a_min);
    get("max_pairs", c.max_pairs);
    get("snippet_byte_cap", c.snippet_byte_cap);
    get("top_n_topics", c.top_n_topics);
    get("top_k_terms", c.top_k_terms);
    get("seed", c.seed);
}

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
    j = nlohmann::json{
        {"paths", {{"dump", c.dump_path}, {"out", c.out_dir}, {"resources", c.resources_dir}}},
        {"source", c.source},
        {"api_base", c.api_base},
        {"api_site", c.api_site},
        {"tag", c.tag},
        {"from", c.from},
        {"to", c.to},
        {"reducer", c.reducer},
        {"cluster_space", c.cluster_space},
        {"provider",
         {{"kind", to_string(c.provider.kind)},
          {"dim", c.provider.dim},
          {"endpoint", c.provider.endpoint},
          {"vectors_path", c.provider.vectors_path},
          {"batch_size", c.provider.batch_size}}},
        {"umap",
         {{"n_neighbors", c.umap.n_neighbors},
          {"min_dist", c.umap.min_dist},
          {"dim_out", c.umap.dim_out},
          {"n_epochs", c.umap.n_epochs},
          {"negative_sample_rate", c.umap.negative_sample_rate}}},
        {"hdbscan",
         {{"min_cluster_size", c.hdbscan.min_cluster_size},
          {"min_samples", c.hdbscan.min_samples}}},
        {"q_min", c.q_min},
        {"a_min", c.a_min},
        {"max_pairs", c.max_pairs},
        {"snippet_byte_cap", c.snippet_byte_cap},
        {"top_n_topics", c.top_n_topics},
        {"top_k_terms", c.top_k_terms},
        {"seed", c.seed}};
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    return j.get<PipelineConfig>();
}

// ---- atomic writes and hashing ----

inline void atomic_write_text(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

// writer(tmp_path) then rename over the target
inline void atomic_write_with(const std::string& path,
                              const std::function<void(const std::string&)>& writer) {
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    writer(tmp);
    std::filesystem::rename(tmp, path);
}

inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

inline std::string json_hash(const nlohmann::json& j) {
    std::string s = j.dump();
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s)));
    return hex;
}

// ---- single pipeline instance per workdir ----

class WorkdirLock {
public:
    explicit WorkdirLock(const std::string& dir)
        : path_((std::filesystem::path(dir) / ".lock").string()) {
        std::filesystem::create_directories(dir);
        for (int attempt = 0; attempt < 2; ++attempt) {
            int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd >= 0) {
                std::string pid = std::to_string(::getpid()) + "\n";
                [[maybe_unused]] auto ignored = ::write(fd, pid.c_str(), pid.size());
                ::close(fd);
                held_ = true;
                return;
            }
            // stale lock from a dead process is reclaimable
            std::ifstream in(path_);
            long pid = 0;
            in >> pid;
            if (pid > 0 && ::kill(static_cast<pid_t>(pid), 0) == 0 &&
                pid != static_cast<long>(::getpid()))
                throw std::runtime_error("workdir locked by pid " + std::to_string(pid) +
                                         " (" + path_ + ")");
            std::filesystem::remove(path_);
        }
        throw std::runtime_error("cannot acquire lock " + path_);
    }

    ~WorkdirLock() {
        if (held_) std::filesystem::remove(path_);
    }

    WorkdirLock(const WorkdirLock&) = delete;
    WorkdirLock& operator=(const WorkdirLock&) = delete;

private:
    std::string path_;
    bool held_ = false;
};

// ---- per-stage inputs/outputs and the cache manifest ----

struct StageIO {
    std::vector<std::string> inputs;   // files that must exist
    std::vector<std::string> outputs;  // files the stage writes
    nlohmann::json config_slice;
    // artifact -> producing stage, for "run X first" diagnostics
    std::map<std::string, Stage> producers;
};

inline StageIO stage_io(Stage stage, const PipelineConfig& c) {
    StageIO io;
    auto art = [&](const char* name) { return c.artifact(name); };
    io.producers[art("corpus.ndjson")] = Stage::ingest;
    io.producers[art("docs.ndjson")] = Stage::prep;
    io.producers[art("surface_forms.tsv")] = Stage::prep;
    io.producers[art("embeddings.txt")] = Stage::embed;
    io.producers[art("reduced.txt")] = Stage::reduce;
    io.producers[art("assignment.tsv")] = Stage::cluster;
    io.producers[art("topics.json")] = Stage::topics;
    io.producers[art("wordscores.csv")] = Stage::topics;

    switch (stage) {
        case Stage::ingest:
            if (c.source == "dump") io.inputs = {c.dump_path};
            io.outputs = {art("corpus.ndjson"), art("ingest_errors.log")};
            io.config_slice = {{"source", c.source}, {"tag", c.tag},
                               {"from", c.from},     {"to", c.to},
                               {"dump", c.dump_path}, {"api_base", c.api_base},
                               {"api_site", c.api_site}};
            break;
        case Stage::prep:
            io.inputs = {art("corpus.ndjson"), c.resources_dir + "/stopwords.txt",
                         c.resources_dir + "/lemmas.tsv"};
            io.outputs = {art("docs.ndjson"), art("surface_forms.tsv")};
            io.config_slice = {{"resources", c.resources_dir}};
            break;
        case Stage::embed:
            io.inputs = {art("docs.ndjson")};
            if (c.provider.kind == EmbedderKind::precomputed_file)
                io.inputs.push_back(c.provider.vectors_path);
            io.outputs = {art("embeddings.txt")};
            io.config_slice = {{"kind", to_string(c.provider.kind)},
                               {"dim", c.provider.dim},
                               {"endpoint", c.provider.endpoint},
                               {"vectors_path", c.provider.vectors_path},
                               {"batch_size", c.provider.batch_size}};
            break;
        case Stage::reduce:
            io.inputs = {art("embeddings.txt")};
            io.outputs = {art("reduced.txt")};
            io.config_slice = {{"reducer", c.reducer},
                               {"n_neighbors", c.umap.n_neighbors},
                               {"min_dist", c.umap.min_dist},
                               {"dim_out", c.umap.dim_out},
                               {"n_epochs", c.umap.n_epochs},
                               {"negative_sample_rate", c.umap.negative_sample_rate},
                               {"seed", c.seed}};
            break;
        case Stage::cluster:
            io.inputs = {c.cluster_space == "original" ? art("embeddings.txt")
                                                       : art("reduced.txt")};
            io.outputs = {art("assignment.tsv")};
            io.config_slice = {{"min_cluster_size", c.hdbscan.min_cluster_size},
                               {"min_samples", c.hdbscan.min_samples},
                               {"cluster_space", c.cluster_space}};
            break;
        case Stage::topics:
            io.inputs = {art("docs.ndjson"), art("assignment.tsv"),
                         art("surface_forms.tsv")};
            io.outputs = {art("topics.json"), art("wordscores.csv")};
            io.config_slice = {{"top_n_topics", c.top_n_topics},
                               {"top_k_terms", c.top_k_terms}};
            break;
        case Stage::summarize:
            io.inputs = {art("corpus.ndjson"), art("docs.ndjson"), art("topics.json")};
            io.outputs = {};  // reports/, enumerated after the run
            io.config_slice = {{"q_min", c.q_min},
                               {"a_min", c.a_min},
                               {"max_pairs", c.max_pairs},
                               {"snippet_byte_cap", c.snippet_byte_cap},
                               {"seed", c.seed},
                               {"kind", to_string(c.provider.kind)},
                               {"dim", c.provider.dim},
                               {"endpoint", c.provider.endpoint}};
            break;
        case Stage::report:
            io.inputs = {art("wordscores.csv")};
            io.outputs = {art("wordscores.svg")};
            io.config_slice = nlohmann::json::object();
            break;
    }
    return io;
}

struct StageResult {
    Stage stage = Stage::ingest;
    bool cache_hit = false;
    nlohmann::json counters;
};

namespace detail {

inline void require_inputs(const StageIO& io, Stage stage) {
    for (const std::string& path : io.inputs) {
        if (std::filesystem::exists(path)) continue;
        auto it = io.producers.find(path);
        if (it != io.producers.end())
            throw std::runtime_error("missing " + path + ": run stage '" +
                                     to_string(it->second) + "' first (needed by " +
                                     to_string(stage) + ")");
        throw std::runtime_error("missing input " + path + " (needed by " +
                                 to_string(stage) + ")");
    }
}

inline std::vector<std::string> report_files(const PipelineConfig& c) {
    std::vector<std::string> out;
    std::string dir = c.artifact("reports");
    if (!std::filesystem::exists(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline nlohmann::json run_stage_body(Stage stage, const PipelineConfig& c,
                                     std::vector<std::string>& outputs) {
    nlohmann::json counters = nlohmann::json::object();
    switch (stage) {
        case Stage::ingest: {
            std::vector<RawPost> posts;
            DumpStats stats;
            if (c.source == "dump") {
                stats = parse_dump_file(c.dump_path,
                                        [&](RawPost&& p) { posts.push_back(std::move(p)); });
            } else if (c.source == "api") {
                ApiClientConfig api;
                api.base_url = c.api_base;
                api.site = c.api_site;
                FetchResult fetched = fetch_api_pages(c.tag, c.window(), api);
                posts = std::move(fetched.posts);
                counters["api_requests"] = fetched.requests_made;
                if (!fetched.complete) {
                    FilterStats fs;
                    auto kept = filter_corpus(posts, c.tag, c.window(), &fs);
                    atomic_write_with(c.artifact("corpus.ndjson"), [&](const std::string& p) {
                        save_ndjson(kept, p);
                    });
                    throw std::runtime_error("api fetch incomplete (" + fetched.error +
                                             "); partial corpus written");
                }
            } else {
                throw std::runtime_error("unknown ingest source: " + c.source);
            }
            FilterStats fs;
            auto kept = filter_corpus(posts, c.tag, c.window(), &fs);
            atomic_write_with(c.artifact("corpus.ndjson"),
                              [&](const std::string& p) { save_ndjson(kept, p); });
            std::string ledger;
            for (const auto& issue : stats.ledger)
                ledger += std::to_string(issue.line) + "\t" + issue.message + "\n";
            atomic_write_text(c.artifact("ingest_errors.log"), ledger);
            counters["rows_seen"] = stats.rows_seen;
            counters["posts_parsed"] = stats.posts_emitted;
            counters["parse_errors"] = stats.ledger.size();
            counters["skipped_other_types"] = stats.skipped_other_types;
            counters["questions_kept"] = fs.questions_kept;
            counters["questions_dropped"] = fs.questions_dropped;
            counters["answers_kept"] = fs.answers_kept;
            counters["orphan_answers_dropped"] = fs.orphan_answers_dropped;
            if (stats.truncated)
                throw std::runtime_error("dump truncated: " + stats.ledger.back().message +
                                         " (line " + std::to_string(stats.ledger.back().line) +
                                         "); parsed rows were flushed");
            break;
        }
        case Stage::prep: {
            auto corpus = load_ndjson<RawPost>(c.artifact("corpus.ndjson"));
            auto res = TextResources::load(c.resources_dir);
            SurfaceMap surfaces;
            auto docs = prepare_documents(corpus, res, &surfaces);
            atomic_write_with(c.artifact("docs.ndjson"),
                              [&](const std::string& p) { save_ndjson(docs, p); });
            atomic_write_with(c.artifact("surface_forms.tsv"),
                              [&](const std::string& p) { surfaces.save(p); });
            counters["documents"] = docs.size();
            break;
        }
        case Stage::embed: {
            auto docs = load_ndjson<CleanDocument>(c.artifact("docs.ndjson"));
            EmbeddingMatrix emb = embed_corpus(docs, c.provider);
            atomic_write_with(c.artifact("embeddings.txt"),
                              [&](const std::string& p) { save_matrix(emb.m, p); });
            counters["rows"] = emb.m.n_rows;
            counters["dim"] = emb.m.dim;
            counters["zero_rows"] = emb.zero_rows.size();
            break;
        }
        case Stage::reduce: {
            Matrix X = load_matrix(c.artifact("embeddings.txt"));
            ReducedEmbedding red;
            if (c.reducer == "pca") {
                red = pca_reduce(X, std::min(c.umap.dim_out, std::min(X.n_rows, X.dim)));
                red.seed = c.seed;
            } else {
                UmapParams params = c.umap;
                params.seed = c.seed;
                red = umap_reduce(X, params);
            }
            atomic_write_with(c.artifact("reduced.txt"),
                              [&](const std::string& p) { save_matrix(red.m, p); });
            counters["dim_out"] = red.m.dim;
            for (const auto& w : red.warnings) counters["warnings"].push_back(w);
            break;
        }
        case Stage::cluster: {
            std::string src = c.cluster_space == "original" ? "embeddings.txt"
                                                            : "reduced.txt";
            Matrix Y = load_matrix(c.artifact(src));
            ClusterAssignment assign = hdbscan_fit(Y, c.hdbscan);
            atomic_write_with(c.artifact("assignment.tsv"), [&](const std::string& p) {
                std::ofstream out(p, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + p);
                for (std::size_t i = 0; i < assign.labels.size(); ++i)
                    out << i << '\t' << assign.labels[i] << '\t'
                        << format_double(assign.membership_strength[i]) << '\n';
            });
            counters["clusters"] = assign.k;
            counters["noise"] = assign.noise_count;
            break;
        }
        case Stage::topics: {
            auto docs = load_ndjson<CleanDocument>(c.artifact("docs.ndjson"));
            SurfaceMap surfaces = SurfaceMap::load(c.artifact("surface_forms.tsv"));
            std::vector<std::int32_t> labels(docs.size(), -1);
            std::size_t k = 0;
            {
                std::ifstream in(c.artifact("assignment.tsv"));
                std::string line;
                while (std::getline(in, line)) {
                    std::istringstream row(line);
                    std::size_t doc_id = 0;
                    std::int32_t label = 0;
                    double strength = 0;
                    if (!(row >> doc_id >> label >> strength)) continue;
                    if (doc_id < labels.size()) labels[doc_id] = label;
                    if (label >= 0)
                        k = std::max(k, static_cast<std::size_t>(label) + 1);
                }
            }
            auto topics = build_topics(labels, docs, k, surfaces);
            nlohmann::json tj = topics;
            atomic_write_text(c.artifact("topics.json"), tj.dump(2) + "\n");
            auto rows = export_word_scores(topics, surfaces, c.top_n_topics, c.top_k_terms);
            atomic_write_with(c.artifact("wordscores.csv"), [&](const std::string& p) {
                write_word_scores_csv(rows, p);
            });
            counters["topics"] = topics.size();
            break;
        }
        case Stage::summarize: {
            auto corpus = load_ndjson<RawPost>(c.artifact("corpus.ndjson"));
            auto docs = load_ndjson<CleanDocument>(c.artifact("docs.ndjson"));
            auto res = TextResources::load(c.resources_dir);
            nlohmann::json tj;
            {
                std::ifstream in(c.artifact("topics.json"), std::ios::binary);
                tj = nlohmann::json::parse(in);
            }
            auto topics = tj.get<std::vector<Topic>>();
            CorpusIndex index(corpus);
            SummarizerParams params{c.q_min, c.a_min, c.max_pairs, c.snippet_byte_cap,
                                    c.seed};
            std::filesystem::create_directories(c.artifact("reports"));
            std::size_t skipped = 0, pairs = 0;
            for (const Topic& t : topics) {
                TopicReport report =
                    assemble_report(t, docs, index, c.provider, res, params);
                skipped += report.skipped_questions;
                pairs += report.pairs.size();
                std::string base = c.artifact("reports/topic_" +
                                              std::to_string(t.topic_id));
                nlohmann::json rj = report;
                atomic_write_text(base + ".json", rj.dump(2) + "\n");
                atomic_write_text(base + ".md", render_topic_markdown(report));
                outputs.push_back(base + ".json");
                outputs.push_back(base + ".md");
            }
            counters["pairs"] = pairs;
            counters["skipped_questions"] = skipped;
            break;
        }
        case Stage::report: {
            auto rows = read_word_scores_csv(c.artifact("wordscores.csv"));
            atomic_write_with(c.artifact("wordscores.svg"), [&](const std::string& p) {
                emit_wordscore_plot(rows, p);
            });
            break;
        }
    }
    return counters;
}

// Runs one stage with manifest-based caching: unchanged inputs + config and
// intact outputs mean the stage is skipped (unless forced).
inline StageResult run_stage(Stage stage, const PipelineConfig& c, bool force = false,
                             std::ostream* log = nullptr) {
    std::filesystem::create_directories(c.out_dir);
    StageIO io = stage_io(stage, c);
    detail::require_inputs(io, stage);

    std::string manifest_path = c.artifact("manifest.json");
    nlohmann::json manifest = nlohmann::json::object();
    if (std::filesystem::exists(manifest_path)) {
        std::ifstream in(manifest_path, std::ios::binary);
        try {
            manifest = nlohmann::json::parse(in);
        } catch (const std::exception&) {
            manifest = nlohmann::json::object();
        }
    }

    nlohmann::json current_inputs = nlohmann::json::object();
    for (const std::string& path : io.inputs) current_inputs[path] = file_hash(path);
    std::string config_hash = json_hash(io.config_slice);

    const std::string name = to_string(stage);
    StageResult result;
    result.stage = stage;
    if (!force && manifest.contains("stages") && manifest["stages"].contains(name)) {
        const auto& rec = manifest["stages"][name];
        bool clean = rec.value("config_hash", "") == config_hash &&
                     rec.value("inputs", nlohmann::json::object()) == current_inputs;
        if (clean) {
            for (const auto& [path, hash] : rec.value("outputs", nlohmann::json::object()).items())
                if (file_hash(path) != hash.get<std::string>()) clean = false;
        }
        if (clean) {
            result.cache_hit = true;
            result.counters = rec.value("counters", nlohmann::json::object());
            manifest["stages"][name]["cache_hits"] =
                rec.value("cache_hits", 0) + 1;
            atomic_write_text(manifest_path, manifest.dump(2) + "\n");
            if (log) *log << "[" << name << "] cached, skipping\n";
            return result;
        }
    }

    if (log) *log << "[" << name << "] running\n";
    std::vector<std::string> extra_outputs;
    result.counters = run_stage_body(stage, c, extra_outputs);

    nlohmann::json outputs = nlohmann::json::object();
    for (const std::string& path : io.outputs) outputs[path] = file_hash(path);
    for (const std::string& path : extra_outputs) outputs[path] = file_hash(path);
    manifest["stages"][name] = {{"config_hash", config_hash},
                                {"inputs", current_inputs},
                                {"outputs", outputs},
                                {"counters", result.counters},
                                {"cache_hits", 0}};
    atomic_write_text(manifest_path, manifest.dump(2) + "\n");
    return result;
}

inline std::vector<StageResult> run_all(const PipelineConfig& c, bool force = false,
                                        std::ostream* log = nullptr) {
    WorkdirLock lock(c.out_dir);
    std::vector<StageResult> results;
    for (Stage stage : all_stages()) results.push_back(run_stage(stage, c, force, log));
    return results;
}

}  // namespace stackmine
