// stackmine: mine a developer Q&A corpus for prevalent problem topics and
// emit problem/solution reports with code snippets.
//
//   stackmine run-all --config pipeline.json --dump Posts.xml --out out
//   stackmine cluster --config pipeline.json --min-cluster-size 25
//
// Stages: ingest | prep | embed | reduce | cluster | topics | summarize |
// report | run-all. Flags override config-file values; artifacts land under
// --out and unchanged stages are skipped via the manifest.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <stackmine/pipeline.hpp>

#ifndef STACKMINE_DEFAULT_RESOURCES
#define STACKMINE_DEFAULT_RESOURCES "resources"
#endif

namespace {

struct CliOverrides {
    std::string config_path;
    std::string dump;
    bool use_api = false;
    std::string tag, from, to;
    std::string embedder, endpoint, vectors;
    std::size_t dim = 0;
    std::size_t min_cluster_size = 0;
    int q_min = -1000000;
    int a_min = -1000000;
    std::size_t max_pairs = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string cluster_space;
    std::string out;
    std::string resources;
    std::string reducer;
    bool force = false;
};

stackmine::PipelineConfig build_config(const CliOverrides& o, const CLI::App& app) {
    stackmine::PipelineConfig cfg;
    cfg.resources_dir = STACKMINE_DEFAULT_RESOURCES;
    if (!o.config_path.empty()) cfg = stackmine::load_config(o.config_path);
    if (app.count("--dump")) {
        cfg.dump_path = o.dump;
        cfg.source = "dump";
    }
    if (o.use_api) cfg.source = "api";
    if (app.count("--tag")) cfg.tag = o.tag;
    if (app.count("--from")) cfg.from = o.from;
    if (app.count("--to")) cfg.to = o.to;
    if (app.count("--embedder"))
        cfg.provider.kind = stackmine::embedder_kind_from_string(o.embedder);
    if (app.count("--endpoint")) cfg.provider.endpoint = o.endpoint;
    if (app.count("--vectors")) cfg.provider.vectors_path = o.vectors;
    if (app.count("--dim")) cfg.provider.dim = o.dim;
    if (app.count("--min-cluster-size")) cfg.hdbscan.min_cluster_size = o.min_cluster_size;
    if (app.count("--min-question-score")) cfg.q_min = o.q_min;
    if (app.count("--min-answer-score")) cfg.a_min = o.a_min;
    if (app.count("--max-pairs")) cfg.max_pairs = o.max_pairs;
    if (o.seed_set) cfg.seed = o.seed;
    if (app.count("--cluster-space")) cfg.cluster_space = o.cluster_space;
    if (app.count("--reducer")) cfg.reducer = o.reducer;
    if (app.count("--out")) cfg.out_dir = o.out;
    if (app.count("--resources")) cfg.resources_dir = o.resources;
    return cfg;
}

void print_result(const stackmine::StageResult& r) {
    std::cout << stackmine::to_string(r.stage)
              << (r.cache_hit ? ": cached" : ": done");
    if (!r.counters.empty()) std::cout << ' ' << r.counters.dump();
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mine Stack Exchange posts into topic and problem/solution reports"};
    app.require_subcommand(1);

    CliOverrides o;
    app.add_option("--config", o.config_path, "pipeline config JSON");
    app.add_option("--dump", o.dump, "Posts.xml dump path (ingest source)");
    app.add_flag("--api", o.use_api, "ingest from the Stack Exchange API");
    app.add_option("--tag", o.tag, "question tag filter (default android)");
    app.add_option("--from", o.from, "window start, YYYY-MM-DD");
    app.add_option("--to", o.to, "window end, YYYY-MM-DD");
    app.add_option("--embedder", o.embedder, "hashed | file | remote");
    app.add_option("--endpoint", o.endpoint, "remote embedding endpoint URL");
    app.add_option("--vectors", o.vectors, "precomputed vectors file (file embedder)");
    app.add_option("--dim", o.dim, "hashed embedding dimension");
    app.add_option("--min-cluster-size", o.min_cluster_size, "HDBSCAN min cluster size");
    app.add_option("--min-question-score", o.q_min, "question score threshold (default 3)");
    app.add_option("--min-answer-score", o.a_min, "answer score threshold (default 2)");
    app.add_option("--max-pairs", o.max_pairs, "max Q/A pairs per topic");
    auto* seed_opt = app.add_option("--seed", o.seed, "pipeline RNG seed");
    app.add_option("--cluster-space", o.cluster_space, "reduced | original");
    app.add_option("--reducer", o.reducer, "umap | pca");
    app.add_option("--out", o.out, "artifact directory (default out)");
    app.add_option("--resources", o.resources, "stopwords/lemmas directory");
    app.add_flag("--force", o.force, "re-run stages even when cached");

    std::vector<std::string> stage_names;
    for (stackmine::Stage s : stackmine::all_stages())
        stage_names.push_back(stackmine::to_string(s));
    for (const std::string& name : stage_names)
        app.add_subcommand(name, "run the " + name + " stage");
    app.add_subcommand("run-all", "run every stage in order");

    CLI11_PARSE(app, argc, argv);
    o.seed_set = seed_opt->count() > 0;

    try {
        stackmine::PipelineConfig cfg = build_config(o, app);
        auto* sub = app.get_subcommands().front();
        if (sub->get_name() == "run-all") {
            for (const auto& r : stackmine::run_all(cfg, o.force, &std::cerr))
                print_result(r);
        } else {
            stackmine::WorkdirLock lock(cfg.out_dir);
            print_result(stackmine::run_stage(
                stackmine::stage_from_string(sub->get_name()), cfg, o.force, &std::cerr));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
