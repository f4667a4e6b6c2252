// helpann: data generation, ground truth, index build, search and benchmark.
//
// Exit codes: 0 ok, 1 I/O, 2 argument, 3 format, 4 constraint.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helpann/dataset_io.hpp"
#include "helpann/error.hpp"
#include "helpann/eval.hpp"
#include "helpann/help_index.hpp"
#include "helpann/metric.hpp"
#include "helpann/router.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace helpann;
using tool::RunManifest;

namespace {

enum Exit { kOk = 0, kIo = 1, kArgument = 2, kFormat = 3, kConstraint = 4 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Build threads: STABLE_THREADS wins over flag and config.
std::uint32_t build_threads(std::uint32_t requested) {
    if (const char* env = std::getenv("STABLE_THREADS"); env && *env) {
        try {
            const long v = std::stol(env);
            if (v < 1) throw ArgumentError("STABLE_THREADS must be >= 1");
            return static_cast<std::uint32_t>(v);
        } catch (const std::logic_error&) {
            throw ArgumentError(std::string("STABLE_THREADS is not a number: '") + env + "'");
        }
    }
    return requested;
}

Dataset load_dataset(const fs::path& features_path, const fs::path& attr_path) {
    Dataset data;
    data.features = read_vecs_file(features_path, element_kind_for(features_path));
    const auto file = read_attribute_file(attr_path);
    data.schema = schema_from_labels(file);
    data.attributes = map_attributes(file.records, data.schema);
    if (data.attributes.rows() != data.features.rows())
        throw ArgumentError("'" + attr_path.string() + "' has " + std::to_string(data.attributes.rows()) +
                            " records, '" + features_path.string() + "' has " +
                            std::to_string(data.features.rows()));
    return data;
}

QuerySet load_queries(const fs::path& features_path, const fs::path& attr_path, const std::string& mask_path,
                      const AttributeSchema& schema) {
    QuerySet queries;
    queries.features = read_vecs_file(features_path, element_kind_for(features_path));
    const auto file = read_attribute_file(attr_path);
    if (file.l != schema.dims())
        throw ArgumentError("query attributes have L=" + std::to_string(file.l) + ", index has L=" +
                            std::to_string(schema.dims()));
    queries.attributes = map_attributes(file.records, schema);
    if (queries.attributes.rows() != queries.features.rows())
        throw ArgumentError("query feature and attribute files differ in record count");
    if (!mask_path.empty()) {
        queries.masks = read_mask_file(mask_path);
        if (queries.masks->rows() != queries.features.rows() ||
            static_cast<std::size_t>(queries.masks->cols()) != schema.dims())
            throw ArgumentError("mask file '" + mask_path + "' does not match the queries");
    }
    return queries;
}

nlohmann::json metric_json(const MetricConfig& m) {
    return {{"alpha", m.alpha},
            {"source", m.source == AlphaSource::Calibrated ? "auto" : "manual"},
            {"n_total", m.n_total},
            {"l_dims", m.l_dims},
            {"avg_feature_distance", m.stats.avg_feature_distance},
            {"avg_attribute_distance", m.stats.avg_attribute_distance},
            {"sample_size", m.stats.sample_size},
            {"stats_seed", m.stats.rng_seed},
            {"feature_term", m.feature_term},
            {"attribute_term", m.attribute_term},
            {"warning", m.warning}};
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::QualityReached: return "quality_reached";
        case Termination::IterationCap: return "iteration_cap";
        case Termination::Converged: return "converged";
    }
    return "unknown";
}

/// Flat `key=value` config: keys are long flag names without dashes.
/// Flags given on the command line take precedence.
void apply_config(CLI::App& sub, const std::string& path) {
    if (path.empty()) return;
    if (!fs::exists(path)) throw Error("config file '" + path + "' not found");
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::Error& e) {
        throw FormatError("cannot parse config '" + path + "': " + e.what(), 0);
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty()) throw FormatError("config '" + path + "' must be flat (no sections)", 0);
        if (item.name == "config") throw ArgumentError("config files cannot include other config files");
        CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
        if (!opt) throw ArgumentError("unknown key '" + item.name + "' in config '" + path + "'");
        if (opt->count() > 0) continue;
        opt->add_result(item.inputs);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ArgumentError("config key '" + item.name + "': " + e.what());
        }
    }
}

std::string describe(const fs::path& p) { return "'" + p.string() + "'"; }

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
    std::size_t n = 10000, m = 32, l = 3, pool = 3;
    std::uint64_t seed = 1;
    std::string distribution = "gaussian";
    std::size_t queries = 100;
    std::optional<std::size_t> filters;
    std::size_t min_matches = 10;
    std::string out_dir;
};

int cmd_gen_data(const GenDataArgs& a, RunManifest& manifest) {
    const auto t0 = Clock::now();
    const Distribution dist = a.distribution == "uniform01" ? Distribution::Uniform01 : Distribution::Gaussian;
    const std::size_t filters = a.filters.value_or(a.l);
    if (filters > a.l) throw ArgumentError("--filters must lie in [0, L]");

    Dataset data;
    data.features = generate_synthetic(a.n, a.m, dist, a.seed);
    auto [schema, attrs] = generate_attributes(a.n, a.l, a.pool, a.seed + 1);
    data.schema = std::move(schema);
    data.attributes = std::move(attrs);

    QueryGenOptions qopt;
    qopt.count = a.queries;
    qopt.active_filters = filters;
    qopt.min_matches = a.min_matches;
    qopt.seed = a.seed + 2;
    const QuerySet queries = generate_queries(data, qopt);

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    const auto base_f = dir / "base.fvecs", base_a = dir / "base.attr";
    const auto query_f = dir / "query.fvecs", query_a = dir / "query.attr", query_m = dir / "query.mask";
    write_vecs_file(base_f, data.features, ElementKind::Float32);
    write_attribute_file(base_a, unmap_attributes(data.attributes, data.schema), &data.schema);
    write_vecs_file(query_f, queries.features, ElementKind::Float32);
    write_attribute_file(query_a, unmap_attributes(queries.attributes, data.schema), &data.schema);
    write_mask_file(query_m, *queries.masks);

    manifest.config() = {{"n", a.n},           {"m", a.m},
                         {"l", a.l},           {"pool", a.pool},
                         {"distribution", a.distribution},
                         {"queries", a.queries}, {"filters", filters},
                         {"min_matches", a.min_matches}};
    manifest.seeds() = {{"features", a.seed}, {"attributes", a.seed + 1}, {"queries", a.seed + 2}};
    manifest.info()["theta"] = data.schema.theta();
    for (const auto& [role, path] : std::vector<std::pair<std::string, fs::path>>{
             {"base_features", base_f}, {"base_attributes", base_a}, {"query_features", query_f},
             {"query_attributes", query_a}, {"query_masks", query_m}})
        manifest.add_output(role, path);
    manifest.add_timing("generate", seconds_since(t0));
    manifest.append_to(dir / "manifest.jsonl");
    std::cerr << "wrote " << a.n << " base records and " << queries.size() << " queries to " << describe(dir)
              << " (theta=" << data.schema.theta() << ")\n";
    return kOk;
}

// ---------------------------------------------------------------- gt

struct QueryFiles {
    std::string features, attributes, masks;
};

struct GtArgs {
    std::string base, base_attr;
    QueryFiles q;
    std::uint32_t k = 10;
    std::uint32_t threads = 8;
    std::string out;
};

int cmd_gt(const GtArgs& a, RunManifest& manifest) {
    const auto t0 = Clock::now();
    const Dataset data = load_dataset(a.base, a.base_attr);
    const QuerySet queries = load_queries(a.q.features, a.q.attributes, a.q.masks, data.schema);
    const auto truth = compute_ground_truth(data, queries, a.k, build_threads(a.threads));
    std::size_t empty = 0, short_lists = 0;
    for (std::size_t q = 0; q < truth.ids.size(); ++q) {
        if (truth.ids[q].empty()) {
            ++empty;
            std::cerr << "warning: query " << q << " matches no base record; writing an empty record\n";
        } else if (truth.ids[q].size() < a.k) {
            ++short_lists;
        }
    }
    write_ground_truth(a.out, truth);

    manifest.config() = {{"k", a.k}, {"threads", build_threads(a.threads)}};
    manifest.info() = {{"queries", queries.size()},
                       {"empty_matches", empty},
                       {"short_matches", short_lists},
                       {"mask_digest", truth.mask_digest}};
    manifest.add_input("base_features", a.base);
    manifest.add_input("base_attributes", a.base_attr);
    manifest.add_input("query_features", a.q.features);
    manifest.add_input("query_attributes", a.q.attributes);
    if (!a.q.masks.empty()) manifest.add_input("query_masks", a.q.masks);
    manifest.add_output("ground_truth", a.out);
    manifest.add_output("ground_truth_meta", a.out + ".meta");
    manifest.add_timing("ground_truth", seconds_since(t0));
    manifest.append_to(tool::manifest_beside(a.out));
    return kOk;
}

// ---------------------------------------------------------------- build

struct BuildArgs {
    std::string base, base_attr, out;
    BuildParams params;
    std::string alpha = "auto";
    std::size_t sample_size = 1000;
};

int cmd_build(BuildArgs a, RunManifest& manifest) {
    const auto t0 = Clock::now();
    a.params.threads = build_threads(a.params.threads);
    a.params.validate();
    Dataset data = load_dataset(a.base, a.base_attr);

    const std::size_t sample = std::min(a.sample_size, data.size());
    const SampleStats stats = sample_statistics(data.features, data.attributes, sample, a.params.seed);
    MetricConfig metric;
    if (a.alpha == "auto") {
        metric = compute_alpha(stats, data.size(), static_cast<std::uint32_t>(data.attribute_dims()));
    } else {
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(a.alpha, &used);
            if (used != a.alpha.size()) throw std::invalid_argument("trailing");
        } catch (const std::logic_error&) {
            throw ArgumentError("--alpha must be 'auto' or a positive number, got '" + a.alpha + "'");
        }
        metric = manual_alpha(value, stats, data.size(), static_cast<std::uint32_t>(data.attribute_dims()));
    }
    if (!metric.warning.empty()) std::cerr << "warning: " << metric.warning << '\n';
    const double t_calibrate = seconds_since(t0);

    BuildReport report;
    const auto t1 = Clock::now();
    HelpGraph graph = build_unpruned(data, a.params, metric, &report);
    const double t_descent = seconds_since(t1);
    const auto t2 = Clock::now();
    const PruneReport pruned = heterogeneous_semantic_prune(graph, data, a.params);
    freeze(graph);
    report.edges_after_prune = graph.edge_count();
    const double t_prune = seconds_since(t2);

    const HelpIndex index{std::move(data), std::move(graph)};
    write_index(a.out, index);

    const auto& p = a.params;
    manifest.config() = {{"gamma", p.gamma},
                         {"gamma_new", p.gamma_new},
                         {"sigma", p.sigma},
                         {"psi_target", p.psi_target},
                         {"max_iterations", p.max_iterations},
                         {"quality_sample", p.quality_sample},
                         {"quality_k", p.effective_quality_k()},
                         {"threads", p.threads},
                         {"alpha", a.alpha},
                         {"sample_size", sample}};
    manifest.seeds() = {{"build", p.seed}, {"stats", p.seed}};
    manifest.info() = {{"n", index.data.size()},
                       {"m", index.data.feature_dims()},
                       {"l", index.data.attribute_dims()},
                       {"theta", index.data.schema.theta()},
                       {"metric", metric_json(metric)},
                       {"iterations", report.iterations},
                       {"psi_history", report.psi_history},
                       {"termination", termination_name(report.termination)},
                       {"edges_before_prune", pruned.edges_before},
                       {"edges_after_prune", pruned.edges_after},
                       {"redundant_drops", pruned.redundant.size()},
                       {"reverse_inserted", pruned.reverse_inserted},
                       {"repaired", pruned.repaired},
                       {"min_in_degree", index.graph.min_in_degree()}};
    manifest.add_input("base_features", a.base);
    manifest.add_input("base_attributes", a.base_attr);
    manifest.add_output("index", a.out);
    manifest.add_timing("calibrate", t_calibrate);
    manifest.add_timing("descent", t_descent);
    manifest.add_timing("prune", t_prune);
    manifest.append_to(tool::manifest_beside(a.out));

    std::cerr << "alpha=" << metric.alpha << " (" << (metric.source == AlphaSource::Calibrated ? "auto" : "manual")
              << ") iterations=" << report.iterations << " psi=" << report.final_psi()
              << " edges=" << pruned.edges_before << "->" << pruned.edges_after << '\n';
    if (report.termination != Termination::QualityReached) {
        std::cerr << "error: graph quality " << report.final_psi() << " did not reach " << p.psi_target << " ("
                  << termination_name(report.termination) << "); index written to " << describe(a.out) << '\n';
        return kConstraint;
    }
    return kOk;
}

// ---------------------------------------------------------------- search

struct SearchArgs {
    std::string index;
    QueryFiles q;
    SearchParams params;
    bool no_coarse = false;
    std::string out, out_ivecs;
};

int cmd_search(SearchArgs a, RunManifest& manifest) {
    const auto t0 = Clock::now();
    const HelpIndex index = read_index(fs::path(a.index));
    const QuerySet queries = load_queries(a.q.features, a.q.attributes, a.q.masks, index.data.schema);
    a.params.coarse_phase = !a.no_coarse;

    Router router(index);
    std::ofstream out(a.out, std::ios::trunc);
    if (!out) throw Error("cannot open " + describe(a.out) + " for writing");
    std::vector<std::vector<NodeId>> all_ids;
    std::uint64_t evals = 0;
    char buf[64];
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto result = router.search(queries.at(q), a.params, q);
        evals += result.stats.distance_evaluations;
        for (std::size_t r = 0; r < result.ids.size(); ++r) {
            std::snprintf(buf, sizeof buf, "%.9g", result.distances[r]);
            out << q << '\t' << r << '\t' << result.ids[r] << '\t' << buf << '\n';
        }
        if (!a.out_ivecs.empty()) all_ids.push_back(result.ids);
    }
    out.close();
    if (!out) throw Error("failed writing " + describe(a.out));
    if (!a.out_ivecs.empty()) write_ivecs_lists(a.out_ivecs, all_ids);

    manifest.config() = {{"k", a.params.k},
                         {"pioneer", a.params.effective_pioneer_size()},
                         {"coarse_phase", a.params.coarse_phase}};
    manifest.seeds() = {{"search", a.params.seed}};
    manifest.info() = {{"queries", queries.size()},
                       {"mean_dist_evals", queries.size() ? double(evals) / double(queries.size()) : 0.0},
                       {"metric", metric_json(index.graph.metric)}};
    manifest.add_input("index", a.index);
    manifest.add_input("query_features", a.q.features);
    manifest.add_input("query_attributes", a.q.attributes);
    if (!a.q.masks.empty()) manifest.add_input("query_masks", a.q.masks);
    manifest.add_output("results", a.out);
    if (!a.out_ivecs.empty()) manifest.add_output("results_ivecs", a.out_ivecs);
    manifest.add_timing("search", seconds_since(t0));
    manifest.append_to(tool::manifest_beside(a.out));
    return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string index, gt;
    QueryFiles q;
    std::vector<std::uint32_t> k_values{10, 50, 100, 200, 500};
    SearchParams params;
    bool no_coarse = false;
    std::uint32_t passes = 3;
    std::string out;
};

int cmd_bench(BenchArgs a, RunManifest& manifest) {
    const auto t0 = Clock::now();
    const HelpIndex index = read_index(fs::path(a.index));
    const QuerySet queries = load_queries(a.q.features, a.q.attributes, a.q.masks, index.data.schema);
    const GroundTruth truth = read_ground_truth(a.gt);
    a.params.coarse_phase = !a.no_coarse;
    BenchOptions options;
    options.timing_passes = a.passes;
    const auto rows = bench_sweep(index, queries, truth, a.k_values, a.params, options);

    if (a.out.empty()) {
        write_bench_csv(std::cout, rows);
    } else {
        std::ofstream out(a.out, std::ios::trunc);
        if (!out) throw Error("cannot open " + describe(a.out) + " for writing");
        write_bench_csv(out, rows);
        out.close();
        if (!out) throw Error("failed writing " + describe(a.out));
    }

    manifest.config() = {{"k_values", a.k_values},
                         {"pioneer", a.params.pioneer_size},
                         {"coarse_phase", a.params.coarse_phase},
                         {"passes", a.passes}};
    manifest.seeds() = {{"search", a.params.seed}};
    manifest.info() = {{"queries", queries.size()}, {"metric", metric_json(index.graph.metric)}};
    manifest.add_input("index", a.index);
    manifest.add_input("ground_truth", a.gt);
    manifest.add_input("query_features", a.q.features);
    manifest.add_input("query_attributes", a.q.attributes);
    if (!a.q.masks.empty()) manifest.add_input("query_masks", a.q.masks);
    if (!a.out.empty()) manifest.add_output("csv", a.out);
    manifest.add_timing("bench", seconds_since(t0));
    manifest.append_to(a.out.empty() ? tool::manifest_beside(a.index) : tool::manifest_beside(a.out));
    return kOk;
}

void add_query_options(CLI::App* sub, QueryFiles& q) {
    sub->add_option("--queries", q.features, "query vectors (.fvecs/.bvecs/.ivecs)")->required();
    sub->add_option("--query-attr", q.attributes, "query attribute file")->required();
    sub->add_option("--query-mask", q.masks, "query mask file (omit: every dimension active)");
}

void add_search_options(CLI::App* sub, SearchParams& p, bool& no_coarse) {
    sub->add_option("--pioneer", p.pioneer_size, "pioneer set size (0 = k/2)");
    sub->add_option("--seed", p.seed, "entry-point seed");
    sub->add_flag("--no-coarse", no_coarse, "skip the coarse routing phase");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid vector search with a fused feature/attribute metric"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool::kToolVersion);

    std::map<CLI::App*, std::string> configs;
    auto with_config = [&](CLI::App* sub) {
        sub->add_option("--config", configs[sub], "flat key=value file; flags override it");
        return sub;
    };

    GenDataArgs gen;
    auto* gen_cmd = with_config(app.add_subcommand("gen-data", "generate a synthetic dataset with queries"));
    gen_cmd->add_option("--n", gen.n, "base records");
    gen_cmd->add_option("--m", gen.m, "feature dimensions");
    gen_cmd->add_option("--l", gen.l, "attribute dimensions");
    gen_cmd->add_option("--pool", gen.pool, "labels per attribute dimension");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--distribution", gen.distribution)->check(CLI::IsMember({"uniform01", "gaussian"}));
    gen_cmd->add_option("--queries", gen.queries, "query count");
    gen_cmd->add_option("--filters", gen.filters, "active attribute filters per query (default L)");
    gen_cmd->add_option("--min-matches", gen.min_matches, "minimum base records matching each query");
    gen_cmd->add_option("--out-dir", gen.out_dir)->required();

    GtArgs gt;
    auto* gt_cmd = with_config(app.add_subcommand("gt", "exact-match ground truth"));
    gt_cmd->add_option("--base", gt.base)->required();
    gt_cmd->add_option("--base-attr", gt.base_attr)->required();
    add_query_options(gt_cmd, gt.q);
    gt_cmd->add_option("--k", gt.k);
    gt_cmd->add_option("--threads", gt.threads);
    gt_cmd->add_option("--out", gt.out)->required();

    BuildArgs build_args;
    auto& bp = build_args.params;
    bp.threads = 8;
    auto* build_cmd = with_config(app.add_subcommand("build", "build and save an index"));
    build_cmd->add_option("--base", build_args.base)->required();
    build_cmd->add_option("--base-attr", build_args.base_attr)->required();
    build_cmd->add_option("--out", build_args.out)->required();
    build_cmd->add_option("--gamma", bp.gamma, "max out-degree");
    build_cmd->add_option("--gamma-new", bp.gamma_new, "max new neighbors per iteration");
    build_cmd->add_option("--sigma", bp.sigma, "pruning cosine threshold");
    build_cmd->add_option("--psi", bp.psi_target, "graph-quality target");
    build_cmd->add_option("--max-iterations", bp.max_iterations);
    build_cmd->add_option("--quality-sample", bp.quality_sample);
    build_cmd->add_option("--quality-k", bp.quality_k, "0 = gamma");
    build_cmd->add_option("--seed", bp.seed);
    build_cmd->add_option("--threads", bp.threads, "STABLE_THREADS overrides");
    build_cmd->add_option("--alpha", build_args.alpha, "'auto' or a fixed value");
    build_cmd->add_option("--sample-size", build_args.sample_size, "records sampled for alpha statistics");

    SearchArgs search;
    auto* search_cmd = with_config(app.add_subcommand("search", "answer queries with an index"));
    search_cmd->add_option("--index", search.index)->required();
    add_query_options(search_cmd, search.q);
    search_cmd->add_option("--k", search.params.k);
    add_search_options(search_cmd, search.params, search.no_coarse);
    search_cmd->add_option("--out", search.out, "TSV: query_index, rank, node_id, distance")->required();
    search_cmd->add_option("--out-ivecs", search.out_ivecs, "result ids as ivecs");

    BenchArgs bench;
    auto* bench_cmd = with_config(app.add_subcommand("bench", "recall / QPS sweep over k"));
    bench_cmd->add_option("--index", bench.index)->required();
    add_query_options(bench_cmd, bench.q);
    bench_cmd->add_option("--gt", bench.gt, "ground truth from `gt` (k=10)")->required();
    bench_cmd->add_option("--k-values", bench.k_values)->delimiter(',');
    add_search_options(bench_cmd, bench.params, bench.no_coarse);
    bench_cmd->add_option("--passes", bench.passes, "timing passes (median QPS)");
    bench_cmd->add_option("--out", bench.out, "CSV path (default stdout)");

    // Required flags may come from the config file, so CLI11 only checks them
    // after the config has been applied.
    std::map<CLI::App*, std::vector<CLI::Option*>> deferred;
    for (auto* sub : app.get_subcommands({}))
        for (auto* opt : sub->get_options())
            if (opt->get_required()) {
                opt->required(false);
                deferred[sub].push_back(opt);
            }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kArgument;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(*sub, configs[sub]);
        for (auto* opt : deferred[sub])
            if (opt->count() == 0)
                throw ArgumentError(opt->get_name() + " is required");

        RunManifest manifest(sub->get_name(), argc, argv);
        if (sub == gen_cmd) return cmd_gen_data(gen, manifest);
        if (sub == gt_cmd) return cmd_gt(gt, manifest);
        if (sub == build_cmd) return cmd_build(build_args, manifest);
        if (sub == search_cmd) return cmd_search(search, manifest);
        if (sub == bench_cmd) return cmd_bench(bench, manifest);
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return kArgument;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kFormat;
    } catch (const MappingError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kFormat;
    } catch (const ConstraintError& e) {
        std::cerr << "constraint error: " << e.what() << '\n';
        return kConstraint;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kArgument;
}
