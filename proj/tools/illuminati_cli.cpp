// Command-line front end: dataset generation, training, explanation,
// evaluation and DOT export.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <illuminati/illuminati.hpp>
#include <illuminati/parallel.hpp>

namespace fs = std::filesystem;
using namespace illuminati;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_compute = 3;

/// Usage or IO problem: exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::io_error:
    case ErrorCode::parse_error:
    case ErrorCode::format_version:
    case ErrorCode::validation_error:
    case ErrorCode::invalid_count:
    case ErrorCode::invalid_budget:
    case ErrorCode::unsupported_activation:
        return exit_usage;
    default:
        return exit_compute;
    }
}

std::string fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::size_t default_jobs()
{
    if (const char* env = std::getenv("ILLUMINATI_JOBS")) {
        try {
            return std::max<std::size_t>(1, std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError("ILLUMINATI_JOBS must be a positive integer");
        }
    }
    return 1;
}

void require_file(const std::string& path, const std::string& what)
{
    if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
}

void require_writable_target(const std::string& path, bool force)
{
    if (fs::exists(path) && !force) throw UsageError(path + " exists (use --force to overwrite)");
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) throw UsageError("directory does not exist: " + parent.string());
}

void prepare_output_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Graph selection shared by explain, eval and export-dot.
struct Selection {
    std::string split = "test";
    std::string ids;

    void add_options(CLI::App* cmd)
    {
        cmd->add_option("--split", split, "Dataset split to process (train, validation, test, all)")
            ->check(CLI::IsMember({"train", "validation", "val", "test", "all"}));
        cmd->add_option("--ids", ids, "Comma-separated graph ids (overrides --split)");
    }

    [[nodiscard]] std::vector<AttributedGraph> select(const Dataset& data) const
    {
        std::vector<AttributedGraph> out;
        if (!ids.empty()) {
            for (const auto& id : split_list(ids)) {
                auto it = std::find_if(data.graphs.begin(), data.graphs.end(),
                                       [&](const AttributedGraph& g) { return g.graph_id() == id; });
                if (it == data.graphs.end()) throw UsageError("unknown graph id " + id);
                out.push_back(*it);
            }
            return out;
        }
        if (split == "all") return data.graphs;
        for (auto i : data.split_indices(split)) out.push_back(data.graphs[i]);
        return out;
    }
};

// ---------------------------------------------------------------- gen-dataset

struct GenArgs {
    std::string kind = "ba2motifs";
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::size_t base_nodes = 20;
    std::string out;
    bool force = false;
};

int cmd_gen_dataset(const GenArgs& a)
{
    if (a.kind != "ba2motifs") throw UsageError("unsupported dataset kind " + a.kind);
    require_writable_target(a.out, a.force);
    Ba2MotifsOptions opt;
    opt.base_nodes = a.base_nodes;
    const auto data = generate_ba2motifs(a.n, a.seed, opt);
    save_dataset(data, a.out);
    double nodes = 0.0;
    for (const auto& g : data.graphs) nodes += static_cast<double>(g.node_count());
    std::cout << "graphs=" << data.graphs.size() << " avg_nodes=" << fixed(nodes / static_cast<double>(data.graphs.size()))
              << " train=" << data.split.train.size() << " val=" << data.split.validation.size()
              << " test=" << data.split.test.size() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string data;
    std::string out;
    std::uint64_t seed = 0;
    double lr = 1e-3;
    std::size_t epochs = 300;
    std::vector<std::size_t> hidden{20, 20, 20};
    std::vector<std::size_t> head_hidden;
    bool force = false;
    bool verbose = false;
};

int cmd_train(const TrainArgs& a)
{
    require_file(a.data, "dataset");
    require_writable_target(a.out, a.force);
    const auto data = load_dataset(a.data);
    ArchitectureSpec arch;
    arch.attr_dim = data.attr_dim;
    arch.num_classes = data.num_classes;
    arch.gcn_hidden = a.hidden;
    arch.head_hidden = a.head_hidden;
    TrainOptions opt;
    opt.learning_rate = a.lr;
    opt.epochs = a.epochs;
    opt.seed = a.seed;
    const auto result = train(arch, data, opt);
    save_model(result.model, a.out);
    std::cout << "accuracy train=" << fixed(accuracy(result.model, data, data.split.train))
              << " val=" << fixed(accuracy(result.model, data, data.split.validation))
              << " test=" << fixed(accuracy(result.model, data, data.split.test)) << "\n";
    if (a.verbose) {
        for (const auto& s : result.trace) {
            std::cout << "epoch " << s.epoch << " loss=" << fixed(s.loss) << " train=" << fixed(s.train_accuracy)
                      << " val=" << fixed(s.validation_accuracy) << "\n";
        }
    }
    return exit_ok;
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
    std::string model;
    std::string data;
    std::string out_dir;
    Selection selection;
    ExplainConfig config;
    std::string mode = "full";
    std::string agg1 = "max";
    std::string agg2 = "max";
    std::string pair_agg = "mean";
    std::string edge_sharing = "independent";
    std::string attr_sharing = "independent";
    bool deterministic = false;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

int cmd_explain(ExplainArgs a)
{
    require_file(a.model, "model");
    require_file(a.data, "dataset");
    prepare_output_dir(a.out_dir);
    a.config.mode = parse_mode(a.mode);
    a.config.agg1 = parse_aggregation(a.agg1);
    a.config.agg2 = parse_aggregation(a.agg2);
    a.config.pair_agg = parse_aggregation(a.pair_agg);
    a.config.sharing.edges = parse_edge_sharing(a.edge_sharing);
    a.config.sharing.attributes = parse_attribute_sharing(a.attr_sharing);
    a.config.hard_concrete.stochastic = !a.deterministic;
    a.config.hard_concrete.seed = a.seed;
    try {
        a.config.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto model = load_model(a.model);
    const auto data = load_dataset(a.data);
    const auto graphs = a.selection.select(data);
    for (const auto& g : graphs) {
        if (g.attr_dim() != model.attr_dim) {
            throw Error(ErrorCode::shape_mismatch, "graph " + g.graph_id() + " attr_dim does not match the model");
        }
    }
    parallel_for(graphs.size(), a.jobs, [&](std::size_t i) {
        const auto e = explain(model, graphs[i], a.config);
        save_explanation(e, graphs[i], a.config, fs::path(a.out_dir) / explanation_file_name(graphs[i].graph_id()));
    });
    std::cout << "explained=" << graphs.size() << " out=" << a.out_dir << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string model;
    std::string data;
    std::string explanations;
    Selection selection;
    std::size_t k = 0;
    double rate = 0.0;
    std::size_t attr_top = 0;
    std::string sweep;
    std::string csv;
    std::string report;
    std::size_t jobs = 1;
};

std::vector<Explanation> load_explanations(const std::string& dir, const std::vector<AttributedGraph>& graphs)
{
    std::vector<Explanation> out;
    std::string missing;
    for (const auto& g : graphs) {
        const auto path = fs::path(dir) / explanation_file_name(g.graph_id());
        if (!fs::is_regular_file(path)) {
            missing += (missing.empty() ? "" : ",") + g.graph_id();
            continue;
        }
        out.push_back(load_explanation(path).explanation);
    }
    if (!missing.empty()) throw Error(ErrorCode::missing_explanation, missing);
    return out;
}

int cmd_eval(const EvalArgs& a)
{
    require_file(a.model, "model");
    require_file(a.data, "dataset");
    if (!fs::is_directory(a.explanations)) throw UsageError("explanation directory not found: " + a.explanations);
    if (a.k > 0 && a.rate > 0.0) throw UsageError("--k and --rate are mutually exclusive");
    const Budget budget = a.rate > 0.0 ? Budget::top_rate(a.rate) : a.k > 0 ? Budget::top_k(a.k) : Budget::full();
    const auto model = load_model(a.model);
    const auto data = load_dataset(a.data);
    const auto graphs = a.selection.select(data);
    const auto explanations = load_explanations(a.explanations, graphs);

    const auto report = evaluate(model, graphs, explanations, budget,
                                 a.attr_top > 0 ? std::optional<std::size_t>(a.attr_top) : std::nullopt, a.jobs);
    std::cout << "ep_explained=" << fixed(report.ep_explained) << " ep_remaining=" << fixed(report.ep_remaining)
              << " sparsity=" << (report.sparsity ? fixed(*report.sparsity) : std::string("NA"))
              << " eligible=" << report.eligible_count << "\n";
    if (report.ep_attribute) std::cout << "ep_attribute=" << fixed(*report.ep_attribute) << "\n";
    std::cout << "evaluated=" << report.evaluated_count << " skipped=" << graphs.size() - report.evaluated_count
              << " budget=" << budget.describe() << "\n";

    if (!a.report.empty()) io::write_file_atomic(a.report, report_to_json(report).dump(1) + "\n");
    if (!a.csv.empty()) io::write_file_atomic(a.csv, csv_header() + verdicts_to_csv(report.per_graph));
    if (!a.sweep.empty()) {
        std::size_t largest = 0;
        for (const auto& g : graphs) largest = std::max(largest, g.node_count());
        std::string csv = csv_header();
        for (std::size_t k = 1; k <= largest; ++k) {
            const auto step = evaluate(model, graphs, explanations, Budget::top_k(k), std::nullopt, a.jobs);
            csv += verdicts_to_csv(step.per_graph);
        }
        io::write_file_atomic(a.sweep, csv);
    }
    return exit_ok;
}

// ---------------------------------------------------------------- export-dot

struct DotArgs {
    std::string data;
    std::string explanations;
    std::string out_dir;
    Selection selection;
    std::size_t top_attrs = 3;
};

int cmd_export_dot(const DotArgs& a)
{
    require_file(a.data, "dataset");
    if (!fs::is_directory(a.explanations)) throw UsageError("explanation directory not found: " + a.explanations);
    prepare_output_dir(a.out_dir);
    const auto data = load_dataset(a.data);
    const auto graphs = a.selection.select(data);
    const auto explanations = load_explanations(a.explanations, graphs);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (explanations[i].node_score.size() != graphs[i].node_count() ||
            explanations[i].edge_score.size() != graphs[i].arc_count()) {
            throw Error(ErrorCode::shape_mismatch, "explanation does not match graph " + graphs[i].graph_id());
        }
        io::write_file_atomic(fs::path(a.out_dir) / (graphs[i].graph_id() + ".dot"),
                              to_dot(graphs[i], explanations[i], a.top_attrs));
    }
    std::cout << "exported=" << graphs.size() << " out=" << a.out_dir << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Graph classifier explanation via edge and attribute masks"};
    app.require_subcommand(1);
    std::size_t jobs = 1;

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-dataset", "Generate a synthetic dataset file");
    gen_cmd->add_option("--kind", gen.kind, "Dataset kind (ba2motifs)");
    gen_cmd->add_option("--n", gen.n, "Number of graphs (even)");
    gen_cmd->add_option("--seed", gen.seed, "Generation seed");
    gen_cmd->add_option("--base-nodes", gen.base_nodes, "Nodes in the Barabasi-Albert base");
    gen_cmd->add_option("--out", gen.out, "Output path (.json or .json.gz)")->required();
    gen_cmd->add_flag("--force", gen.force, "Overwrite an existing file");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train a GCN classifier");
    train_cmd->add_option("--data", tr.data, "Dataset file")->required();
    train_cmd->add_option("--out", tr.out, "Model output path")->required();
    train_cmd->add_option("--seed", tr.seed, "Initialization seed");
    train_cmd->add_option("--lr", tr.lr, "Adam learning rate");
    train_cmd->add_option("--epochs", tr.epochs, "Full-batch epochs");
    train_cmd->add_option("--hidden", tr.hidden, "GCN layer widths")->delimiter(',');
    train_cmd->add_option("--head-hidden", tr.head_hidden, "Hidden dense widths before the logit layer")->delimiter(',');
    train_cmd->add_flag("--force", tr.force, "Overwrite an existing model file");
    train_cmd->add_flag("--verbose", tr.verbose, "Print the per-epoch trace after the accuracy line");

    ExplainArgs ex;
    auto* explain_cmd = app.add_subcommand("explain", "Learn masks and write one explanation per graph");
    explain_cmd->add_option("--model", ex.model, "Model file")->required();
    explain_cmd->add_option("--data", ex.data, "Dataset file")->required();
    explain_cmd->add_option("--out-dir", ex.out_dir, "Directory for explanation JSON files")->required();
    ex.selection.add_options(explain_cmd);
    explain_cmd->add_option("--mode", ex.mode, "full, edge_only or attribute_only")
        ->check(CLI::IsMember({"full", "edge_only", "attribute_only"}));
    explain_cmd->add_option("--agg1", ex.agg1, "Per-direction aggregation")->check(CLI::IsMember({"max", "mean", "min"}));
    explain_cmd->add_option("--agg2", ex.agg2, "Cross-direction aggregation")->check(CLI::IsMember({"max", "mean", "min"}));
    explain_cmd->add_option("--pair-agg", ex.pair_agg, "Undirected pair aggregation")
        ->check(CLI::IsMember({"max", "mean", "min"}));
    explain_cmd->add_option("--edge-sharing", ex.edge_sharing, "independent or undirected_pair");
    explain_cmd->add_option("--attr-sharing", ex.attr_sharing, "independent, per_node or global");
    explain_cmd->add_option("--epochs", ex.config.epochs, "Mask learning epochs");
    explain_cmd->add_option("--lr", ex.config.learning_rate, "Mask learning rate");
    explain_cmd->add_option("--lambda-edge-size", ex.config.lambda_edge_size);
    explain_cmd->add_option("--lambda-attr-size", ex.config.lambda_attr_size);
    explain_cmd->add_option("--lambda-edge-entropy", ex.config.lambda_edge_entropy);
    explain_cmd->add_option("--lambda-attr-entropy", ex.config.lambda_attr_entropy);
    explain_cmd->add_option("--beta", ex.config.hard_concrete.beta, "Hard-concrete temperature");
    explain_cmd->add_flag("--deterministic", ex.deterministic, "Use u = 0.5 instead of sampled noise");
    explain_cmd->add_option("--seed", ex.seed, "Mask initialization and noise seed");
    explain_cmd->add_option("--jobs", jobs, "Worker threads (default: ILLUMINATI_JOBS or 1)");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Score explanations: EP, EP of remaining subgraphs, Sparsity");
    eval_cmd->add_option("--model", ev.model, "Model file")->required();
    eval_cmd->add_option("--data", ev.data, "Dataset file")->required();
    eval_cmd->add_option("--explanations", ev.explanations, "Directory written by explain")->required();
    ev.selection.add_options(eval_cmd);
    eval_cmd->add_option("--k", ev.k, "Keep the top-k nodes");
    eval_cmd->add_option("--rate", ev.rate, "Keep round(rate * n) nodes");
    eval_cmd->add_option("--attr-top", ev.attr_top, "Also report EP with only each node's top attributes");
    eval_cmd->add_option("--sweep", ev.sweep, "Write a CSV over budgets k = 1..max nodes");
    eval_cmd->add_option("--csv", ev.csv, "Write per-graph verdicts for the chosen budget");
    eval_cmd->add_option("--report", ev.report, "Write the full report as JSON");
    eval_cmd->add_option("--jobs", jobs, "Worker threads (default: ILLUMINATI_JOBS or 1)");

    DotArgs dot;
    auto* dot_cmd = app.add_subcommand("export-dot", "Render explanations as Graphviz DOT");
    dot_cmd->add_option("--data", dot.data, "Dataset file")->required();
    dot_cmd->add_option("--explanations", dot.explanations, "Directory written by explain")->required();
    dot_cmd->add_option("--out-dir", dot.out_dir, "Directory for .dot files")->required();
    dot.selection.add_options(dot_cmd);
    dot_cmd->add_option("--top-attrs", dot.top_attrs, "Attributes listed in node tooltips");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        const bool jobs_given = (explain_cmd->parsed() && explain_cmd->count("--jobs") > 0) ||
                                (eval_cmd->parsed() && eval_cmd->count("--jobs") > 0);
        if (!jobs_given) jobs = default_jobs();
        ex.jobs = jobs;
        ev.jobs = jobs;
        if (gen_cmd->parsed()) return cmd_gen_dataset(gen);
        if (train_cmd->parsed()) return cmd_train(tr);
        if (explain_cmd->parsed()) return cmd_explain(ex);
        if (eval_cmd->parsed()) return cmd_eval(ev);
        if (dot_cmd->parsed()) return cmd_export_dot(dot);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_compute;
    }
    return exit_usage;
}
