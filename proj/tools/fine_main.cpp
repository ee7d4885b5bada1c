#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fine/datasets.hpp"
#include "fine/errors.hpp"
#include "fine/pipeline.hpp"
#include "fine/text_io.hpp"

namespace {

using nlohmann::json;

/// Pipeline options shared by embed / distances / eval-classify. Values given
/// on the command line win over the JSON config file.
struct PipelineCli {
    std::string input;
    std::string pdf_kind = "kde";
    std::string metric = "fisher_kl";
    bool geodesic = false;
    int graph_k = 0;
    std::string embed = "cmds";
    int dim = 2;
    std::string heat_t = "auto";
    double beta = 0.0;
    int knn_k = 5;
    std::uint64_t seed = 0;
    std::string out = "fine_out";
    std::string config_path;

    CLI::Option* opt_input = nullptr;
    CLI::Option* opt_pdf_kind = nullptr;
    CLI::Option* opt_metric = nullptr;
    CLI::Option* opt_geodesic = nullptr;
    CLI::Option* opt_graph_k = nullptr;
    CLI::Option* opt_embed = nullptr;
    CLI::Option* opt_dim = nullptr;
    CLI::Option* opt_heat_t = nullptr;
    CLI::Option* opt_beta = nullptr;
    CLI::Option* opt_knn_k = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_out = nullptr;
};

void add_pipeline_flags(CLI::App* cmd, PipelineCli& o) {
    o.opt_input = cmd->add_option("--input", o.input, "Input collection (CSV file or directory)");
    o.opt_pdf_kind = cmd->add_option("--pdf-kind", o.pdf_kind,
                                     "Density kind: kde, multinomial, gaussian_params");
    o.opt_metric = cmd->add_option(
        "--metric", o.metric,
        "Dissimilarity: fisher_kl, hellinger, cosine, euclidean_l2, fisher_exact_gaussian");
    o.opt_geodesic =
        cmd->add_flag("--geodesic,!--no-geodesic", o.geodesic, "Run graph geodesics on the matrix");
    o.opt_graph_k = cmd->add_option("--graph-k", o.graph_k,
                                    "Neighbor count for graphs (0 = max(3, ceil(log2 N)))");
    o.opt_embed = cmd->add_option("--embed", o.embed, "Embedding: cmds, lem, ccdr, pca");
    o.opt_dim = cmd->add_option("--dim", o.dim, "Embedding dimension");
    o.opt_heat_t =
        cmd->add_option("--heat-t", o.heat_t, "Heat kernel scale: positive number, inf, or auto");
    o.opt_beta = cmd->add_option("--beta", o.beta, "Same-label weight boost for ccdr");
    o.opt_knn_k = cmd->add_option("--knn-k", o.knn_k, "Neighbor count for classification");
    o.opt_seed = cmd->add_option("--seed", o.seed, "Random seed");
    o.opt_out = cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--config", o.config_path, "JSON config file (flags override it)");
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fine::EmptyInputError("config file not readable: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw fine::FormatError("config file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw fine::FormatError("config file " + path + ": expected an object");
    return doc;
}

template <typename T>
void merge_key(const json& cfg, const char* key, const CLI::Option* opt, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (!cfg.contains(key)) return;
    try {
        target = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw fine::FormatError(std::string("config key '") + key + "': " + e.what());
    }
}

void merge_heat_t(const json& cfg, const CLI::Option* opt, std::string& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (!cfg.contains("heat_t")) return;
    const json& v = cfg.at("heat_t");
    if (v.is_string()) {
        target = v.get<std::string>();
    } else if (v.is_number()) {
        target = fine::format_double(v.get<double>());
    } else {
        throw fine::FormatError("config key 'heat_t': expected number or string");
    }
}

double parse_heat_t(const std::string& s) {
    if (s == "auto") return 0.0;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    const auto v = fine::parse_double(s);
    if (!v || !(*v > 0.0))
        throw fine::InvalidParameterError("--heat-t expects a positive number, inf, or auto");
    return *v;
}

fine::PipelineConfig resolve_pipeline(PipelineCli& o) {
    if (!o.config_path.empty()) {
        const json cfg = load_config_file(o.config_path);
        merge_key(cfg, "input", o.opt_input, o.input);
        merge_key(cfg, "pdf_kind", o.opt_pdf_kind, o.pdf_kind);
        merge_key(cfg, "metric", o.opt_metric, o.metric);
        merge_key(cfg, "geodesic", o.opt_geodesic, o.geodesic);
        merge_key(cfg, "graph_k", o.opt_graph_k, o.graph_k);
        merge_key(cfg, "embed", o.opt_embed, o.embed);
        merge_key(cfg, "dim", o.opt_dim, o.dim);
        merge_heat_t(cfg, o.opt_heat_t, o.heat_t);
        merge_key(cfg, "beta", o.opt_beta, o.beta);
        merge_key(cfg, "knn_k", o.opt_knn_k, o.knn_k);
        merge_key(cfg, "seed", o.opt_seed, o.seed);
        merge_key(cfg, "out", o.opt_out, o.out);
    }
    if (o.input.empty())
        throw fine::InvalidParameterError("--input is required (flag or config file)");
    fine::PipelineConfig cfg;
    cfg.input = o.input;
    cfg.pdf_kind = fine::pdf_kind_from_name(o.pdf_kind);
    cfg.metric = fine::metric_from_name(o.metric);
    cfg.geodesic = o.geodesic;
    cfg.graph_k = o.graph_k;
    cfg.embed = fine::embed_method_from_name(o.embed);
    cfg.dim = o.dim;
    cfg.heat_t = parse_heat_t(o.heat_t);
    cfg.beta = o.beta;
    cfg.knn_k = o.knn_k;
    cfg.seed = o.seed;
    cfg.out_dir = o.out;
    return cfg;
}

void print_warnings(const fine::PipelineResult& result) {
    if (result.diag.bridged_edges > 0)
        std::cerr << "warning: neighbor graph fragmented; added " << result.diag.bridged_edges
                  << " bridge edge(s)\n";
    if (result.diag.zero_padded_dims > 0)
        std::cerr << "warning: " << result.diag.zero_padded_dims
                  << " embedding axis(es) zero-padded for lack of positive spectrum\n";
}

int run_embed_like(PipelineCli& cli, bool with_embedding, const std::string& command) {
    const fine::PipelineConfig cfg = resolve_pipeline(cli);
    const fine::PipelineResult result = fine::run_pipeline(cfg, with_embedding);
    fine::write_pipeline_artifacts(cfg, command, result);
    print_warnings(result);
    std::cout << command << ": " << result.distances.size() << " sets -> " << cfg.out_dir << "\n";
    return 0;
}

// --- synth ------------------------------------------------------------------

struct SynthCli {
    std::string kind;
    int n_sets = 200;
    int samples = 100;
    double noise = 0.5;
    double alpha = 0.1;
    double beta = 0.1;
    int rows = 10;
    int cols = 10;
    int classes = 4;
    int dict = 500;
    int docs_per_class = 100;
    int doc_length = 300;
    double concentration = 0.2;
    std::uint64_t seed = 0;
    std::string out = "fine_out";
};

int run_synth(const SynthCli& o) {
    namespace fs = std::filesystem;
    fs::create_directories(o.out);
    nlohmann::ordered_json params;
    if (o.kind == "swiss_roll") {
        const fine::SwissRollData data =
            fine::gen_swiss_roll_sets(o.n_sets, o.samples, o.noise, o.seed);
        fine::save_collection(data.collection, (fs::path(o.out) / "collection.csv").string());
        fine::save_ground_truth(data.collection.ids(), data.ground_truth,
                                (fs::path(o.out) / "ground_truth.csv").string());
        params = {{"n_sets", o.n_sets}, {"samples", o.samples}, {"noise", o.noise}};
        std::cout << "synth: wrote " << o.n_sets << " swiss-roll sets to " << o.out << "\n";
    } else if (o.kind == "gaussian_grid") {
        const fine::GaussianGrid grid = fine::gen_gaussian_grid(o.alpha, o.beta, o.rows, o.cols);
        fine::GaussianCollection collection{grid.ids(), grid.params};
        fine::save_gaussian_params(collection, (fs::path(o.out) / "params.csv").string());
        params = {{"alpha", o.alpha}, {"beta", o.beta}, {"rows", o.rows}, {"cols", o.cols}};
        std::cout << "synth: wrote " << grid.params.size() << " grid params to " << o.out << "\n";
    } else if (o.kind == "multinomial_clusters") {
        const fine::TermCountCollection corpus = fine::gen_multinomial_clusters(
            o.classes, o.dict, o.docs_per_class, o.doc_length, o.concentration, o.seed);
        fine::save_term_counts(corpus, (fs::path(o.out) / "term_counts.csv").string(),
                               (fs::path(o.out) / "term_counts.labels.csv").string());
        params = {{"classes", o.classes},
                  {"dict", o.dict},
                  {"docs_per_class", o.docs_per_class},
                  {"doc_length", o.doc_length},
                  {"concentration", o.concentration}};
        std::cout << "synth: wrote " << corpus.docs.size() << " documents to " << o.out << "\n";
    } else {
        throw fine::InvalidParameterError(
            "synth kind must be swiss_roll, gaussian_grid, or multinomial_clusters");
    }
    nlohmann::ordered_json run;
    run["command"] = "synth";
    run["config"] = {{"kind", o.kind}, {"params", params}, {"seed", o.seed}, {"out", o.out}};
    fine::write_file((fs::path(o.out) / "run.json").string(), run.dump(2) + "\n");
    return 0;
}

// --- eval-classify ----------------------------------------------------------

struct EvalCli {
    double train_frac = 0.5;
    int folds = 20;
    std::string classifier = "knn";
    double kernel_t = 1.0;
    std::vector<int> dim_sweep;
    std::vector<double> beta_sweep;

    CLI::Option* opt_train_frac = nullptr;
    CLI::Option* opt_folds = nullptr;
    CLI::Option* opt_classifier = nullptr;
    CLI::Option* opt_kernel_t = nullptr;
    CLI::Option* opt_dim_sweep = nullptr;
    CLI::Option* opt_beta_sweep = nullptr;
};

int run_eval(PipelineCli& cli, EvalCli& e) {
    if (!cli.config_path.empty()) {
        const json cfg = load_config_file(cli.config_path);
        merge_key(cfg, "train_frac", e.opt_train_frac, e.train_frac);
        merge_key(cfg, "folds", e.opt_folds, e.folds);
        merge_key(cfg, "classifier", e.opt_classifier, e.classifier);
        merge_key(cfg, "kernel_t", e.opt_kernel_t, e.kernel_t);
        merge_key(cfg, "dim_sweep", e.opt_dim_sweep, e.dim_sweep);
        merge_key(cfg, "beta_sweep", e.opt_beta_sweep, e.beta_sweep);
    }
    fine::EvalConfig cfg;
    cfg.pipeline = resolve_pipeline(cli);
    cfg.train_frac = e.train_frac;
    cfg.folds = e.folds;
    cfg.classifier = fine::classifier_from_name(e.classifier);
    cfg.kernel_t = e.kernel_t;
    cfg.dim_sweep = e.dim_sweep;
    cfg.beta_sweep = e.beta_sweep;

    const fine::EvalOutcome outcome = fine::eval_classify(cfg);
    std::filesystem::create_directories(cfg.pipeline.out_dir);
    const std::string path =
        (std::filesystem::path(cfg.pipeline.out_dir) / "metrics.json").string();
    fine::write_eval_json(cfg, outcome, path);
    for (const fine::SweepOutcome& s : outcome.sweeps)
        std::cout << "dim=" << s.dim << " beta=" << s.beta << ": accuracy " << s.mean_accuracy
                  << " +/- " << s.std_accuracy << " over " << s.folds.size() << " folds\n";
    const fine::SweepOutcome& best = outcome.sweeps[static_cast<size_t>(outcome.best_index)];
    std::cout << "best: dim=" << best.dim << " beta=" << best.beta << " accuracy "
              << best.mean_accuracy << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-geometric embedding pipeline"};
    app.require_subcommand(1);

    PipelineCli embed_cli;
    CLI::App* cmd_embed = app.add_subcommand("embed", "Full pipeline: densities to embedding");
    add_pipeline_flags(cmd_embed, embed_cli);

    PipelineCli dist_cli;
    CLI::App* cmd_distances =
        app.add_subcommand("distances", "Stop after the dissimilarity matrix (and geodesics)");
    add_pipeline_flags(cmd_distances, dist_cli);

    SynthCli synth_cli;
    CLI::App* cmd_synth = app.add_subcommand("synth", "Generate a synthetic collection");
    cmd_synth->add_option("kind", synth_cli.kind,
                          "swiss_roll, gaussian_grid, or multinomial_clusters")
        ->required();
    cmd_synth->add_option("--n-sets", synth_cli.n_sets, "Swiss roll: number of sets");
    cmd_synth->add_option("--samples", synth_cli.samples, "Swiss roll: samples per set");
    cmd_synth->add_option("--noise", synth_cli.noise, "Swiss roll: noise scale");
    cmd_synth->add_option("--alpha", synth_cli.alpha, "Grid: mu step");
    cmd_synth->add_option("--beta", synth_cli.beta, "Grid: sigma step");
    cmd_synth->add_option("--rows", synth_cli.rows, "Grid: mu count");
    cmd_synth->add_option("--cols", synth_cli.cols, "Grid: sigma count");
    cmd_synth->add_option("--classes", synth_cli.classes, "Clusters: class count");
    cmd_synth->add_option("--dict", synth_cli.dict, "Clusters: dictionary size");
    cmd_synth->add_option("--docs-per-class", synth_cli.docs_per_class, "Clusters: documents per class");
    cmd_synth->add_option("--doc-length", synth_cli.doc_length, "Clusters: counts per document");
    cmd_synth->add_option("--concentration", synth_cli.concentration,
                          "Clusters: Dirichlet concentration off the class block");
    cmd_synth->add_option("--seed", synth_cli.seed, "Random seed");
    cmd_synth->add_option("--out", synth_cli.out, "Output directory");

    std::vector<int> resolutions{5, 10, 20};
    int conv_graph_k = 0;
    std::string conv_out = "fine_out";
    CLI::App* cmd_conv = app.add_subcommand(
        "validate-convergence", "Geodesic error against the closed-form Gaussian distance");
    cmd_conv->add_option("--resolutions", resolutions, "Grid resolutions r (each grid is r x r)")
        ->delimiter(',');
    cmd_conv->add_option("--graph-k", conv_graph_k, "Neighbor count (0 = default)");
    cmd_conv->add_option("--out", conv_out, "Output directory");

    PipelineCli eval_pipeline_cli;
    EvalCli eval_cli;
    CLI::App* cmd_eval =
        app.add_subcommand("eval-classify", "Cross-validated classification on the embedding");
    add_pipeline_flags(cmd_eval, eval_pipeline_cli);
    eval_cli.opt_train_frac =
        cmd_eval->add_option("--train-frac", eval_cli.train_frac, "Training fraction per class");
    eval_cli.opt_folds = cmd_eval->add_option("--folds", eval_cli.folds, "Cross-validation folds");
    eval_cli.opt_classifier =
        cmd_eval->add_option("--classifier", eval_cli.classifier, "knn or kernel_nearest_mean");
    eval_cli.opt_kernel_t =
        cmd_eval->add_option("--kernel-t", eval_cli.kernel_t, "Diffusion kernel scale");
    eval_cli.opt_dim_sweep =
        cmd_eval->add_option("--dim-sweep", eval_cli.dim_sweep, "Dimensions to sweep")
            ->delimiter(',');
    eval_cli.opt_beta_sweep =
        cmd_eval->add_option("--beta-sweep", eval_cli.beta_sweep, "Beta values to sweep")
            ->delimiter(',');

    std::string plot_input;
    bool by_label = true;
    std::string plot_out = "fine_out";
    CLI::App* cmd_plot = app.add_subcommand("plot-data", "Split an embedding into plot files");
    cmd_plot->add_option("--input", plot_input, "embedding.csv path")->required();
    cmd_plot->add_flag("--by-label,!--no-by-label", by_label, "One file per class label");
    cmd_plot->add_option("--out", plot_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_embed->parsed()) return run_embed_like(embed_cli, true, "embed");
        if (cmd_distances->parsed()) return run_embed_like(dist_cli, false, "distances");
        if (cmd_synth->parsed()) return run_synth(synth_cli);
        if (cmd_conv->parsed()) {
            const std::vector<fine::ConvergenceRow> rows =
                fine::convergence_report(resolutions, conv_graph_k, 0);
            std::filesystem::create_directories(conv_out);
            fine::write_convergence_csv(
                rows, (std::filesystem::path(conv_out) / "report.csv").string());
            for (const fine::ConvergenceRow& r : rows)
                std::cout << r.resolution << "x" << r.resolution << ": estimate " << r.estimate
                          << " exact " << r.exact << " abs_error " << r.abs_error << "\n";
            return 0;
        }
        if (cmd_eval->parsed()) return run_eval(eval_pipeline_cli, eval_cli);
        if (cmd_plot->parsed()) {
            const fine::EmbeddingTable table = fine::load_embedding_csv(plot_input);
            const std::vector<std::string> written =
                fine::write_plot_data(table, by_label, plot_out);
            for (const std::string& path : written) std::cout << "wrote " << path << "\n";
            return 0;
        }
    } catch (const fine::Error& e) {
        std::cerr << "fine: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fine: unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
