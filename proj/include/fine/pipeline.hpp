#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fine/datasets.hpp"
#include "fine/density.hpp"
#include "fine/divergence.hpp"
#include "fine/embedding.hpp"
#include "fine/errors.hpp"
#include "fine/geodesic.hpp"

namespace fine {

enum class PdfKind { kde, multinomial, gaussian_params };

std::string pdf_kind_name(PdfKind k);
PdfKind pdf_kind_from_name(const std::string& name);

/// Raised by pipeline stages so callers can report which stage failed.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& msg)
        : Error("stage " + stage + ": " + msg), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    std::string input;
    PdfKind pdf_kind = PdfKind::kde;
    Metric metric = Metric::fisher_kl;
    bool geodesic = false;
    int graph_k = 0;  // 0 picks default_graph_k(N)
    EmbedMethod embed = EmbedMethod::cmds;
    int dim = 2;
    double heat_t = 0.0;  // 0 auto, +inf unit weights
    double beta = 0.0;
    int knn_k = 5;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 0;  // 0 defers to FINE_THREADS / core count
};

struct Diagnostics {
    int kl_clamped = 0;
    int bridged_edges = 0;
    double negative_eigen_mass = 0.0;
    int zero_padded_dims = 0;
};

/// Density estimates of one kind for a whole collection, with row bookkeeping.
struct FittedPdfs {
    PdfKind kind = PdfKind::kde;
    std::vector<std::string> ids;
    std::vector<std::optional<int>> labels;
    std::map<int, std::string> label_names;
    std::vector<Kde> kdes;
    std::vector<MultinomialPdf> multinomials;
    std::vector<GaussianParams> gaussians;

    int size() const { return static_cast<int>(ids.size()); }
};

/// Loads the input (file or directory) and fits one density per set.
FittedPdfs fit_pdfs(const std::string& input, PdfKind kind);

DissimilarityMatrix pairwise_distances(const FittedPdfs& pdfs, Metric metric, int threads,
                                       Diagnostics* diag);

struct GeodesicResult {
    NeighborGraph graph;
    DissimilarityMatrix distances;
};

/// kNN graph + bridging + all-pairs shortest paths over a dissimilarity matrix.
GeodesicResult geodesic_stage(const DissimilarityMatrix& d, int graph_k, int threads,
                              Diagnostics* diag);

struct PipelineResult {
    FittedPdfs pdfs;
    DissimilarityMatrix distances;  // pre-geodesic
    std::optional<NeighborGraph> graph;
    std::optional<DissimilarityMatrix> geodesic;
    std::optional<Embedding> embedding;
    Diagnostics diag;
    int resolved_graph_k = 0;  // k actually used, or the configured value if unused
};

/// Runs fit -> distances [-> geodesic] [-> embedding]. Errors surface as
/// StageError naming the failing stage.
PipelineResult run_pipeline(const PipelineConfig& cfg, bool with_embedding);

/// Writes the artifacts for `embed` / `distances` into cfg.out_dir:
/// distances.csv, graph.csv + geodesic.csv when enabled, embedding.csv +
/// spectrum.json when an embedding was computed, and run.json.
void write_pipeline_artifacts(const PipelineConfig& cfg, const std::string& command,
                              const PipelineResult& result);

enum class Classifier { knn, kernel_nearest_mean };

std::string classifier_name(Classifier c);
Classifier classifier_from_name(const std::string& name);

struct EvalConfig {
    PipelineConfig pipeline;
    double train_frac = 0.5;
    int folds = 20;
    Classifier classifier = Classifier::knn;
    double kernel_t = 1.0;         // kernel_nearest_mean scale
    std::vector<int> dim_sweep;    // empty means {pipeline.dim}
    std::vector<double> beta_sweep;  // empty means {pipeline.beta}
};

struct FoldOutcome {
    std::uint64_t seed = 0;
    double accuracy = 0.0;
};

struct SweepOutcome {
    int dim = 0;
    double beta = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // sample standard deviation across folds
    std::vector<FoldOutcome> folds;
};

struct EvalOutcome {
    std::vector<SweepOutcome> sweeps;
    int best_index = 0;  // highest mean accuracy, earlier sweep on ties
};

/// Per-class index split: within each class the membership is shuffled with
/// Rng(seed) and the first floor(train_frac * n_c) go to train. A class whose
/// train share would be empty raises StratificationError.
struct Split {
    std::vector<int> train;
    std::vector<int> test;
};
Split stratified_split(const std::vector<std::optional<int>>& labels, double train_frac,
                       std::uint64_t seed);

/// Cross-validated classification: per fold, a stratified split, a joint
/// embedding with test labels withheld (ccdr), and a classifier pass.
/// Fold f uses seed cfg.pipeline.seed + f.
EvalOutcome eval_classify(const EvalConfig& cfg);

void write_eval_json(const EvalConfig& cfg, const EvalOutcome& result, const std::string& path);

struct ConvergenceRow {
    int resolution = 0;
    double estimate = 0.0;
    double exact = 0.0;
    double abs_error = 0.0;
};

/// Corner-to-corner geodesic estimate on a mu x sigma parameter grid spanning
/// mu in [0,1], sigma in [1,2], with symmetrized closed-form-KL edge weights
/// sqrt(KL(a,b) + KL(b,a)).
double corner_geodesic_estimate(int mu_steps, int sigma_steps, int graph_k, int threads);

/// One row per resolution r: the r x r grid estimate against the closed-form
/// Fisher distance between the corner parameters (0,1) and (1,2).
std::vector<ConvergenceRow> convergence_report(const std::vector<int>& resolutions, int graph_k,
                                               int threads);

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);

struct EmbeddingTable {
    std::vector<std::string> ids;
    std::vector<std::optional<int>> labels;
    Eigen::MatrixXd coords;
};

EmbeddingTable load_embedding_csv(const std::string& path);

/// Splits embedding rows into whitespace-separated coordinate files:
/// class_<label>.dat per label, or a single all.dat when by_label is false.
/// Returns the written paths.
std::vector<std::string> write_plot_data(const EmbeddingTable& table, bool by_label,
                                         const std::string& out_dir);

}  // namespace fine
