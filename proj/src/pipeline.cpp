#include "fine/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "fine/rng.hpp"
#include "fine/text_io.hpp"
#include "fine/threading.hpp"

namespace fine {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void rethrow_as_stage(const std::string& stage, const Error& e) {
    throw StageError(stage, e.what());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

}  // namespace

std::string pdf_kind_name(PdfKind k) {
    switch (k) {
        case PdfKind::kde: return "kde";
        case PdfKind::multinomial: return "multinomial";
        case PdfKind::gaussian_params: return "gaussian_params";
    }
    throw InvalidParameterError("unknown pdf kind enum value");
}

PdfKind pdf_kind_from_name(const std::string& name) {
    if (name == "kde") return PdfKind::kde;
    if (name == "multinomial") return PdfKind::multinomial;
    if (name == "gaussian_params") return PdfKind::gaussian_params;
    throw InvalidParameterError("unknown pdf kind name: " + name);
}

std::string classifier_name(Classifier c) {
    switch (c) {
        case Classifier::knn: return "knn";
        case Classifier::kernel_nearest_mean: return "kernel_nearest_mean";
    }
    throw InvalidParameterError("unknown classifier enum value");
}

Classifier classifier_from_name(const std::string& name) {
    if (name == "knn") return Classifier::knn;
    if (name == "kernel_nearest_mean") return Classifier::kernel_nearest_mean;
    throw InvalidParameterError("unknown classifier name: " + name);
}

FittedPdfs fit_pdfs(const std::string& input, PdfKind kind) {
    FittedPdfs out;
    out.kind = kind;
    try {
        switch (kind) {
            case PdfKind::kde: {
                const CollectionFormat format =
                    fs::is_directory(input) ? CollectionFormat::directory : CollectionFormat::long_csv;
                DatasetCollection collection = load_collection(input, format);
                out.ids = collection.ids();
                out.label_names = collection.label_names;
                out.kdes.reserve(collection.sets.size());
                out.labels.reserve(collection.sets.size());
                for (SampleSet& set : collection.sets) {
                    out.labels.push_back(set.label);
                    try {
                        out.kdes.push_back(fit_kde(set));
                    } catch (const Error& e) {
                        rethrow_as_stage("density", e);
                    }
                }
                break;
            }
            case PdfKind::multinomial: {
                const TermCountCollection corpus = load_term_counts(input);
                out.ids = corpus.ids();
                out.labels = corpus.labels();
                out.label_names = corpus.label_names;
                out.multinomials.reserve(corpus.docs.size());
                for (const TermDocument& doc : corpus.docs) {
                    try {
                        out.multinomials.push_back(term_frequency_pdf(doc.counts));
                    } catch (const Error& e) {
                        rethrow_as_stage("density", e);
                    }
                }
                break;
            }
            case PdfKind::gaussian_params: {
                GaussianCollection gaussians = load_gaussian_params(input);
                out.ids = std::move(gaussians.ids);
                out.labels.assign(out.ids.size(), std::nullopt);
                out.gaussians = std::move(gaussians.params);
                break;
            }
        }
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        rethrow_as_stage("input", e);
    }
    return out;
}

DissimilarityMatrix pairwise_distances(const FittedPdfs& pdfs, Metric metric, int threads,
                                       Diagnostics* diag) {
    const int workers = resolve_threads(threads);
    try {
        switch (pdfs.kind) {
            case PdfKind::kde: {
                MatrixDiagnostics mdiag;
                DissimilarityMatrix d =
                    build_dissimilarity_matrix(pdfs.kdes, pdfs.ids, metric, workers, &mdiag);
                if (diag != nullptr) diag->kl_clamped += mdiag.kl_clamped;
                return d;
            }
            case PdfKind::multinomial:
                return build_dissimilarity_matrix(pdfs.multinomials, pdfs.ids, metric, workers);
            case PdfKind::gaussian_params:
                return build_dissimilarity_matrix(pdfs.gaussians, pdfs.ids, metric, workers);
        }
        throw InvalidParameterError("unknown pdf kind enum value");
    } catch (const Error& e) {
        rethrow_as_stage("divergence", e);
    }
}

GeodesicResult geodesic_stage(const DissimilarityMatrix& d, int graph_k, int threads,
                              Diagnostics* diag) {
    try {
        const int k = graph_k > 0 ? graph_k : default_graph_k(d.size());
        NeighborGraph graph = build_neighbor_graph(d, k);
        int added = 0;
        graph = ensure_connected(graph, d, &added);
        if (diag != nullptr) diag->bridged_edges += added;
        DissimilarityMatrix distances =
            geodesic_distances(graph, d.ids, d.metric, resolve_threads(threads));
        return {std::move(graph), std::move(distances)};
    } catch (const Error& e) {
        rethrow_as_stage("geodesic", e);
    }
}

namespace {

/// Connected adjacency graph for the LEM family, bridging if needed.
NeighborGraph lem_adjacency(const DissimilarityMatrix& d, int graph_k, Diagnostics* diag) {
    const int k = graph_k > 0 ? graph_k : default_graph_k(d.size());
    NeighborGraph graph = build_neighbor_graph(d, k);
    int added = 0;
    graph = ensure_connected(graph, d, &added);
    if (diag != nullptr) diag->bridged_edges += added;
    return graph;
}

Eigen::MatrixXd pdf_vectors(const FittedPdfs& pdfs) {
    switch (pdfs.kind) {
        case PdfKind::multinomial: {
            const int n = pdfs.size();
            const int dict = pdfs.multinomials[0].dict_size();
            Eigen::MatrixXd rows(n, dict);
            for (int i = 0; i < n; ++i) rows.row(i) = pdfs.multinomials[static_cast<size_t>(i)].probs;
            return rows;
        }
        case PdfKind::gaussian_params: {
            const int n = pdfs.size();
            Eigen::MatrixXd rows(n, 2);
            for (int i = 0; i < n; ++i) {
                rows(i, 0) = pdfs.gaussians[static_cast<size_t>(i)].mu;
                rows(i, 1) = pdfs.gaussians[static_cast<size_t>(i)].sigma;
            }
            return rows;
        }
        case PdfKind::kde:
            throw InvalidParameterError(
                "pca embedding needs vector-valued PDFs (multinomial or gaussian_params)");
    }
    throw InvalidParameterError("unknown pdf kind enum value");
}

Embedding embed_stage(const PipelineConfig& cfg, const DissimilarityMatrix& d,
                      const FittedPdfs& pdfs, Diagnostics* diag, int* resolved_k) {
    try {
        LemParams params;
        params.k_neighbors = cfg.graph_k;
        params.heat_t = cfg.heat_t;
        params.label_weight_beta = cfg.beta;
        Embedding e;
        switch (cfg.embed) {
            case EmbedMethod::cmds: e = classical_mds(d, cfg.dim); break;
            case EmbedMethod::lem: {
                const NeighborGraph graph = lem_adjacency(d, cfg.graph_k, diag);
                if (resolved_k != nullptr) *resolved_k = graph.k;
                e = laplacian_eigenmaps(graph, d.ids, cfg.dim, params);
                break;
            }
            case EmbedMethod::ccdr: {
                const NeighborGraph graph = lem_adjacency(d, cfg.graph_k, diag);
                if (resolved_k != nullptr) *resolved_k = graph.k;
                e = ccdr(graph, d.ids, pdfs.labels, cfg.dim, params);
                break;
            }
            case EmbedMethod::pca: e = pca_embed(pdf_vectors(pdfs), d.ids, cfg.dim); break;
        }
        if (diag != nullptr) {
            diag->negative_eigen_mass = e.negative_eigen_mass;
            diag->zero_padded_dims = e.zero_padded_dims;
        }
        return e;
    } catch (const Error& e) {
        rethrow_as_stage("embedding", e);
    }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, bool with_embedding) {
    PipelineResult result;
    result.resolved_graph_k = cfg.graph_k;
    result.pdfs = fit_pdfs(cfg.input, cfg.pdf_kind);
    result.distances = pairwise_distances(result.pdfs, cfg.metric, cfg.threads, &result.diag);
    const DissimilarityMatrix* final_d = &result.distances;
    if (cfg.geodesic && result.distances.size() > 1) {
        GeodesicResult geo =
            geodesic_stage(result.distances, cfg.graph_k, cfg.threads, &result.diag);
        result.resolved_graph_k = geo.graph.k;
        result.graph = std::move(geo.graph);
        result.geodesic = std::move(geo.distances);
        final_d = &*result.geodesic;
    }
    if (with_embedding) {
        int resolved_k = 0;
        result.embedding =
            embed_stage(cfg, *final_d, result.pdfs, &result.diag, &resolved_k);
        if (resolved_k > 0) result.resolved_graph_k = resolved_k;
    }
    return result;
}

namespace {

ordered_json config_json(const PipelineConfig& cfg, const PipelineResult& result) {
    ordered_json c;
    c["input"] = cfg.input;
    c["pdf_kind"] = pdf_kind_name(cfg.pdf_kind);
    c["metric"] = metric_name(cfg.metric);
    c["geodesic"] = cfg.geodesic;
    c["graph_k"] = result.resolved_graph_k;
    c["embed"] = embed_method_name(cfg.embed);
    c["dim"] = cfg.dim;
    if (result.embedding &&
        (result.embedding->method == EmbedMethod::lem ||
         result.embedding->method == EmbedMethod::ccdr)) {
        const double t = result.embedding->heat_t;
        if (std::isinf(t)) {
            c["heat_t"] = "inf";
        } else {
            c["heat_t"] = t;
        }
    } else if (cfg.heat_t == 0.0) {
        c["heat_t"] = "auto";
    } else if (std::isinf(cfg.heat_t)) {
        c["heat_t"] = "inf";
    } else {
        c["heat_t"] = cfg.heat_t;
    }
    c["beta"] = cfg.beta;
    c["knn_k"] = cfg.knn_k;
    c["seed"] = cfg.seed;
    c["out"] = cfg.out_dir;
    return c;
}

ordered_json diagnostics_json(const Diagnostics& d) {
    ordered_json j;
    j["kl_clamped"] = d.kl_clamped;
    j["bridged_edges"] = d.bridged_edges;
    j["negative_eigen_mass"] = d.negative_eigen_mass;
    j["zero_padded_dims"] = d.zero_padded_dims;
    return j;
}

void write_json_file(const ordered_json& doc, const std::string& path) {
    write_file(path, doc.dump(2) + "\n");
}

}  // namespace

void write_pipeline_artifacts(const PipelineConfig& cfg, const std::string& command,
                              const PipelineResult& result) {
    try {
        fs::create_directories(cfg.out_dir);
        save_dissimilarity_csv(result.distances, join_path(cfg.out_dir, "distances.csv"));
        if (result.graph) save_graph_csv(*result.graph, join_path(cfg.out_dir, "graph.csv"));
        if (result.geodesic)
            save_dissimilarity_csv(*result.geodesic, join_path(cfg.out_dir, "geodesic.csv"));
        if (result.embedding) {
            save_embedding_csv(*result.embedding, result.pdfs.labels,
                               join_path(cfg.out_dir, "embedding.csv"));
            save_spectrum_json(*result.embedding, join_path(cfg.out_dir, "spectrum.json"));
        }
        ordered_json run;
        run["command"] = command;
        run["config"] = config_json(cfg, result);
        run["diagnostics"] = diagnostics_json(result.diag);
        write_json_file(run, join_path(cfg.out_dir, "run.json"));
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        rethrow_as_stage("output", e);
    } catch (const fs::filesystem_error& e) {
        throw StageError("output", e.what());
    }
}

Split stratified_split(const std::vector<std::optional<int>>& labels, double train_frac,
                       std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw InvalidParameterError("train_frac must lie strictly between 0 and 1");
    std::map<int, std::vector<int>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) throw MissingLabelError("stratified split requires a label on every set");
        by_class[*labels[i]].push_back(static_cast<int>(i));
    }
    if (by_class.empty()) throw EmptyInputError("stratified split of an empty collection");
    Rng rng(seed);
    Split split;
    for (const auto& [label, members] : by_class) {
        const int n_c = static_cast<int>(members.size());
        // small epsilon so e.g. 0.29 * 100 = 28.999999... still floors to 29
        const int n_train = static_cast<int>(train_frac * n_c + 1e-9);
        if (n_train < 1)
            throw StratificationError("class " + std::to_string(label) +
                                      " has no training members at train_frac " +
                                      format_double(train_frac));
        const std::vector<int> order = rng.permutation(n_c);
        for (int t = 0; t < n_c; ++t) {
            const int idx = members[static_cast<size_t>(order[static_cast<size_t>(t)])];
            (t < n_train ? split.train : split.test).push_back(idx);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace {

double classify_fold_knn(const Embedding& embedding, const std::vector<std::optional<int>>& labels,
                         const Split& split, int k) {
    const int dim = embedding.dim;
    Eigen::MatrixXd train(static_cast<long>(split.train.size()), dim);
    std::vector<int> train_labels;
    train_labels.reserve(split.train.size());
    for (size_t r = 0; r < split.train.size(); ++r) {
        train.row(static_cast<long>(r)) = embedding.coords.row(split.train[r]);
        train_labels.push_back(*labels[static_cast<size_t>(split.train[r])]);
    }
    Eigen::MatrixXd test(static_cast<long>(split.test.size()), dim);
    for (size_t r = 0; r < split.test.size(); ++r)
        test.row(static_cast<long>(r)) = embedding.coords.row(split.test[r]);
    const std::vector<int> predicted =
        knn_classify(train, train_labels, test, std::min(k, static_cast<int>(split.train.size())));
    int correct = 0;
    for (size_t r = 0; r < split.test.size(); ++r)
        if (predicted[r] == *labels[static_cast<size_t>(split.test[r])]) ++correct;
    return split.test.empty() ? 0.0 : static_cast<double>(correct) / split.test.size();
}

double classify_fold_kernel(const FittedPdfs& pdfs, const Split& split, double kernel_t) {
    if (pdfs.kind != PdfKind::multinomial)
        throw InvalidParameterError("kernel_nearest_mean needs multinomial PDFs");
    const int n_dims = pdfs.multinomials[0].dict_size() - 1;
    std::map<int, std::vector<int>> train_by_class;
    for (const int idx : split.train)
        train_by_class[*pdfs.labels[static_cast<size_t>(idx)]].push_back(idx);
    int correct = 0;
    for (const int t : split.test) {
        const MultinomialPdf& target = pdfs.multinomials[static_cast<size_t>(t)];
        int best_label = -1;
        double best_mean = -std::numeric_limits<double>::infinity();
        for (const auto& [label, members] : train_by_class) {
            double acc = 0.0;
            for (const int m : members)
                acc += diffusion_kernel_multinomial(
                    target, pdfs.multinomials[static_cast<size_t>(m)], kernel_t, n_dims);
            const double mean = acc / static_cast<double>(members.size());
            if (mean > best_mean) {
                best_mean = mean;
                best_label = label;
            }
        }
        if (best_label == *pdfs.labels[static_cast<size_t>(t)]) ++correct;
    }
    return split.test.empty() ? 0.0 : static_cast<double>(correct) / split.test.size();
}

}  // namespace

EvalOutcome eval_classify(const EvalConfig& cfg) {
    if (cfg.folds < 1) throw InvalidParameterError("eval_classify: folds must be at least 1");
    const PipelineConfig& pcfg = cfg.pipeline;
    FittedPdfs pdfs = fit_pdfs(pcfg.input, pcfg.pdf_kind);
    for (const auto& label : pdfs.labels)
        if (!label)
            throw StageError("input", "classification needs a label for every set");

    Diagnostics diag;
    DissimilarityMatrix distances = pairwise_distances(pdfs, pcfg.metric, pcfg.threads, &diag);
    const DissimilarityMatrix* final_d = &distances;
    std::optional<DissimilarityMatrix> geo;
    if (pcfg.geodesic && distances.size() > 1) {
        GeodesicResult g = geodesic_stage(distances, pcfg.graph_k, pcfg.threads, &diag);
        geo = std::move(g.distances);
        final_d = &*geo;
    }

    const bool needs_embedding = cfg.classifier == Classifier::knn;
    const bool graph_method =
        pcfg.embed == EmbedMethod::lem || pcfg.embed == EmbedMethod::ccdr;
    std::optional<NeighborGraph> adjacency;
    if (needs_embedding && graph_method) {
        try {
            adjacency = lem_adjacency(*final_d, pcfg.graph_k, &diag);
        } catch (const Error& e) {
            throw StageError("embedding", e.what());
        }
    }

    std::vector<int> dims = cfg.dim_sweep.empty() ? std::vector<int>{pcfg.dim} : cfg.dim_sweep;
    std::vector<double> betas =
        cfg.beta_sweep.empty() ? std::vector<double>{pcfg.beta} : cfg.beta_sweep;
    if (!needs_embedding || pcfg.embed != EmbedMethod::ccdr) betas = {pcfg.beta};
    if (!needs_embedding) dims = {pcfg.dim};

    struct Combo {
        int dim;
        double beta;
        int fold;
    };
    std::vector<Combo> combos;
    for (const int d : dims)
        for (const double b : betas)
            for (int f = 0; f < cfg.folds; ++f) combos.push_back({d, b, f});

    // Label-independent embeddings do not change across folds (ccdr with
    // beta = 0 reduces to plain LEM), so compute those once per dimension.
    std::map<int, Embedding> fold_invariant;
    if (needs_embedding) {
        const bool ccdr_needs_base =
            pcfg.embed == EmbedMethod::ccdr &&
            std::find(betas.begin(), betas.end(), 0.0) != betas.end();
        for (const int d : dims) {
            LemParams params;
            params.k_neighbors = pcfg.graph_k;
            params.heat_t = pcfg.heat_t;
            try {
                switch (pcfg.embed) {
                    case EmbedMethod::cmds:
                        fold_invariant.emplace(d, classical_mds(*final_d, d));
                        break;
                    case EmbedMethod::lem:
                        fold_invariant.emplace(
                            d, laplacian_eigenmaps(*adjacency, final_d->ids, d, params));
                        break;
                    case EmbedMethod::ccdr:
                        if (ccdr_needs_base)
                            fold_invariant.emplace(
                                d, laplacian_eigenmaps(*adjacency, final_d->ids, d, params));
                        break;
                    case EmbedMethod::pca:
                        fold_invariant.emplace(d, pca_embed(pdf_vectors(pdfs), final_d->ids, d));
                        break;
                }
            } catch (const Error& e) {
                throw StageError("embedding", e.what());
            }
        }
    }

    // Splits only depend on the fold seed; computing them up front also lets
    // StratificationError escape with its own type instead of a stage wrapper.
    std::vector<Split> splits;
    splits.reserve(static_cast<size_t>(cfg.folds));
    for (int f = 0; f < cfg.folds; ++f)
        splits.push_back(
            stratified_split(pdfs.labels, cfg.train_frac, pcfg.seed + static_cast<std::uint64_t>(f)));

    std::vector<double> accuracy(combos.size(), 0.0);
    std::vector<std::string> failure(combos.size());
    const int workers = resolve_threads(pcfg.threads);
    parallel_for(static_cast<int>(combos.size()), workers, [&](int c) {
        const Combo& combo = combos[static_cast<size_t>(c)];
        try {
            const Split& split = splits[static_cast<size_t>(combo.fold)];
            if (cfg.classifier == Classifier::kernel_nearest_mean) {
                accuracy[static_cast<size_t>(c)] = classify_fold_kernel(pdfs, split, cfg.kernel_t);
                return;
            }
            const Embedding* embedding = nullptr;
            Embedding per_fold;
            if (pcfg.embed == EmbedMethod::ccdr && combo.beta != 0.0) {
                LemParams params;
                params.k_neighbors = pcfg.graph_k;
                params.heat_t = pcfg.heat_t;
                params.label_weight_beta = combo.beta;
                std::vector<std::optional<int>> masked = pdfs.labels;
                for (const int t : split.test) masked[static_cast<size_t>(t)] = std::nullopt;
                per_fold = ccdr(*adjacency, final_d->ids, masked, combo.dim, params);
                embedding = &per_fold;
            } else {
                embedding = &fold_invariant.at(combo.dim);
            }
            accuracy[static_cast<size_t>(c)] =
                classify_fold_knn(*embedding, pdfs.labels, split, pcfg.knn_k);
        } catch (const Error& e) {
            failure[static_cast<size_t>(c)] = e.what();
        }
    });
    for (const std::string& f : failure)
        if (!f.empty()) throw StageError("classification", f);

    EvalOutcome outcome;
    size_t c = 0;
    for (const int d : dims) {
        for (const double b : betas) {
            SweepOutcome sweep;
            sweep.dim = d;
            sweep.beta = b;
            for (int f = 0; f < cfg.folds; ++f, ++c) {
                FoldOutcome fold;
                fold.seed = pcfg.seed + static_cast<std::uint64_t>(f);
                fold.accuracy = accuracy[c];
                sweep.folds.push_back(fold);
                sweep.mean_accuracy += fold.accuracy;
            }
            sweep.mean_accuracy /= cfg.folds;
            if (cfg.folds > 1) {
                double ss = 0.0;
                for (const FoldOutcome& fold : sweep.folds) {
                    const double dlt = fold.accuracy - sweep.mean_accuracy;
                    ss += dlt * dlt;
                }
                sweep.std_accuracy = std::sqrt(ss / (cfg.folds - 1));
            }
            outcome.sweeps.push_back(std::move(sweep));
        }
    }
    for (size_t i = 1; i < outcome.sweeps.size(); ++i)
        if (outcome.sweeps[i].mean_accuracy >
            outcome.sweeps[static_cast<size_t>(outcome.best_index)].mean_accuracy)
            outcome.best_index = static_cast<int>(i);
    return outcome;
}

void write_eval_json(const EvalConfig& cfg, const EvalOutcome& result, const std::string& path) {
    ordered_json doc;
    doc["command"] = "eval-classify";
    ordered_json c;
    c["input"] = cfg.pipeline.input;
    c["pdf_kind"] = pdf_kind_name(cfg.pipeline.pdf_kind);
    c["metric"] = metric_name(cfg.pipeline.metric);
    c["geodesic"] = cfg.pipeline.geodesic;
    c["graph_k"] = cfg.pipeline.graph_k;
    c["embed"] = embed_method_name(cfg.pipeline.embed);
    c["dim"] = cfg.pipeline.dim;
    c["beta"] = cfg.pipeline.beta;
    c["knn_k"] = cfg.pipeline.knn_k;
    c["seed"] = cfg.pipeline.seed;
    c["out"] = cfg.pipeline.out_dir;
    c["train_frac"] = cfg.train_frac;
    c["folds"] = cfg.folds;
    c["classifier"] = classifier_name(cfg.classifier);
    c["kernel_t"] = cfg.kernel_t;
    c["dim_sweep"] = cfg.dim_sweep;
    c["beta_sweep"] = cfg.beta_sweep;
    doc["config"] = c;
    ordered_json sweeps = ordered_json::array();
    for (const SweepOutcome& s : result.sweeps) {
        ordered_json folds = ordered_json::array();
        for (size_t f = 0; f < s.folds.size(); ++f)
            folds.push_back({{"fold", f}, {"seed", s.folds[f].seed}, {"accuracy", s.folds[f].accuracy}});
        sweeps.push_back({{"dim", s.dim},
                          {"beta", s.beta},
                          {"mean_accuracy", s.mean_accuracy},
                          {"std_accuracy", s.std_accuracy},
                          {"folds", folds}});
    }
    doc["results"] = sweeps;
    const SweepOutcome& best = result.sweeps[static_cast<size_t>(result.best_index)];
    doc["best"] = {{"dim", best.dim}, {"beta", best.beta}, {"mean_accuracy", best.mean_accuracy}};
    write_json_file(doc, path);
}

double corner_geodesic_estimate(int mu_steps, int sigma_steps, int graph_k, int threads) {
    if (mu_steps < 1 || sigma_steps < 1 || mu_steps * sigma_steps < 2)
        throw InvalidParameterError("corner_geodesic_estimate: grid needs at least two nodes");
    std::vector<GaussianParams> params;
    std::vector<std::string> ids;
    params.reserve(static_cast<size_t>(mu_steps) * sigma_steps);
    for (int i = 0; i < mu_steps; ++i) {
        const double mu = mu_steps == 1 ? 0.0 : static_cast<double>(i) / (mu_steps - 1);
        for (int j = 0; j < sigma_steps; ++j) {
            const double sigma =
                sigma_steps == 1 ? 1.0 : 1.0 + static_cast<double>(j) / (sigma_steps - 1);
            params.push_back({mu, sigma});
            ids.push_back("g_" + std::to_string(i) + "_" + std::to_string(j));
        }
    }
    const int workers = resolve_threads(threads);
    const DissimilarityMatrix d =
        build_dissimilarity_matrix(params, ids, Metric::fisher_kl, workers);
    const int k = graph_k > 0 ? graph_k : default_graph_k(d.size());
    NeighborGraph graph = build_neighbor_graph(d, k);
    graph = ensure_connected(graph, d);
    const DissimilarityMatrix geo = geodesic_distances(graph, d.ids, d.metric, workers);
    return geo.values(0, geo.size() - 1);
}

std::vector<ConvergenceRow> convergence_report(const std::vector<int>& resolutions, int graph_k,
                                               int threads) {
    if (resolutions.size() < 2)
        throw InvalidParameterError("convergence report needs at least two resolutions");
    for (const int r : resolutions)
        if (r < 2) throw InvalidParameterError("convergence resolutions must be at least 2");
    const double exact = fisher_gaussian_closed({0.0, 1.0}, {1.0, 2.0});
    std::vector<ConvergenceRow> rows;
    rows.reserve(resolutions.size());
    for (const int r : resolutions) {
        ConvergenceRow row;
        row.resolution = r;
        row.estimate = corner_geodesic_estimate(r, r, graph_k, threads);
        row.exact = exact;
        row.abs_error = std::abs(row.estimate - exact);
        rows.push_back(row);
    }
    return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "resolution,estimate,exact,abs_error\n";
    for (const ConvergenceRow& r : rows)
        out << r.resolution << ',' << format_double(r.estimate) << ',' << format_double(r.exact)
            << ',' << format_double(r.abs_error) << '\n';
    write_file(path, out.str());
}

EmbeddingTable load_embedding_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    const std::vector<std::string> header = split_csv_line(lines[0]);
    if (header.size() < 3 || header[0] != "set_id" || header[1] != "label")
        throw FormatError(path + ": expected header set_id,label,y1..");
    const int dim = static_cast<int>(header.size()) - 2;
    const int n = static_cast<int>(lines.size()) - 1;
    if (n < 1) throw EmptyInputError(path + ": no embedding rows");
    EmbeddingTable table;
    table.coords.resize(n, dim);
    for (int r = 0; r < n; ++r) {
        const std::vector<std::string> fields = split_csv_line(lines[static_cast<size_t>(r) + 1]);
        if (static_cast<int>(fields.size()) != dim + 2)
            throw ParseError(path + ": wrong column count", r + 2);
        table.ids.push_back(fields[0]);
        if (fields[1].empty()) {
            table.labels.emplace_back(std::nullopt);
        } else {
            const auto label = parse_long(fields[1]);
            if (!label) throw ParseError(path + ": non-integer label '" + fields[1] + "'", r + 2);
            table.labels.emplace_back(static_cast<int>(*label));
        }
        for (int a = 0; a < dim; ++a) {
            const auto v = parse_double(fields[static_cast<size_t>(a) + 2]);
            if (!v) throw ParseError(path + ": non-numeric coordinate", r + 2);
            table.coords(r, a) = *v;
        }
    }
    return table;
}

std::vector<std::string> write_plot_data(const EmbeddingTable& table, bool by_label,
                                         const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    if (!by_label) {
        std::ostringstream out;
        for (long r = 0; r < table.coords.rows(); ++r) {
            for (long a = 0; a < table.coords.cols(); ++a) {
                if (a > 0) out << ' ';
                out << format_double(table.coords(r, a));
            }
            out << '\n';
        }
        const std::string path = join_path(out_dir, "all.dat");
        write_file(path, out.str());
        written.push_back(path);
        return written;
    }
    std::map<int, std::ostringstream> streams;
    for (long r = 0; r < table.coords.rows(); ++r) {
        const auto& label = table.labels[static_cast<size_t>(r)];
        if (!label)
            throw MissingLabelError("plot data by label: row " + std::to_string(r + 1) +
                                    " has no label");
        std::ostringstream& out = streams[*label];
        for (long a = 0; a < table.coords.cols(); ++a) {
            if (a > 0) out << ' ';
            out << format_double(table.coords(r, a));
        }
        out << '\n';
    }
    for (const auto& [label, stream] : streams) {
        const std::string path = join_path(out_dir, "class_" + std::to_string(label) + ".dat");
        write_file(path, stream.str());
        written.push_back(path);
    }
    return written;
}

}  // namespace fine
