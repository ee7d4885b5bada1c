#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fine/datasets.hpp"
#include "fine/density.hpp"
#include "fine/divergence.hpp"
#include "fine/embedding.hpp"
#include "fine/errors.hpp"
#include "fine/geodesic.hpp"
#include "fine/jacobi.hpp"

namespace py = pybind11;
using namespace fine;

PYBIND11_MODULE(_fine, m) {
    m.doc() = "Information-geometric embedding toolkit: density estimates, "
              "divergence matrices, geodesic graphs, spectral embeddings.";

    // ---- exceptions ----
    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<FormatError>(m, "FormatError", base);
    py::register_exception<EmptyInputError>(m, "EmptyInputError", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<DegenerateDocumentError>(m, "DegenerateDocumentError", base);
    py::register_exception<InvalidParameterError>(m, "InvalidParameterError", base);
    py::register_exception<InsufficientSamplesError>(m, "InsufficientSamplesError", base);
    py::register_exception<DimensionError>(m, "DimensionError", base);
    py::register_exception<MetricMismatchError>(m, "MetricMismatchError", base);
    py::register_exception<SupportError>(m, "SupportError", base);
    py::register_exception<DisconnectedGraphError>(m, "DisconnectedGraphError", base);
    py::register_exception<InsufficientSpectrumError>(m, "InsufficientSpectrumError", base);
    py::register_exception<StratificationError>(m, "StratificationError", base);
    py::register_exception<MissingLabelError>(m, "MissingLabelError", base);

    // ---- densities ----
    py::class_<Kde>(m, "Kde",
                    "Gaussian-kernel density estimate with a diagonal bandwidth. "
                    "Construct via fit_kde().")
        .def("log_eval", &Kde::log_eval, py::arg("x"), "log p(x)")
        .def("eval", &Kde::eval, py::arg("x"))
        .def_property_readonly("dim", &Kde::dim)
        .def_property_readonly("n_samples", &Kde::n_samples)
        .def_property_readonly("samples", &Kde::samples)
        .def_property_readonly("bandwidths", &Kde::bandwidths)
        .def_property_readonly("degenerate_bandwidth", &Kde::degenerate_bandwidth);

    m.def(
        "fit_kde",
        [](const Eigen::MatrixXd& samples, std::optional<Eigen::VectorXd> bandwidths) {
            auto stored = std::make_shared<const Eigen::MatrixXd>(samples);
            return fit_kde(std::move(stored), std::move(bandwidths));
        },
        py::arg("samples"), py::arg("bandwidths") = std::nullopt,
        "Kernel density estimate from an (n, dim) sample matrix. Bandwidths "
        "default to Silverman's rule per dimension.");

    m.def(
        "silverman_bandwidth",
        [](const Eigen::MatrixXd& samples) {
            const BandwidthResult r = silverman_bandwidth(samples);
            return py::make_tuple(r.values, r.degenerate);
        },
        py::arg("samples"),
        "Per-dimension rule-of-thumb bandwidths; returns (values, degenerate_flag).");

    py::class_<MultinomialPdf>(m, "MultinomialPdf",
                               "Probability vector on the dictionary simplex.")
        .def(py::init<>())
        .def_readwrite("probs", &MultinomialPdf::probs)
        .def_property_readonly("dict_size", &MultinomialPdf::dict_size);

    m.def("term_frequency_pdf", &term_frequency_pdf, py::arg("counts"),
          "Multinomial estimate count_i / total from a term-count vector.");
    m.def("normalized_pdf", &normalized_pdf, py::arg("weights"),
          "Validated simplex vector from non-negative weights.");

    // ---- divergences ----
    py::class_<GaussianParams>(m, "GaussianParams")
        .def(py::init([](double mu, double sigma) {
                 GaussianParams g;
                 g.mu = mu;
                 g.sigma = sigma;
                 return g;
             }),
             py::arg("mu") = 0.0, py::arg("sigma") = 1.0)
        .def_readwrite("mu", &GaussianParams::mu)
        .def_readwrite("sigma", &GaussianParams::sigma)
        .def("__repr__", [](const GaussianParams& g) {
            return "GaussianParams(mu=" + std::to_string(g.mu) +
                   ", sigma=" + std::to_string(g.sigma) + ")";
        });

    py::enum_<Metric>(m, "Metric")
        .value("fisher_kl", Metric::fisher_kl)
        .value("hellinger", Metric::hellinger)
        .value("cosine", Metric::cosine)
        .value("euclidean_l2", Metric::euclidean_l2)
        .value("fisher_exact_gaussian", Metric::fisher_exact_gaussian);

    py::class_<DissimilarityMatrix>(m, "DissimilarityMatrix",
                                    "Symmetric pairwise dissimilarities with zero diagonal.")
        .def(py::init<>())
        .def_readwrite("values", &DissimilarityMatrix::values)
        .def_readwrite("metric", &DissimilarityMatrix::metric)
        .def_readwrite("ids", &DissimilarityMatrix::ids)
        .def_property_readonly("size", &DissimilarityMatrix::size)
        .def("validate", &DissimilarityMatrix::validate);

    m.def(
        "kl_empirical",
        [](const Kde& p, const Kde& q) { return kl_empirical(p, q); }, py::arg("p"), py::arg("q"),
        "Plug-in KL estimate over p's own samples, clamped at zero.");
    m.def(
        "kl_symmetric", [](const Kde& p, const Kde& q) { return kl_symmetric(p, q); },
        py::arg("p"), py::arg("q"), "KL(p||q) + KL(q||p).");
    m.def(
        "fisher_approx_from_kl",
        [](const Kde& p, const Kde& q) { return fisher_approx_from_kl(p, q); }, py::arg("p"),
        py::arg("q"), "sqrt of the symmetrized KL, the local information-distance estimate.");

    m.def("kl_gaussian_closed", &kl_gaussian_closed, py::arg("a"), py::arg("b"));
    m.def("fisher_gaussian_closed", &fisher_gaussian_closed, py::arg("a"), py::arg("b"),
          "Closed-form information distance between univariate normals.");

    m.def("hellinger_multinomial", &hellinger_multinomial, py::arg("p"), py::arg("q"));
    m.def("cosine_multinomial", &cosine_multinomial, py::arg("p"), py::arg("q"),
          "2 arccos(sum sqrt(p q)), the sphere metric.");
    m.def("euclidean_l2_multinomial", &euclidean_l2_multinomial, py::arg("p"), py::arg("q"));
    m.def("alpha_divergence_multinomial", &alpha_divergence_multinomial, py::arg("p"),
          py::arg("q"), py::arg("alpha"));

    m.def(
        "build_dissimilarity_matrix",
        [](const std::vector<Kde>& pdfs, const std::vector<std::string>& ids, Metric metric,
           int threads) { return build_dissimilarity_matrix(pdfs, ids, metric, threads); },
        py::arg("pdfs"), py::arg("ids"), py::arg("metric") = Metric::fisher_kl,
        py::arg("threads") = 1);
    m.def(
        "build_dissimilarity_matrix",
        [](const std::vector<MultinomialPdf>& pdfs, const std::vector<std::string>& ids,
           Metric metric, int threads) {
            return build_dissimilarity_matrix(pdfs, ids, metric, threads);
        },
        py::arg("pdfs"), py::arg("ids"), py::arg("metric") = Metric::hellinger,
        py::arg("threads") = 1);
    m.def(
        "build_dissimilarity_matrix",
        [](const std::vector<GaussianParams>& pdfs, const std::vector<std::string>& ids,
           Metric metric, int threads) {
            return build_dissimilarity_matrix(pdfs, ids, metric, threads);
        },
        py::arg("pdfs"), py::arg("ids"), py::arg("metric") = Metric::fisher_exact_gaussian,
        py::arg("threads") = 1);

    m.def("save_dissimilarity_csv", &save_dissimilarity_csv, py::arg("matrix"), py::arg("path"));
    m.def("load_dissimilarity_csv", &load_dissimilarity_csv, py::arg("path"), py::arg("metric"));

    // ---- geodesic graph ----
    py::class_<GraphEdge>(m, "GraphEdge")
        .def(py::init<>())
        .def_readwrite("i", &GraphEdge::i)
        .def_readwrite("j", &GraphEdge::j)
        .def_readwrite("weight", &GraphEdge::weight)
        .def("__repr__", [](const GraphEdge& e) {
            return "GraphEdge(" + std::to_string(e.i) + ", " + std::to_string(e.j) + ", " +
                   std::to_string(e.weight) + ")";
        });

    py::class_<NeighborGraph>(m, "NeighborGraph",
                              "Undirected weighted neighbor graph, each edge once with i < j.")
        .def(py::init<>())
        .def_readwrite("n_nodes", &NeighborGraph::n_nodes)
        .def_readwrite("edges", &NeighborGraph::edges)
        .def_readwrite("k", &NeighborGraph::k)
        .def_readwrite("connected", &NeighborGraph::connected);

    m.def("default_graph_k", &default_graph_k, py::arg("n_nodes"),
          "max(3, ceil(log2 n)) clamped into [1, n-1].");
    m.def("build_neighbor_graph", &build_neighbor_graph, py::arg("d"), py::arg("k"),
          "Symmetric-union k-nearest-neighbor graph over a dissimilarity matrix.");
    m.def(
        "ensure_connected",
        [](const NeighborGraph& g, const DissimilarityMatrix& d) {
            int added = 0;
            NeighborGraph out = ensure_connected(g, d, &added);
            return py::make_tuple(out, added);
        },
        py::arg("graph"), py::arg("d"),
        "Bridges graph components with minimal-weight edges; returns (graph, n_added).");
    m.def("geodesic_distances", &geodesic_distances, py::arg("graph"), py::arg("ids"),
          py::arg("metric"), py::arg("threads") = 1,
          "All-pairs shortest-path lengths over the graph.");

    // ---- embeddings ----
    py::enum_<EmbedMethod>(m, "EmbedMethod")
        .value("cmds", EmbedMethod::cmds)
        .value("lem", EmbedMethod::lem)
        .value("ccdr", EmbedMethod::ccdr)
        .value("pca", EmbedMethod::pca);

    py::class_<LemParams>(m, "LemParams",
                          "Laplacian-eigenmap options. heat_t: 0 auto, +inf unit weights.")
        .def(py::init([](int k_neighbors, double heat_t, double label_weight_beta) {
                 LemParams p;
                 p.k_neighbors = k_neighbors;
                 p.heat_t = heat_t;
                 p.label_weight_beta = label_weight_beta;
                 return p;
             }),
             py::arg("k_neighbors") = 0, py::arg("heat_t") = 0.0,
             py::arg("label_weight_beta") = 0.0)
        .def_readwrite("k_neighbors", &LemParams::k_neighbors)
        .def_readwrite("heat_t", &LemParams::heat_t)
        .def_readwrite("label_weight_beta", &LemParams::label_weight_beta);

    py::class_<Embedding>(m, "Embedding")
        .def_readonly("coords", &Embedding::coords)
        .def_readonly("spectrum", &Embedding::spectrum)
        .def_readonly("method", &Embedding::method)
        .def_readonly("ids", &Embedding::ids)
        .def_readonly("dim", &Embedding::dim)
        .def_readonly("graph_k", &Embedding::graph_k)
        .def_readonly("heat_t", &Embedding::heat_t)
        .def_readonly("beta", &Embedding::beta)
        .def_readonly("negative_eigen_mass", &Embedding::negative_eigen_mass)
        .def_readonly("zero_padded_dims", &Embedding::zero_padded_dims);

    m.def("classical_mds", &classical_mds, py::arg("d"), py::arg("dim"),
          "Classical multidimensional scaling of a dissimilarity matrix.");
    m.def("laplacian_eigenmaps",
          py::overload_cast<const NeighborGraph&, const std::vector<std::string>&, int,
                            const LemParams&>(&laplacian_eigenmaps),
          py::arg("graph"), py::arg("ids"), py::arg("dim"), py::arg("params") = LemParams{});
    m.def("laplacian_eigenmaps",
          py::overload_cast<const DissimilarityMatrix&, int, const LemParams&>(
              &laplacian_eigenmaps),
          py::arg("d"), py::arg("dim"), py::arg("params") = LemParams{});
    m.def("ccdr",
          py::overload_cast<const NeighborGraph&, const std::vector<std::string>&,
                            const std::vector<std::optional<int>>&, int, const LemParams&>(&ccdr),
          py::arg("graph"), py::arg("ids"), py::arg("labels"), py::arg("dim"),
          py::arg("params") = LemParams{},
          "Label-augmented eigenmaps; same-label pairs get weight + beta.");
    m.def("ccdr",
          py::overload_cast<const DissimilarityMatrix&, const std::vector<std::optional<int>>&,
                            int, const LemParams&>(&ccdr),
          py::arg("d"), py::arg("labels"), py::arg("dim"), py::arg("params") = LemParams{});
    m.def("pca_embed", &pca_embed, py::arg("vectors"), py::arg("ids"), py::arg("dim"));

    m.def("knn_classify", &knn_classify, py::arg("train_coords"), py::arg("train_labels"),
          py::arg("test_coords"), py::arg("k"),
          "Euclidean k-nearest-neighbor vote; ties break toward smaller mean "
          "distance, then smaller label.");
    m.def("diffusion_kernel_multinomial", &diffusion_kernel_multinomial, py::arg("p"),
          py::arg("q"), py::arg("t"), py::arg("n_dims"),
          py::arg("positive_prefactor_exponent") = true,
          "Heat-kernel similarity on the multinomial sphere.");

    // ---- eigensolver ----
    m.def(
        "jacobi_eigen",
        [](const Eigen::MatrixXd& a) {
            const SymmetricEigen r = jacobi_eigen(a);
            return py::make_tuple(r.values, r.vectors);
        },
        py::arg("matrix"),
        "Full symmetric eigendecomposition; returns (eigenvalues ascending, "
        "column eigenvectors).");

    // ---- synthetic data ----
    m.def(
        "gen_swiss_roll_sets",
        [](int n_sets, int samples_per_set, double noise_scale, std::uint64_t seed) {
            SwissRollData data = gen_swiss_roll_sets(n_sets, samples_per_set, noise_scale, seed);
            std::vector<Eigen::MatrixXd> sets;
            sets.reserve(data.collection.sets.size());
            for (auto& s : data.collection.sets) sets.push_back(std::move(s.points));
            return py::make_tuple(sets, data.collection.ids(), data.ground_truth);
        },
        py::arg("n_sets"), py::arg("samples_per_set"), py::arg("noise_scale"), py::arg("seed"),
        "Gaussian clouds with means on a swiss-roll surface; returns "
        "(point_sets, ids, mean_points).");
    m.def(
        "gen_multinomial_clusters",
        [](int n_classes, int dict_size, int docs_per_class, int counts_per_doc,
           double concentration, std::uint64_t seed) {
            TermCountCollection c = gen_multinomial_clusters(n_classes, dict_size, docs_per_class,
                                                             counts_per_doc, concentration, seed);
            std::vector<Eigen::VectorXi> counts;
            std::vector<int> labels;
            counts.reserve(c.docs.size());
            for (auto& d : c.docs) {
                counts.push_back(std::move(d.counts));
                labels.push_back(d.label.value_or(-1));
            }
            return py::make_tuple(counts, c.ids(), labels);
        },
        py::arg("n_classes"), py::arg("dict_size"), py::arg("docs_per_class"),
        py::arg("counts_per_doc"), py::arg("concentration"), py::arg("seed"),
        "Dirichlet-class corpus; returns (count_vectors, ids, labels).");
}
