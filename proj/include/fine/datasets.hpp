#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fine {

/// One data set: n_i points in R^dim plus an optional class label.
struct SampleSet {
    std::string id;
    Eigen::MatrixXd points;  // n_i rows x dim columns
    std::optional<int> label;
};

struct DatasetCollection {
    std::vector<SampleSet> sets;
    int dim = 0;
    bool labels_present = false;
    std::map<int, std::string> label_names;  // int label -> human name, may be empty

    int size() const { return static_cast<int>(sets.size()); }
    std::vector<std::string> ids() const;
};

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Univariate-normal parameter grid: (mu, sigma) = (alpha*k, 1 + beta*l),
/// enumerated row-major with k, l starting at 1.
struct GaussianGrid {
    std::vector<GaussianParams> params;
    int k_steps = 0;
    int l_steps = 0;

    std::vector<std::string> ids() const;
};

/// Named list of Gaussian parameters, the `params.csv` payload.
struct GaussianCollection {
    std::vector<std::string> ids;
    std::vector<GaussianParams> params;
};

struct TermDocument {
    std::string id;
    Eigen::VectorXi counts;
    std::optional<int> label;
};

struct TermCountCollection {
    std::vector<TermDocument> docs;
    int dict_size = 0;
    bool labels_present = false;
    std::map<int, std::string> label_names;

    int size() const { return static_cast<int>(docs.size()); }
    std::vector<std::string> ids() const;
    std::vector<std::optional<int>> labels() const;
};

enum class CollectionFormat { long_csv, directory };

/// Loads a collection either from one long CSV (`set_id,label,x1..xD`) or from
/// a directory of per-set CSVs with an optional `labels.csv` sidecar. Sets come
/// back in lexicographic id order.
DatasetCollection load_collection(const std::string& path, CollectionFormat format);

/// Canonical long-CSV writer; load + save round-trips byte-exactly.
void save_collection(const DatasetCollection& collection, const std::string& path);

/// Loads `doc_id,term_index,count` triplets. If labels_path is empty, a sibling
/// `<stem>.labels.csv` is used when present. Label values may be integers or
/// names; names are mapped to ids in lexicographic order.
TermCountCollection load_term_counts(const std::string& path, const std::string& labels_path = "");

void save_term_counts(const TermCountCollection& corpus, const std::string& path,
                      const std::string& labels_path = "");

GaussianCollection load_gaussian_params(const std::string& path);
void save_gaussian_params(const GaussianCollection& gaussians, const std::string& path);

void save_ground_truth(const std::vector<std::string>& ids, const Eigen::MatrixXd& points,
                       const std::string& path);
Eigen::MatrixXd load_ground_truth(const std::string& path);

GaussianGrid gen_gaussian_grid(double alpha, double beta, int k_steps, int l_steps);

struct SwissRollData {
    DatasetCollection collection;
    Eigen::MatrixXd ground_truth;  // n_sets x 3, the mean of each set
};

/// Collection of Gaussian clouds whose means lie on the swiss-roll surface
/// (t cos t, h, t sin t) with t uniform on [1.5pi, 4.5pi] and h uniform on [0, 20].
SwissRollData gen_swiss_roll_sets(int n_sets, int samples_per_set, double noise_scale,
                                  std::uint64_t seed);

/// Synthetic labeled corpus: one Dirichlet-drawn class distribution per class,
/// sharpened on a contiguous block of the dictionary, then multinomial documents.
TermCountCollection gen_multinomial_clusters(int n_classes, int dict_size, int docs_per_class,
                                             int counts_per_doc, double concentration,
                                             std::uint64_t seed);

}  // namespace fine
