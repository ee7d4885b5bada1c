#include "fine/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

#include "fine/errors.hpp"
#include "fine/rng.hpp"
#include "fine/text_io.hpp"

namespace fs = std::filesystem;

namespace fine {

std::vector<std::string> DatasetCollection::ids() const {
    std::vector<std::string> out;
    out.reserve(sets.size());
    for (const auto& s : sets) out.push_back(s.id);
    return out;
}

std::vector<std::string> TermCountCollection::ids() const {
    std::vector<std::string> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.id);
    return out;
}

std::vector<std::optional<int>> TermCountCollection::labels() const {
    std::vector<std::optional<int>> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.label);
    return out;
}

namespace {

std::string zero_pad(int value, int width) {
    std::string s = std::to_string(value);
    if (static_cast<int>(s.size()) < width) s.insert(s.begin(), width - s.size(), '0');
    return s;
}

int digits_for(int max_value) {
    int w = 1;
    while (max_value >= 10) {
        max_value /= 10;
        ++w;
    }
    return w;
}

// Label cells may be integers or names. Names get integer ids assigned in
// lexicographic order after the whole file is read.
struct LabelResolver {
    std::map<std::string, std::vector<std::string>> raw;  // raw label -> ids carrying it

    void add(const std::string& id, const std::string& value) { raw[value].push_back(id); }

    void resolve(std::map<std::string, int>& id_to_label, std::map<int, std::string>& names) const {
        bool all_numeric = true;
        for (const auto& [value, _] : raw) {
            if (!parse_long(value)) {
                all_numeric = false;
                break;
            }
        }
        if (all_numeric) {
            for (const auto& [value, ids] : raw) {
                const int lab = static_cast<int>(*parse_long(value));
                for (const auto& id : ids) id_to_label[id] = lab;
            }
        } else {
            int next = 0;
            for (const auto& [value, ids] : raw) {  // std::map iterates lexicographically
                names[next] = value;
                for (const auto& id : ids) id_to_label[id] = next;
                ++next;
            }
        }
    }
};

DatasetCollection load_long_csv(const std::string& path) {
    const auto lines = read_lines(path);
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 3 || header[0] != "set_id" || header[1] != "label")
        throw FormatError("expected header set_id,label,x1..xD in " + path);
    const int dim = static_cast<int>(header.size()) - 2;

    struct Pending {
        std::vector<Eigen::RowVectorXd> rows;
        std::string label;  // raw text, "" = absent
        bool label_seen = false;
    };
    std::map<std::string, Pending> groups;

    for (size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split_csv_line(lines[ln]);
        if (fields.size() != header.size())
            throw FormatError("inconsistent column count at line " + std::to_string(ln + 1) +
                              " in " + path);
        auto& g = groups[fields[0]];
        if (g.label_seen && g.label != fields[1])
            throw FormatError("conflicting labels for set " + fields[0] + " in " + path);
        g.label = fields[1];
        g.label_seen = true;
        Eigen::RowVectorXd row(dim);
        for (int d = 0; d < dim; ++d) {
            const auto v = parse_double(fields[2 + d]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric coordinate '" + fields[2 + d] + "' in " + path,
                                 static_cast<long>(ln + 1));
            row[d] = *v;
        }
        g.rows.push_back(row);
    }
    if (groups.empty()) throw EmptyInputError("no data rows in " + path);

    LabelResolver resolver;
    int labeled = 0;
    for (const auto& [id, g] : groups) {
        if (!g.label.empty()) {
            resolver.add(id, g.label);
            ++labeled;
        }
    }
    if (labeled != 0 && labeled != static_cast<int>(groups.size()))
        throw FormatError("labels present for some sets but not all in " + path);

    std::map<std::string, int> id_to_label;
    DatasetCollection out;
    out.dim = dim;
    out.labels_present = labeled > 0;
    resolver.resolve(id_to_label, out.label_names);

    for (auto& [id, g] : groups) {  // map order = lexicographic ids
        SampleSet set;
        set.id = id;
        set.points.resize(static_cast<Eigen::Index>(g.rows.size()), dim);
        for (size_t r = 0; r < g.rows.size(); ++r) set.points.row(static_cast<Eigen::Index>(r)) = g.rows[r];
        if (out.labels_present) set.label = id_to_label.at(id);
        out.sets.push_back(std::move(set));
    }
    return out;
}

Eigen::MatrixXd load_point_csv(const std::string& path, int* detected_dim) {
    const auto lines = read_lines(path);
    size_t first = 0;
    {
        const auto fields = split_csv_line(lines[0]);
        if (!fields.empty() && !parse_double(fields[0])) first = 1;  // header row
    }
    if (first >= lines.size()) throw EmptyInputError("no data rows in " + path);
    std::vector<Eigen::RowVectorXd> rows;
    int dim = -1;
    for (size_t ln = first; ln < lines.size(); ++ln) {
        const auto fields = split_csv_line(lines[ln]);
        if (dim < 0) dim = static_cast<int>(fields.size());
        if (static_cast<int>(fields.size()) != dim)
            throw FormatError("inconsistent column count at line " + std::to_string(ln + 1) +
                              " in " + path);
        Eigen::RowVectorXd row(dim);
        for (int d = 0; d < dim; ++d) {
            const auto v = parse_double(fields[d]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric coordinate '" + fields[d] + "' in " + path,
                                 static_cast<long>(ln + 1));
            row[d] = *v;
        }
        rows.push_back(row);
    }
    Eigen::MatrixXd points(rows.size(), dim);
    for (size_t r = 0; r < rows.size(); ++r) points.row(static_cast<Eigen::Index>(r)) = rows[r];
    *detected_dim = dim;
    return points;
}

DatasetCollection load_directory(const std::string& path) {
    if (!fs::is_directory(path)) throw EmptyInputError("not a directory: " + path);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        const auto p = entry.path();
        if (p.extension() == ".csv" && p.filename() != "labels.csv") files.push_back(p);
    }
    if (files.empty()) throw EmptyInputError("no per-set CSV files in " + path);
    std::sort(files.begin(), files.end());

    DatasetCollection out;
    out.dim = -1;
    for (const auto& file : files) {
        SampleSet set;
        set.id = file.stem().string();
        int dim = 0;
        set.points = load_point_csv(file.string(), &dim);
        if (out.dim < 0) out.dim = dim;
        if (dim != out.dim)
            throw FormatError("set " + set.id + " has " + std::to_string(dim) +
                              " columns, expected " + std::to_string(out.dim));
        out.sets.push_back(std::move(set));
    }

    const fs::path label_file = fs::path(path) / "labels.csv";
    if (fs::exists(label_file)) {
        const auto lines = read_lines(label_file.string());
        LabelResolver resolver;
        for (size_t ln = 0; ln < lines.size(); ++ln) {
            const auto fields = split_csv_line(lines[ln]);
            if (ln == 0 && fields.size() >= 2 && fields[0] == "set_id") continue;
            if (fields.size() != 2)
                throw FormatError("labels.csv expects set_id,label rows in " + path);
            resolver.add(fields[0], fields[1]);
        }
        std::map<std::string, int> id_to_label;
        resolver.resolve(id_to_label, out.label_names);
        for (auto& set : out.sets) {
            const auto it = id_to_label.find(set.id);
            if (it == id_to_label.end())
                throw FormatError("labels.csv missing entry for set " + set.id);
            set.label = it->second;
        }
        out.labels_present = true;
    }
    return out;
}

}  // namespace

DatasetCollection load_collection(const std::string& path, CollectionFormat format) {
    DatasetCollection c = format == CollectionFormat::long_csv ? load_long_csv(path)
                                                               : load_directory(path);
    for (const auto& s : c.sets) {
        if (s.points.rows() < 1) throw FormatError("set " + s.id + " has no points");
    }
    return c;
}

void save_collection(const DatasetCollection& collection, const std::string& path) {
    std::ostringstream os;
    os << "set_id,label";
    for (int d = 1; d <= collection.dim; ++d) os << ",x" << d;
    os << "\n";
    for (const auto& set : collection.sets) {
        const std::string label = set.label ? std::to_string(*set.label) : "";
        for (Eigen::Index r = 0; r < set.points.rows(); ++r) {
            os << set.id << "," << label;
            for (Eigen::Index c = 0; c < set.points.cols(); ++c)
                os << "," << format_double(set.points(r, c));
            os << "\n";
        }
    }
    write_file(path, os.str());
}

TermCountCollection load_term_counts(const std::string& path, const std::string& labels_path) {
    const auto lines = read_lines(path);
    std::map<std::string, std::map<long, long>> sparse;
    long max_index = -1;
    for (size_t ln = 0; ln < lines.size(); ++ln) {
        const auto fields = split_csv_line(lines[ln]);
        if (ln == 0 && fields.size() == 3 && fields[0] == "doc_id") continue;
        if (fields.size() != 3)
            throw FormatError("expected doc_id,term_index,count triplets at line " +
                              std::to_string(ln + 1) + " in " + path);
        const auto idx = parse_long(fields[1]);
        const auto count = parse_long(fields[2]);
        if (!idx || !count)
            throw ParseError("non-numeric triplet in " + path, static_cast<long>(ln + 1));
        if (*idx < 0) throw FormatError("negative term index at line " + std::to_string(ln + 1));
        if (*count < 0) throw FormatError("negative count at line " + std::to_string(ln + 1));
        sparse[fields[0]][*idx] += *count;
        max_index = std::max(max_index, *idx);
    }
    if (sparse.empty()) throw EmptyInputError("no triplets in " + path);

    TermCountCollection out;
    out.dict_size = static_cast<int>(max_index + 1);
    for (const auto& [id, terms] : sparse) {
        TermDocument doc;
        doc.id = id;
        doc.counts = Eigen::VectorXi::Zero(out.dict_size);
        long total = 0;
        for (const auto& [idx, count] : terms) {
            doc.counts[static_cast<Eigen::Index>(idx)] = static_cast<int>(count);
            total += count;
        }
        if (total == 0) throw DegenerateDocumentError("document " + id + " has zero total count");
        out.docs.push_back(std::move(doc));
    }

    std::string lpath = labels_path;
    if (lpath.empty()) {
        fs::path candidate = fs::path(path);
        candidate.replace_extension(".labels.csv");
        if (fs::exists(candidate)) lpath = candidate.string();
    }
    if (!lpath.empty()) {
        const auto llines = read_lines(lpath);
        LabelResolver resolver;
        for (size_t ln = 0; ln < llines.size(); ++ln) {
            const auto fields = split_csv_line(llines[ln]);
            if (ln == 0 && fields.size() >= 2 && fields[0] == "doc_id") continue;
            if (fields.size() != 2) throw FormatError("label file expects doc_id,label rows");
            resolver.add(fields[0], fields[1]);
        }
        std::map<std::string, int> id_to_label;
        resolver.resolve(id_to_label, out.label_names);
        for (auto& doc : out.docs) {
            const auto it = id_to_label.find(doc.id);
            if (it == id_to_label.end())
                throw FormatError("label file missing entry for document " + doc.id);
            doc.label = it->second;
        }
        out.labels_present = true;
    }
    return out;
}

void save_term_counts(const TermCountCollection& corpus, const std::string& path,
                      const std::string& labels_path) {
    std::ostringstream os;
    os << "doc_id,term_index,count\n";
    for (const auto& doc : corpus.docs) {
        for (Eigen::Index i = 0; i < doc.counts.size(); ++i) {
            if (doc.counts[i] != 0) os << doc.id << "," << i << "," << doc.counts[i] << "\n";
        }
    }
    write_file(path, os.str());
    std::string lpath = labels_path;
    if (lpath.empty() && corpus.labels_present) {
        fs::path candidate = fs::path(path);
        candidate.replace_extension(".labels.csv");
        lpath = candidate.string();
    }
    if (!lpath.empty() && corpus.labels_present) {
        std::ostringstream ls;
        ls << "doc_id,label\n";
        for (const auto& doc : corpus.docs) {
            if (!doc.label) continue;
            const auto it = corpus.label_names.find(*doc.label);
            ls << doc.id << ","
               << (it != corpus.label_names.end() ? it->second : std::to_string(*doc.label))
               << "\n";
        }
        write_file(lpath, ls.str());
    }
}

GaussianCollection load_gaussian_params(const std::string& path) {
    const auto lines = read_lines(path);
    GaussianCollection out;
    std::set<std::string> seen;
    for (size_t ln = 0; ln < lines.size(); ++ln) {
        const auto fields = split_csv_line(lines[ln]);
        if (ln == 0 && fields.size() == 3 && fields[0] == "id") continue;
        if (fields.size() != 3) throw FormatError("expected id,mu,sigma rows in " + path);
        const auto mu = parse_double(fields[1]);
        const auto sigma = parse_double(fields[2]);
        if (!mu || !sigma) throw ParseError("non-numeric parameter in " + path, static_cast<long>(ln + 1));
        if (*sigma <= 0) throw InvalidParameterError("sigma must be positive for " + fields[0]);
        if (!seen.insert(fields[0]).second) throw FormatError("duplicate id " + fields[0]);
        out.ids.push_back(fields[0]);
        out.params.push_back({*mu, *sigma});
    }
    if (out.ids.empty()) throw EmptyInputError("no parameter rows in " + path);
    return out;
}

void save_gaussian_params(const GaussianCollection& gaussians, const std::string& path) {
    std::ostringstream os;
    os << "id,mu,sigma\n";
    for (size_t i = 0; i < gaussians.ids.size(); ++i)
        os << gaussians.ids[i] << "," << format_double(gaussians.params[i].mu) << ","
           << format_double(gaussians.params[i].sigma) << "\n";
    write_file(path, os.str());
}

void save_ground_truth(const std::vector<std::string>& ids, const Eigen::MatrixXd& points,
                       const std::string& path) {
    std::ostringstream os;
    os << "set_id";
    for (Eigen::Index d = 1; d <= points.cols(); ++d) os << ",y" << d;
    os << "\n";
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        os << ids[static_cast<size_t>(r)];
        for (Eigen::Index c = 0; c < points.cols(); ++c) os << "," << format_double(points(r, c));
        os << "\n";
    }
    write_file(path, os.str());
}

Eigen::MatrixXd load_ground_truth(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) throw EmptyInputError("no data rows in " + path);
    std::vector<Eigen::RowVectorXd> rows;
    int dim = -1;
    for (size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split_csv_line(lines[ln]);
        if (fields.size() < 2)
            throw FormatError("expected set_id plus coordinates at line " + std::to_string(ln + 1) +
                              " in " + path);
        const int row_dim = static_cast<int>(fields.size()) - 1;
        if (dim < 0) dim = row_dim;
        if (row_dim != dim)
            throw FormatError("inconsistent column count at line " + std::to_string(ln + 1) +
                              " in " + path);
        Eigen::RowVectorXd row(dim);
        for (int d = 0; d < dim; ++d) {
            const auto v = parse_double(fields[static_cast<size_t>(d) + 1]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric coordinate '" + fields[static_cast<size_t>(d) + 1] +
                                     "' in " + path,
                                 static_cast<long>(ln + 1));
            row[d] = *v;
        }
        rows.push_back(row);
    }
    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), dim);
    for (size_t r = 0; r < rows.size(); ++r) points.row(static_cast<Eigen::Index>(r)) = rows[r];
    return points;
}

std::vector<std::string> GaussianGrid::ids() const {
    const int kw = digits_for(k_steps), lw = digits_for(l_steps);
    std::vector<std::string> out;
    out.reserve(params.size());
    for (int k = 1; k <= k_steps; ++k)
        for (int l = 1; l <= l_steps; ++l)
            out.push_back("g_" + zero_pad(k, kw) + "_" + zero_pad(l, lw));
    return out;
}

GaussianGrid gen_gaussian_grid(double alpha, double beta, int k_steps, int l_steps) {
    if (k_steps < 1 || l_steps < 1)
        throw InvalidParameterError("grid steps must be >= 1");
    GaussianGrid grid;
    grid.k_steps = k_steps;
    grid.l_steps = l_steps;
    grid.params.reserve(static_cast<size_t>(k_steps) * l_steps);
    for (int k = 1; k <= k_steps; ++k) {
        for (int l = 1; l <= l_steps; ++l) {
            const double sigma = 1.0 + beta * l;
            if (sigma <= 0.0)
                throw InvalidParameterError("non-positive sigma at grid position l=" +
                                            std::to_string(l));
            grid.params.push_back({alpha * k, sigma});
        }
    }
    return grid;
}

SwissRollData gen_swiss_roll_sets(int n_sets, int samples_per_set, double noise_scale,
                                  std::uint64_t seed) {
    if (n_sets < 4) throw InvalidParameterError("n_sets must be >= 4");
    if (samples_per_set < 2) throw InvalidParameterError("samples_per_set must be >= 2");
    if (noise_scale < 0) throw InvalidParameterError("noise_scale must be >= 0");

    Rng rng(seed);
    SwissRollData out;
    out.ground_truth.resize(n_sets, 3);
    for (int i = 0; i < n_sets; ++i) {
        const double t = rng.uniform(1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
        const double h = rng.uniform(0.0, 20.0);
        out.ground_truth.row(i) << t * std::cos(t), h, t * std::sin(t);
    }

    const int width = std::max(4, digits_for(n_sets - 1));
    out.collection.dim = 3;
    out.collection.labels_present = false;
    for (int i = 0; i < n_sets; ++i) {
        SampleSet set;
        set.id = "set_" + zero_pad(i, width);
        set.points.resize(samples_per_set, 3);
        for (int s = 0; s < samples_per_set; ++s)
            for (int d = 0; d < 3; ++d)
                set.points(s, d) = out.ground_truth(i, d) + noise_scale * rng.normal();
        out.collection.sets.push_back(std::move(set));
    }
    return out;
}

TermCountCollection gen_multinomial_clusters(int n_classes, int dict_size, int docs_per_class,
                                             int counts_per_doc, double concentration,
                                             std::uint64_t seed) {
    if (n_classes < 1 || dict_size < 1 || docs_per_class < 1 || counts_per_doc < 1)
        throw InvalidParameterError("all count parameters must be >= 1");
    if (dict_size < n_classes)
        throw InvalidParameterError("dict_size must be >= n_classes");
    if (concentration <= 0) throw InvalidParameterError("concentration must be positive");

    Rng rng(seed);

    // Class c owns the contiguous dictionary block [c*V/C, (c+1)*V/C). Its topic
    // distribution is Dirichlet with parameter concentration everywhere plus 1
    // on the block, so small concentration collapses support onto the block and
    // large concentration flattens every class toward uniform.
    std::vector<Eigen::VectorXd> class_pdfs;
    for (int c = 0; c < n_classes; ++c) {
        const int lo = static_cast<int>(static_cast<long>(c) * dict_size / n_classes);
        const int hi = static_cast<int>(static_cast<long>(c + 1) * dict_size / n_classes);
        Eigen::VectorXd alpha = Eigen::VectorXd::Constant(dict_size, concentration);
        for (int i = lo; i < hi; ++i) alpha[i] += 1.0;
        class_pdfs.push_back(rng.dirichlet(alpha));
    }

    TermCountCollection out;
    out.dict_size = dict_size;
    out.labels_present = true;
    const int total = n_classes * docs_per_class;
    const int width = std::max(4, digits_for(total - 1));
    int doc_index = 0;
    for (int c = 0; c < n_classes; ++c) {
        out.label_names[c] = "class_" + std::to_string(c);
        for (int d = 0; d < docs_per_class; ++d, ++doc_index) {
            TermDocument doc;
            doc.id = "doc_" + zero_pad(doc_index, width);
            doc.counts = rng.multinomial_counts(class_pdfs[c], counts_per_doc);
            doc.label = c;
            out.docs.push_back(std::move(doc));
        }
    }
    return out;
}

}  // namespace fine
