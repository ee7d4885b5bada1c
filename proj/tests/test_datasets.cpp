#include "doctest.h"

#include <fstream>

#include "fine/datasets.hpp"
#include "fine/errors.hpp"
#include "fine/text_io.hpp"

#include "test_util.hpp"

using namespace fine;

namespace {

DatasetCollection tiny_collection() {
    DatasetCollection c;
    c.dim = 2;
    c.labels_present = true;
    SampleSet a;
    a.id = "alpha";
    a.points.resize(2, 2);
    a.points << 0.25, -1.0, 0.5, 2.0;
    a.label = 0;
    SampleSet b;
    b.id = "beta";
    b.points.resize(3, 2);
    b.points << 1.0, 1.0, 2.0, 2.0, 3.0, 0.125;
    b.label = 1;
    c.sets = {a, b};
    c.label_names = {{0, "neg"}, {1, "pos"}};
    return c;
}

}  // namespace

TEST_CASE("long CSV save/load round-trips byte for byte") {
    auto dir = fresh_dir("datasets_long");
    auto c = tiny_collection();
    const std::string path = (dir / "collection.csv").string();
    save_collection(c, path);
    const std::string first = slurp(path);

    DatasetCollection back = load_collection(path, CollectionFormat::long_csv);
    REQUIRE(back.size() == 2);
    CHECK(back.dim == 2);
    CHECK(back.sets[0].id == "alpha");
    CHECK(back.sets[0].points == c.sets[0].points);
    CHECK(back.sets[1].points == c.sets[1].points);
    CHECK(back.labels_present);
    CHECK(*back.sets[1].label == 1);

    const std::string again = (dir / "again.csv").string();
    save_collection(back, again);
    CHECK(slurp(again) == first);
}

TEST_CASE("long CSV loader rejects malformed input") {
    auto dir = fresh_dir("datasets_bad");
    write_file((dir / "nohdr.csv").string(), "foo,bar,x1\ns,0,1\n");
    CHECK_THROWS_AS(load_collection((dir / "nohdr.csv").string(), CollectionFormat::long_csv),
                    FormatError);
    write_file((dir / "badnum.csv").string(), "set_id,label,x1\ns,0,oops\n");
    CHECK_THROWS_AS(load_collection((dir / "badnum.csv").string(), CollectionFormat::long_csv),
                    ParseError);
    write_file((dir / "short.csv").string(), "set_id,label,x1,x2\ns,0,1\n");
    CHECK_THROWS(load_collection((dir / "short.csv").string(), CollectionFormat::long_csv));
}

TEST_CASE("directory loader orders sets by id and reads the labels sidecar") {
    auto dir = fresh_dir("datasets_dir");
    write_file((dir / "zed.csv").string(), "1.0,2.0\n3.0,4.0\n");
    write_file((dir / "abe.csv").string(), "5.0,6.0\n");
    write_file((dir / "labels.csv").string(), "set_id,label\nzed,1\nabe,0\n");

    DatasetCollection c = load_collection(dir.string(), CollectionFormat::directory);
    REQUIRE(c.size() == 2);
    CHECK(c.sets[0].id == "abe");
    CHECK(c.sets[1].id == "zed");
    CHECK(c.dim == 2);
    CHECK(*c.sets[0].label == 0);
    CHECK(*c.sets[1].label == 1);
    CHECK(c.sets[1].points(1, 1) == 4.0);
}

TEST_CASE("term count triplets round-trip with label names") {
    auto dir = fresh_dir("datasets_terms");
    TermCountCollection corpus;
    corpus.dict_size = 4;
    corpus.labels_present = true;
    corpus.label_names = {{0, "ham"}, {1, "spam"}};
    TermDocument d0;
    d0.id = "doc_a";
    d0.counts = Eigen::VectorXi::Zero(4);
    d0.counts << 2, 0, 1, 0;
    d0.label = 1;
    TermDocument d1;
    d1.id = "doc_b";
    d1.counts = Eigen::VectorXi::Zero(4);
    d1.counts << 0, 5, 0, 3;
    d1.label = 0;
    corpus.docs = {d0, d1};

    const std::string path = (dir / "term_counts.csv").string();
    save_term_counts(corpus, path);
    TermCountCollection back = load_term_counts(path);
    REQUIRE(back.size() == 2);
    CHECK(back.dict_size == 4);
    CHECK(back.docs[0].counts == d0.counts);
    CHECK(back.docs[1].counts == d1.counts);
    // names map to ids in lexicographic order: ham -> 0, spam -> 1
    CHECK(*back.docs[0].label == 1);
    CHECK(*back.docs[1].label == 0);
    CHECK(back.label_names.at(0) == "ham");
}

TEST_CASE("term count loader rejects bad rows") {
    auto dir = fresh_dir("datasets_terms_bad");
    write_file((dir / "neg.csv").string(), "doc_id,term_index,count\nd,0,-2\n");
    CHECK_THROWS(load_term_counts((dir / "neg.csv").string()));
    write_file((dir / "wide.csv").string(), "doc_id,term_index,count\nd,0\n");
    CHECK_THROWS_AS(load_term_counts((dir / "wide.csv").string()), FormatError);
}

TEST_CASE("gaussian params round-trip") {
    auto dir = fresh_dir("datasets_gauss");
    GaussianCollection g;
    g.ids = {"a", "b"};
    g.params = {{0.5, 1.25}, {-1.0, 2.0}};
    const std::string path = (dir / "params.csv").string();
    save_gaussian_params(g, path);
    GaussianCollection back = load_gaussian_params(path);
    REQUIRE(back.ids.size() == 2);
    CHECK(back.params[0].mu == 0.5);
    CHECK(back.params[0].sigma == 1.25);
    CHECK(back.params[1].mu == -1.0);
}

TEST_CASE("gaussian grid enumerates row-major from k=l=1") {
    GaussianGrid grid = gen_gaussian_grid(0.1, 0.2, 2, 3);
    REQUIRE(grid.params.size() == 6);
    CHECK(grid.params[0].mu == doctest::Approx(0.1));
    CHECK(grid.params[0].sigma == doctest::Approx(1.2));
    // row-major: k fixed, l runs fastest
    CHECK(grid.params[2].mu == doctest::Approx(0.1));
    CHECK(grid.params[2].sigma == doctest::Approx(1.6));
    CHECK(grid.params[3].mu == doctest::Approx(0.2));
    auto ids = grid.ids();
    CHECK(ids[0] == "g_1_1");
    CHECK(ids[5] == "g_2_3");
}

TEST_CASE("swiss roll sets sit near their ground-truth means") {
    SwissRollData roll = gen_swiss_roll_sets(10, 30, 0.25, 99);
    REQUIRE(roll.collection.size() == 10);
    CHECK(roll.collection.dim == 3);
    CHECK(roll.ground_truth.rows() == 10);
    for (int i = 0; i < 10; ++i) {
        const auto& pts = roll.collection.sets[static_cast<size_t>(i)].points;
        REQUIRE(pts.rows() == 30);
        Eigen::RowVector3d mean = pts.colwise().mean();
        // sample mean of N(truth, 0.25^2 I) over 30 draws
        CHECK((mean - roll.ground_truth.row(i)).norm() < 0.5);
        // the roll lives on (t cos t, h, t sin t) with t in [1.5pi, 4.5pi]
        double t = std::hypot(roll.ground_truth(i, 0), roll.ground_truth(i, 2));
        CHECK(t >= 1.5 * 3.14159265);
        CHECK(t <= 4.5 * 3.1415927);
        CHECK(roll.ground_truth(i, 1) >= 0.0);
        CHECK(roll.ground_truth(i, 1) <= 20.0);
    }
    // seeded: regenerating gives identical data
    SwissRollData roll2 = gen_swiss_roll_sets(10, 30, 0.25, 99);
    CHECK(roll2.collection.sets[3].points == roll.collection.sets[3].points);
}

TEST_CASE("multinomial cluster corpus has the declared shape") {
    TermCountCollection corpus = gen_multinomial_clusters(3, 50, 4, 60, 0.5, 7);
    REQUIRE(corpus.size() == 12);
    CHECK(corpus.dict_size == 50);
    CHECK(corpus.labels_present);
    for (const auto& doc : corpus.docs) {
        CHECK(doc.counts.sum() == 60);
        REQUIRE(doc.label.has_value());
        CHECK(*doc.label >= 0);
        CHECK(*doc.label < 3);
    }
    // docs come in class blocks of docs_per_class
    CHECK(*corpus.docs[0].label == 0);
    CHECK(*corpus.docs[11].label == 2);
}

TEST_CASE("ground truth file round-trips") {
    auto dir = fresh_dir("datasets_gt");
    Eigen::MatrixXd pts(2, 3);
    pts << 1, 2, 3, 4, 5, 6.5;
    save_ground_truth({"a", "b"}, pts, (dir / "gt.csv").string());
    Eigen::MatrixXd back = load_ground_truth((dir / "gt.csv").string());
    CHECK(back == pts);
}
