#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gfa/data_model.hpp"
#include "gfa/error.hpp"
#include "gfa/rng.hpp"
#include "gfa/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gfa;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("gfa_test_dm_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string manifest(std::initializer_list<const char*> files) {
    std::string s = "{\"views\": [";
    bool first = true;
    for (const char* f : files) {
        if (!first) s += ", ";
        first = false;
        s += std::string("{\"name\": \"") + f + "\", \"file\": \"" + f + ".csv\"}";
    }
    return s + "]}";
}

}  // namespace

TEST_CASE("partition validation") {
    ViewPartition p({2, 3, 2});
    CHECK(p.view_count() == 3);
    CHECK(p.total_dim() == 7);
    CHECK(p.offset(2) == 5);
    CHECK(p.names()[1] == "view1");
    CHECK_THROWS_AS(ViewPartition(std::vector<Index>{}), UsageError);
    CHECK_THROWS_AS(ViewPartition({2, 0}), UsageError);
    CHECK_THROWS_AS(ViewPartition({2, 2}, {"a"}), UsageError);
}

TEST_CASE("collection invariants") {
    ViewPartition p({1, 2});
    CHECK_THROWS_AS(DataCollection(p, Matrix::Zero(1, 3)), UsageError);
    CHECK_THROWS_AS(DataCollection(p, Matrix::Zero(4, 2)), UsageError);
    Matrix bad = Matrix::Zero(3, 3);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DataCollection(p, bad), UsageError);
    Matrix ok = Matrix::Random(3, 3);
    DataCollection c(p, ok);
    CHECK(c.view(1).cols() == 2);
    CHECK(c.view(1)(2, 1) == ok(2, 2));
}

TEST_CASE("load three views") {
    auto dir = scratch_dir("load");
    write_text(dir / "a.csv", "1,2\n3,4\n5,6\n7,8\n9,10\n");
    write_text(dir / "b.csv", "1,2,3\n4,5,6\n7,8,9\n10,11,12\n13,14,15\n");
    write_text(dir / "c.csv", "0,0\n0,1\n1,0\n1,1\n2,2\n");
    write_text(dir / "manifest.json", manifest({"a", "b", "c"}));
    auto c = load_collection(dir);
    CHECK(c.n_samples() == 5);
    CHECK(c.partition().dims() == std::vector<Index>{2, 3, 2});
    CHECK(c.partition().names()[1] == "b");
    CHECK(c.data()(4, 4) == 15.0);
    auto via_file = load_collection(dir / "manifest.json");
    CHECK(via_file.data() == c.data());
}

TEST_CASE("load errors") {
    auto dir = scratch_dir("errors");
    write_text(dir / "a.csv", "1\n2\n3\n4\n5\n");
    write_text(dir / "b.csv", "1\n2\n3\n4\n5\n6\n");
    write_text(dir / "manifest.json", manifest({"a", "b"}));
    CHECK_THROWS_AS(load_collection(dir), IoError);

    write_text(dir / "b.csv", "1\n2\nx\n4\n5\n");
    CHECK_THROWS_AS(load_collection(dir), IoError);

    write_text(dir / "b.csv", "");
    CHECK_THROWS_AS(load_collection(dir), IoError);

    write_text(dir / "manifest.json", manifest({"a", "missing"}));
    CHECK_THROWS_AS(load_collection(dir), IoError);

    CHECK_THROWS_AS(load_collection(dir / "nope"), IoError);
}

TEST_CASE("csv header and quoting") {
    auto dir = scratch_dir("header");
    write_text(dir / "a.csv", "\"x, one\",y\n1,2\n3,4\n");
    write_text(dir / "manifest.json",
               "{\"csv_header\": true, \"views\": [{\"name\": \"a\", \"file\": \"a.csv\"}]}");
    auto c = load_collection(dir);
    CHECK(c.n_samples() == 2);
    CHECK(c.data()(1, 1) == 4.0);
}

TEST_CASE("preset directory round trip") {
    auto truth = generate_truth(0, {}, 0, FactorDistribution::sec4_preset, 3);
    auto data = sample_collection(truth, 100, 4);
    auto dir = scratch_dir("preset");
    save_collection(data, dir);
    auto back = load_collection(dir);
    CHECK(back.n_samples() == 100);
    CHECK(back.partition().total_dim() == 72);
    CHECK(back.view_count() == 10);
    // bit-identical, not approximately equal
    CHECK((back.data().array() == data.data().array()).all());
}

TEST_CASE("format_double round trips") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
}

TEST_CASE("center") {
    ViewPartition p({1});
    Matrix x(3, 1);
    x << 1, 2, 3;
    auto [c, rec] = center(DataCollection(p, x), false);
    CHECK(c.data()(0, 0) == doctest::Approx(-1.0));
    CHECK(c.data()(1, 0) == doctest::Approx(0.0));
    CHECK(c.data()(2, 0) == doctest::Approx(1.0));
    CHECK(rec.means(0) == doctest::Approx(2.0));
    CHECK_FALSE(rec.scaled());
}

TEST_CASE("center is idempotent") {
    Rng rng(5);
    Matrix x = rng.normal_matrix(40, 6).array() + 3.0;
    auto [once, r1] = center(DataCollection(ViewPartition({2, 4}), x), false);
    auto [twice, r2] = center(once, false);
    CHECK((twice.data() - once.data()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(once.data().colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("center with scaling") {
    Rng rng(6);
    Matrix x = rng.normal_matrix(30, 3) * 4.0;
    x.col(1).setConstant(4.0);
    auto [c, rec] = center(DataCollection(ViewPartition({3}), x), true);
    CHECK(rec.scaled());
    CHECK(rec.scales(1) == 1.0);
    CHECK(rec.constant_columns == std::vector<Index>{1});
    CHECK(c.data().col(1).cwiseAbs().maxCoeff() == 0.0);
    for (Index j : {0, 2}) {
        const double var = c.data().col(j).squaredNorm() / 29.0;
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
}
