#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "tsbow/dataio.hpp"

using namespace tsbow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tsbow_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static std::size_t& counter() {
        static std::size_t c = 0;
        return c;
    }
};

void write_file(const fs::path& p, const std::string& body) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << body;
}

} // namespace

TEST_CASE("directory dataset round trip is exact") {
    TempDir tmp;
    SyntheticSpec spec;
    spec.n_classes = 2;
    spec.series_per_class = 3;
    spec.len_min = spec.len_max = 64;
    spec.motif_len = 16;
    spec.motifs_per_class = 2;
    spec.gap_max = 4;
    spec.seed = 5;
    const Dataset ds = gen_synthetic(spec);
    write_dataset_dir(ds, tmp.path / "data");

    const Dataset back = load_dataset(tmp.path / "data", DataFormat::directory);
    REQUIRE(back.size() == ds.size());
    CHECK(back.classes == ds.classes);
    // directory iteration sorts by class then id, matching generation order here
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.series[i].label == ds.series[i].label);
        CHECK(back.series[i].values == ds.series[i].values); // %.17g is lossless
    }
}

TEST_CASE("directory loader errors") {
    TempDir tmp;
    CHECK_THROWS_AS(load_dataset(tmp.path / "missing", DataFormat::directory),
                    InvalidInput);

    fs::create_directories(tmp.path / "empty");
    CHECK_THROWS_AS(load_dataset(tmp.path / "empty", DataFormat::directory), FormatError);

    write_file(tmp.path / "bad" / "classA" / "s0.txt", "1.0\n2.0\n3.0\n4.0\n5.0\n6.0\nabc\n");
    try {
        load_dataset(tmp.path / "bad", DataFormat::directory);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find(":7") != std::string::npos);
        CHECK(std::string(e.what()).find("s0.txt") != std::string::npos);
    }

    write_file(tmp.path / "nonfinite" / "c" / "s.txt", "1.0\nnan\n");
    CHECK_THROWS_AS(load_dataset(tmp.path / "nonfinite", DataFormat::directory),
                    FormatError);
}

TEST_CASE("table dataset parses labels and values") {
    TempDir tmp;
    write_file(tmp.path / "t.csv", "2,0.1,0.5,-0.3\nx,1,2\n2,7,8,9\n");
    const Dataset ds = load_dataset(tmp.path / "t.csv", DataFormat::table);
    REQUIRE(ds.size() == 3);
    CHECK(ds.series[0].label == "2");
    CHECK(ds.series[0].values == std::vector<double>{0.1, 0.5, -0.3});
    CHECK(ds.series[1].label == "x");
    CHECK(ds.classes == std::vector<std::string>{"2", "x"});

    write_file(tmp.path / "tabs.tsv", "a\t1\t2\t3\nb\t4\t5\t6\n");
    const Dataset tabs = load_dataset(tmp.path / "tabs.tsv", DataFormat::table);
    CHECK(tabs.series[1].values == std::vector<double>{4, 5, 6});
}

TEST_CASE("table loader errors carry line numbers") {
    TempDir tmp;
    write_file(tmp.path / "bad.csv", "a,1,2\nb,oops,3\n");
    try {
        load_dataset(tmp.path / "bad.csv", DataFormat::table);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    write_file(tmp.path / "nosamples.csv", "label_only\n");
    CHECK_THROWS_AS(load_dataset(tmp.path / "nosamples.csv", DataFormat::table),
                    FormatError);
}

TEST_CASE("extract_random_windows stays in bounds and reproduces") {
    TimeSeries src;
    src.values.resize(512);
    for (std::size_t i = 0; i < src.values.size(); ++i)
        src.values[i] = static_cast<double>(i);
    src.label = "subject0";
    src.id = "rec";

    const auto windows = extract_random_windows(src, 50, 64, 64, 9);
    REQUIRE(windows.size() == 50);
    for (const auto& w : windows) {
        REQUIRE(w.size() == 64);
        CHECK(w.label == "subject0");
        // value == source index, so bounds show directly
        CHECK(w.values.front() >= 0.0);
        CHECK(w.values.back() <= 511.0);
        CHECK(w.values.back() - w.values.front() == 63.0); // contiguous
    }

    const auto varied = extract_random_windows(src, 30, 64, 128, 9);
    for (const auto& w : varied) {
        CHECK(w.size() >= 64);
        CHECK(w.size() <= 128);
    }

    const auto again = extract_random_windows(src, 30, 64, 128, 9);
    for (std::size_t i = 0; i < 30; ++i) CHECK(again[i].values == varied[i].values);

    CHECK_THROWS_AS(extract_random_windows(src, 5, 64, 1024, 9), InvalidInput);
}

TEST_CASE("gen_synthetic determinism and declared ranges") {
    SyntheticSpec spec;
    spec.n_classes = 3;
    spec.series_per_class = 4;
    spec.len_min = 100;
    spec.len_max = 180;
    spec.motif_len = 16;
    spec.motifs_per_class = 2;
    spec.seed = 77;
    const Dataset a = gen_synthetic(spec);
    const Dataset b = gen_synthetic(spec);
    REQUIRE(a.size() == 12);
    CHECK(a.classes == std::vector<std::string>{"c0", "c1", "c2"});
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.series[i].values == b.series[i].values);
        CHECK(a.series[i].size() >= 100);
        CHECK(a.series[i].size() <= 180);
    }

    SyntheticSpec bad = spec;
    bad.motifs = {{{1.0, 2.0}}, {{1.0, 2.0}}, {{3.0}}}; // duplicate dictionaries
    CHECK_THROWS_AS(gen_synthetic(bad), InvalidInput);
    bad.motifs = {{{1.0, 2.0}}, {}, {{3.0}}}; // empty dictionary
    CHECK_THROWS_AS(gen_synthetic(bad), InvalidInput);
}

TEST_CASE("codebook persistence round trip is bit exact") {
    TempDir tmp;
    Codebook cb;
    cb.config.window_len = 64;
    cb.config.stride = 2;
    cb.config.codebook_size = 3;
    cb.config.wavelet = "db3";
    cb.config.max_train_segments = 777;
    cb.config.max_iter = 55;
    cb.config.seed = 123456789;
    cb.stats.iterations = 17;
    cb.stats.objective = 0.12345678901234567;
    cb.stats.segments_used = 777;
    std::mt19937_64 rng = make_rng(81);
    std::normal_distribution<double> gauss(0.0, 1.0);
    cb.centroids.assign(3, FeatureVector(34));
    for (auto& c : cb.centroids)
        for (double& v : c) v = gauss(rng) * 1e-7; // awkward magnitudes on purpose

    const fs::path file = tmp.path / "cb.tsbow";
    save_codebook(cb, file);
    const Codebook back = load_codebook(file);
    CHECK(back.centroids == cb.centroids);
    CHECK(back.config.window_len == cb.config.window_len);
    CHECK(back.config.stride == cb.config.stride);
    CHECK(back.config.wavelet == cb.config.wavelet);
    CHECK(back.config.codebook_size == 3);
    CHECK(back.config.seed == cb.config.seed);
    CHECK(back.stats.objective == cb.stats.objective);
}

TEST_CASE("codebook loader rejects corrupt files") {
    TempDir tmp;
    CHECK_THROWS_AS(load_codebook(tmp.path / "missing"), FormatError);

    write_file(tmp.path / "magic", "something-else v1\n");
    CHECK_THROWS_AS(load_codebook(tmp.path / "magic"), FormatError);

    write_file(tmp.path / "version", "tsbow-codebook v9\n");
    CHECK_THROWS_AS(load_codebook(tmp.path / "version"), FormatError);

    write_file(tmp.path / "zero_k",
               "tsbow-codebook v1\nk 0\ndim 4\nwavelet db3\nwindow_len 64\nstride 2\n"
               "max_train_segments 10\nmax_iter 5\nseed 0\niterations 1\nobjective 0\n"
               "segments_used 10\n");
    CHECK_THROWS_AS(load_codebook(tmp.path / "zero_k"), FormatError);

    write_file(tmp.path / "truncated",
               "tsbow-codebook v1\nk 2\ndim 3\nwavelet db3\nwindow_len 64\nstride 2\n"
               "max_train_segments 10\nmax_iter 5\nseed 0\niterations 1\nobjective 0\n"
               "segments_used 10\ncentroid 1 2 3\ncentroid 4 5\n");
    CHECK_THROWS_AS(load_codebook(tmp.path / "truncated"), FormatError);
}

TEST_CASE("histogram CSV has one row per series") {
    std::vector<TimeSeries> series(2);
    series[0].id = "s0";
    series[0].label = "a";
    series[1].id = "s1";
    series[1].label = "b";
    std::vector<BowHistogram> hists(2);
    hists[0].counts = {1, 2, 0};
    hists[0].total = 3;
    hists[1].counts = {0, 0, 5};
    hists[1].total = 5;
    Codebook cb;
    cb.centroids.assign(3, FeatureVector(4, 0.0));
    cb.config.wavelet = "db2";

    std::ostringstream out;
    write_histograms_csv(out, cb, series, hists);
    const std::string body = out.str();
    CHECK(body.find("# codebook k=3 dim=4 wavelet=db2") != std::string::npos);
    CHECK(body.find("id,label,h0,h1,h2\ns0,a,1,2,0\ns1,b,0,0,5\n") != std::string::npos);
}
