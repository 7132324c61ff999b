#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tsbow/bow.hpp"
#include "tsbow/rng.hpp"

using namespace tsbow;

namespace {

std::vector<FeatureVector> random_points(std::size_t n, std::size_t dim,
                                         std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<FeatureVector> pts(n, FeatureVector(dim));
    for (auto& p : pts)
        for (double& v : p) v = gauss(rng);
    return pts;
}

} // namespace

TEST_CASE("extract_segments count and offsets") {
    std::vector<double> x(2000, 0.0);
    CHECK(extract_segments(x, 100, 1).size() == 1901);

    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) y[i] = static_cast<double>(i);
    const auto segs = extract_segments(y, 4, 2);
    REQUIRE(segs.size() == 4);
    CHECK(segs[0][0] == 0.0);
    CHECK(segs[1][0] == 2.0);
    CHECK(segs[3][0] == 6.0);

    CHECK(extract_segments(y, 10, 3).size() == 1); // len == window
    CHECK_THROWS_AS(extract_segments(y, 11, 1), InvalidInput);
}

TEST_CASE("segment_features dimension and flat-window behavior") {
    const WaveletFilter db3 = wavelet_filters("db3");
    std::mt19937_64 rng = make_rng(41);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> window(128);
    for (double& v : window) v = gauss(rng);

    const FeatureVector f = segment_features(window, db3);
    CHECK(f.size() == 66); // about half the window

    const std::vector<double> flat(128, 7.5);
    for (double v : segment_features(flat, db3)) CHECK(v == 0.0);
}

TEST_CASE("segment_features is invariant to positive affine transforms") {
    const WaveletFilter db3 = wavelet_filters("db3");
    std::mt19937_64 rng = make_rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> window(64), scaled(64);
    for (std::size_t i = 0; i < 64; ++i) {
        window[i] = gauss(rng);
        scaled[i] = 3.75 * window[i] - 11.0;
    }
    const FeatureVector a = segment_features(window, db3);
    const FeatureVector b = segment_features(scaled, db3);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == Catch::Approx(b[i]).margin(1e-9));
}

TEST_CASE("kmeans with k=1 converges to the mean") {
    std::mt19937_64 rng = make_rng(43);
    const auto pts = random_points(40, 3, rng);
    const KmeansResult res = kmeans_lloyd(pts, {.k = 1, .max_iter = 50, .seed = 9});
    FeatureVector mean(3, 0.0);
    for (const auto& p : pts)
        for (std::size_t d = 0; d < 3; ++d) mean[d] += p[d] / 40.0;
    for (std::size_t d = 0; d < 3; ++d)
        CHECK(res.centroids[0][d] == Catch::Approx(mean[d]).margin(1e-12));
}

TEST_CASE("kmeans with k = n distinct points reaches objective zero") {
    std::mt19937_64 rng = make_rng(44);
    const auto pts = random_points(6, 2, rng);
    const KmeansResult res = kmeans_lloyd(pts, {.k = 6, .max_iter = 50, .seed = 1});
    CHECK(res.stats.objective == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("kmeans best-of-seeds matches the brute-force global optimum") {
    // three loose blobs of four points; unstructured clouds can hide the
    // global basin from any finite number of seeds
    std::mt19937_64 rng = make_rng(45);
    std::normal_distribution<double> jitter(0.0, 0.4);
    std::vector<FeatureVector> pts;
    for (double cx : {0.0, 4.0, 8.0})
        for (int i = 0; i < 4; ++i)
            pts.push_back({cx + jitter(rng), jitter(rng)});
    const double global = oracles::kmeans_global_optimum(pts, 3);

    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const KmeansResult res = kmeans_lloyd(pts, {.k = 3, .max_iter = 100, .seed = seed});
        CHECK(res.stats.objective >= global - 1e-9); // never beats the optimum
        for (std::size_t i = 1; i < res.stats.objective_history.size(); ++i)
            CHECK(res.stats.objective_history[i] <=
                  res.stats.objective_history[i - 1] + 1e-12);
        best = std::min(best, res.stats.objective);
    }
    CHECK(best == Catch::Approx(global).margin(1e-9));
}

TEST_CASE("kmeans is deterministic under the seed") {
    std::mt19937_64 rng = make_rng(46);
    const auto pts = random_points(50, 4, rng);
    const KmeansResult a = kmeans_lloyd(pts, {.k = 5, .max_iter = 100, .seed = 77});
    const KmeansResult b = kmeans_lloyd(pts, {.k = 5, .max_iter = 100, .seed = 77});
    CHECK(a.centroids == b.centroids);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("kmeans input validation") {
    std::mt19937_64 rng = make_rng(47);
    auto pts = random_points(4, 2, rng);
    CHECK_THROWS_AS(kmeans_lloyd(pts, {.k = 5}), InvalidInput);
    pts.push_back(FeatureVector(3, 0.0)); // dimension mismatch
    CHECK_THROWS_AS(kmeans_lloyd(pts, {.k = 2}), InvalidInput);
}

TEST_CASE("train_codebook caps the clustering subset") {
    std::mt19937_64 rng = make_rng(48);
    const auto feats = random_points(500, 4, rng);
    BowConfig cfg;
    cfg.codebook_size = 8;
    cfg.max_train_segments = 200;
    cfg.max_iter = 20;
    cfg.seed = 3;
    const Codebook cb = train_codebook(feats, cfg);
    CHECK(cb.stats.segments_used == 200);
    CHECK(cb.size() == 8);
    CHECK(cb.dim() == 4);

    BowConfig small = cfg;
    small.codebook_size = 600; // more centroids than features
    CHECK_THROWS_AS(train_codebook(feats, small), InvalidInput);
}

TEST_CASE("assign_codeword agrees with a linear-scan oracle") {
    std::mt19937_64 rng = make_rng(49);
    Codebook cb;
    cb.centroids = random_points(50, 20, rng);
    for (int trial = 0; trial < 1000; ++trial) {
        FeatureVector q(20);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& v : q) v = gauss(rng);

        std::size_t expect = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < cb.centroids.size(); ++j) {
            double d = 0;
            for (std::size_t t = 0; t < q.size(); ++t) {
                const double diff = q[t] - cb.centroids[j][t];
                d += diff * diff;
            }
            if (d < best) { best = d; expect = j; }
        }
        CHECK(assign_codeword(cb, q) == expect);
    }
}

TEST_CASE("assign_codeword documented cases and tie-break") {
    Codebook cb;
    cb.centroids = {{0.0, 0.0}, {1.0, 1.0}};
    CHECK(assign_codeword(cb, std::vector<double>{0.1, 0.0}) == 0);
    CHECK(assign_codeword(cb, std::vector<double>{1.0, 1.0}) == 1); // exact centroid

    cb.centroids = {{0.0, 0.0}, {1.0, 0.0}};
    CHECK(assign_codeword(cb, std::vector<double>{0.5, 0.0}) == 0); // tie -> lowest

    CHECK_THROWS_AS(assign_codeword(cb, std::vector<double>{1.0, 2.0, 3.0}),
                    InvalidInput);
}

namespace {

// small trained codebook shared by the histogram tests
Codebook tiny_codebook() {
    std::mt19937_64 rng = make_rng(50);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<const TimeSeries*> ptrs;
    static std::vector<TimeSeries> corpus;
    if (corpus.empty()) {
        corpus.resize(6);
        for (auto& ts : corpus) {
            ts.values.resize(256);
            for (double& v : ts.values) v = gauss(rng);
        }
    }
    for (auto& ts : corpus) ptrs.push_back(&ts);
    BowConfig cfg;
    cfg.window_len = 16;
    cfg.stride = 2;
    cfg.codebook_size = 6;
    cfg.wavelet = "db2";
    cfg.max_iter = 30;
    cfg.seed = 4;
    return train_codebook(collect_features(ptrs, cfg), cfg);
}

} // namespace

TEST_CASE("collect_features names the offending series when one is too short") {
    TimeSeries ok, tiny;
    ok.values.assign(64, 1.0);
    ok.id = "long_one";
    tiny.values.assign(8, 1.0);
    tiny.id = "stub_series";
    const std::vector<const TimeSeries*> ptrs{&ok, &tiny};
    BowConfig cfg;
    cfg.window_len = 16;
    CHECK_THROWS_WITH(collect_features(ptrs, cfg),
                      Catch::Matchers::ContainsSubstring("stub_series"));
}

TEST_CASE("build_histogram conserves the segment count") {
    const Codebook cb = tiny_codebook();
    std::mt19937_64 rng = make_rng(51);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TimeSeries x;
    x.values.resize(333);
    for (double& v : x.values) v = gauss(rng);

    const BowHistogram h = build_histogram(cb, x);
    const std::size_t expected = (333 - 16) / 2 + 1;
    CHECK(h.total == expected);
    std::uint64_t sum = 0;
    for (auto c : h.counts) sum += c;
    CHECK(sum == expected);

    TimeSeries tiny;
    tiny.values.resize(8);
    CHECK_THROWS_WITH(build_histogram(cb, tiny),
                      Catch::Matchers::ContainsSubstring("16"));
}

TEST_CASE("identical tiled windows land in a single bin") {
    Codebook cb = tiny_codebook();
    cb.config.stride = cb.config.window_len; // non-overlapping tiling
    std::mt19937_64 rng = make_rng(52);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> window(cb.config.window_len);
    for (double& v : window) v = gauss(rng);

    TimeSeries x;
    for (int rep = 0; rep < 10; ++rep)
        x.values.insert(x.values.end(), window.begin(), window.end());
    const BowHistogram h = build_histogram(cb, x);
    std::size_t nonzero = 0;
    for (auto c : h.counts) nonzero += c > 0;
    CHECK(nonzero == 1);
    CHECK(h.total == 10);
}

TEST_CASE("histograms ignore segment order") {
    Codebook cb = tiny_codebook();
    cb.config.stride = cb.config.window_len;
    std::mt19937_64 rng = make_rng(53);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> windows(5, std::vector<double>(cb.config.window_len));
    for (auto& w : windows)
        for (double& v : w) v = gauss(rng);

    TimeSeries fwd, rev;
    for (const auto& w : windows) fwd.values.insert(fwd.values.end(), w.begin(), w.end());
    for (auto it = windows.rbegin(); it != windows.rend(); ++it)
        rev.values.insert(rev.values.end(), it->begin(), it->end());
    CHECK(build_histogram(cb, fwd).counts == build_histogram(cb, rev).counts);
}

TEST_CASE("fixed seed and config give identical histograms end-to-end") {
    std::mt19937_64 rng = make_rng(54);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<TimeSeries> corpus(4);
    for (auto& ts : corpus) {
        ts.values.resize(200);
        for (double& v : ts.values) v = gauss(rng);
    }
    std::vector<const TimeSeries*> ptrs;
    for (auto& ts : corpus) ptrs.push_back(&ts);

    BowConfig cfg;
    cfg.window_len = 16;
    cfg.stride = 3;
    cfg.codebook_size = 5;
    cfg.wavelet = "db3";
    cfg.max_iter = 40;
    cfg.seed = 123;

    const Codebook cb1 = train_codebook(collect_features(ptrs, cfg), cfg);
    const Codebook cb2 = train_codebook(collect_features(ptrs, cfg), cfg);
    CHECK(cb1.centroids == cb2.centroids);
    for (const auto& ts : corpus)
        CHECK(build_histogram(cb1, ts).counts == build_histogram(cb2, ts).counts);
}

TEST_CASE("BowConfig validation") {
    BowConfig cfg; // defaults are the standard parameters
    CHECK(cfg.window_len == 128);
    CHECK(cfg.codebook_size == 1000);
    CHECK_NOTHROW(validate(cfg));
    CHECK(feature_dim(cfg) == 66);

    BowConfig bad = cfg;
    bad.window_len = 4; // below db3 filter length
    CHECK_THROWS_AS(validate(bad), InvalidInput);
    bad = cfg;
    bad.codebook_size = 1;
    CHECK_THROWS_AS(validate(bad), InvalidInput);
    bad = cfg;
    bad.stride = 0;
    CHECK_THROWS_AS(validate(bad), InvalidInput);
}
