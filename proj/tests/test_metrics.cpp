#include <catch2/catch_amalgamated.hpp>

#include "tsbow/metrics.hpp"
#include "tsbow/rng.hpp"

using namespace tsbow;

namespace {

std::vector<double> random_histogram(std::size_t bins, std::mt19937_64& rng) {
    // sparse, like real codeword histograms
    std::vector<double> h(bins, 0.0);
    double total = 0.0;
    for (double& v : h) {
        if (uniform_unit(rng) < 0.4) v = static_cast<double>(bounded_uint(rng, 20) + 1);
        total += v;
    }
    if (total == 0.0) h[bounded_uint(rng, bins)] = 1.0;
    return h;
}

} // namespace

TEST_CASE("euclidean distance hand values") {
    CHECK(d_euclidean(std::vector<double>{1, 0}, std::vector<double>{1, 0}) == 0.0);
    CHECK(d_euclidean(std::vector<double>{1, 0}, std::vector<double>{0, 1}) ==
          Catch::Approx(std::sqrt(2.0)));
    CHECK(d_euclidean(std::vector<double>{3, 4}, std::vector<double>{0, 0}) ==
          Catch::Approx(5.0));
}

TEST_CASE("chi-squared distance hand values") {
    CHECK(d_chi2(std::vector<double>{2, 1}, std::vector<double>{2, 1}) == 0.0);
    CHECK(d_chi2(std::vector<double>{1, 0}, std::vector<double>{0, 1}) ==
          Catch::Approx(2.0).margin(1e-6));
    CHECK(d_chi2(std::vector<double>{2, 0}, std::vector<double>{0, 2}) ==
          Catch::Approx(4.0).margin(1e-6));
}

TEST_CASE("jensen-shannon distance hand value in bits") {
    const std::vector<double> h{0.5, 0.5}, k{0.25, 0.75};
    CHECK(d_js(h, h) == Catch::Approx(0.0).margin(1e-12));
    // 0.5*(D_KL(h||k) + D_KL(k||h)) with base-2 logs
    CHECK(d_js(h, k) == Catch::Approx(0.1981203125901445).margin(1e-6));
}

TEST_CASE("histogram intersection hand values") {
    const std::vector<double> h{0.5, 0.5}, k{0.25, 0.75};
    CHECK(d_hist_intersect(h, h) == Catch::Approx(0.0).margin(1e-12));
    CHECK(d_hist_intersect(h, k) == Catch::Approx(0.25).margin(1e-12));
    CHECK(d_hist_intersect(std::vector<double>{1, 0}, std::vector<double>{0, 3}) ==
          Catch::Approx(1.0).margin(1e-12)); // disjoint supports
}

TEST_CASE("distance axioms over random histogram pairs") {
    std::mt19937_64 rng = make_rng(31);
    const auto kinds = {DistanceKind::euclidean, DistanceKind::chi_squared,
                        DistanceKind::jensen_shannon,
                        DistanceKind::histogram_intersection};
    for (int trial = 0; trial < 1000; ++trial) {
        const auto h = random_histogram(24, rng);
        const auto k = random_histogram(24, rng);
        for (DistanceKind kind : kinds) {
            const double hk = histogram_distance(kind, h, k);
            const double kh = histogram_distance(kind, k, h);
            CHECK(hk >= 0.0);
            CHECK(hk == Catch::Approx(kh).margin(1e-12)); // symmetry
            CHECK(histogram_distance(kind, h, h) == Catch::Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("euclidean satisfies the triangle inequality") {
    std::mt19937_64 rng = make_rng(32);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_histogram(16, rng);
        const auto b = random_histogram(16, rng);
        const auto c = random_histogram(16, rng);
        CHECK(d_euclidean(a, c) <= d_euclidean(a, b) + d_euclidean(b, c) + 1e-12);
    }
}

TEST_CASE("chi2 and intersection ignore matched zero bins") {
    std::mt19937_64 rng = make_rng(33);
    auto h = random_histogram(12, rng);
    auto k = random_histogram(12, rng);
    const double chi_before = d_chi2(h, k);
    const double int_before = d_hist_intersect(h, k);
    h.insert(h.end(), 5, 0.0);
    k.insert(k.end(), 5, 0.0);
    CHECK(d_chi2(h, k) == Catch::Approx(chi_before).margin(1e-12));
    CHECK(d_hist_intersect(h, k) == Catch::Approx(int_before).margin(1e-9));
}

TEST_CASE("js shrinks as one histogram mixes toward the other") {
    std::mt19937_64 rng = make_rng(34);
    const auto h = random_histogram(16, rng);
    const auto k = random_histogram(16, rng);
    double prev = d_js(h, k);
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
        std::vector<double> mixed(k.size());
        for (std::size_t i = 0; i < k.size(); ++i)
            mixed[i] = (1.0 - t) * k[i] + t * h[i];
        const double now = d_js(h, mixed);
        CHECK(now <= prev + 1e-9);
        prev = now;
    }
}

TEST_CASE("metric error contracts") {
    const std::vector<double> h{1, 2, 3}, short_k{1, 2};
    CHECK_THROWS_AS(d_euclidean(h, short_k), InvalidInput);
    CHECK_THROWS_AS(d_chi2(std::vector<double>{-1, 0}, std::vector<double>{0, 1}),
                    InvalidInput);
    CHECK_THROWS_AS(d_js(std::vector<double>{0, 0}, std::vector<double>{1, 0}),
                    InvalidInput);
    CHECK_THROWS_AS(
        d_hist_intersect(std::vector<double>{0, 0}, std::vector<double>{1, 0}),
        InvalidInput);
}

TEST_CASE("distance names round-trip") {
    for (DistanceKind kind : {DistanceKind::euclidean, DistanceKind::chi_squared,
                              DistanceKind::jensen_shannon,
                              DistanceKind::histogram_intersection})
        CHECK(distance_from_name(to_string(kind)) == kind);
    CHECK_THROWS_AS(distance_from_name("cosine"), InvalidInput);
}
