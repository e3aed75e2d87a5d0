#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckelab/geodesics.hpp"

#include <cmath>
#include <random>

using namespace ckelab;

namespace {
const RadialGrid& grid() {
    static const RadialGrid g = RadialGrid::make(2048);
    return g;
}
const BackgroundGeometry& bgref() {
    static const BackgroundGeometry b = BackgroundGeometry::make(grid());
    return b;
}
MetricProfile football_metric(double beta) {
    const FootballOracle oc = football_potential(beta, grid());
    return metric_of(grid(), oc.normalized_profile(grid(), bgref()));
}
} // namespace

TEST_CASE("meridian lengths: round, football, scaling") {
    const MetricProfile round = football_metric(1.0);
    CHECK(meridian_length(grid(), round) == doctest::Approx(M_PI).epsilon(1e-5));

    const MetricProfile quarter = football_metric(0.25);
    CHECK(meridian_length(grid(), quarter) == doctest::Approx(2.0 * M_PI).epsilon(1e-5));

    // homogeneity: scaling the metric by k scales lengths by sqrt(k)
    // (compare through the raw-sample route on both sides)
    const MetricProfile raw = make_metric(grid(), round.m);
    std::vector<double> scaled = round.m;
    for (double& v : scaled) v *= 3.0;
    const MetricProfile ms = make_metric(grid(), std::move(scaled));
    CHECK(meridian_length(grid(), ms) ==
          doctest::Approx(std::sqrt(3.0) * meridian_length(grid(), raw)).epsilon(1e-9));
}

TEST_CASE("diameters: round pi, football pi sqrt 2, brackets ordered") {
    GeodesicGraphConfig cfg;
    cfg.rings = 128;
    cfg.sectors = 128;
    cfg.stencil = 3;
    cfg.sample_rings = 8;

    const DiameterEstimate dr = diameter(grid(), football_metric(1.0), cfg);
    CHECK(dr.upper == doctest::Approx(M_PI).epsilon(1.5e-2));
    CHECK(dr.lower <= dr.upper + 1e-12);
    CHECK(dr.lower == doctest::Approx(M_PI).epsilon(1.5e-2));

    const DiameterEstimate df = diameter(grid(), football_metric(0.5), cfg);
    CHECK(df.upper == doctest::Approx(M_PI * std::sqrt(2.0)).epsilon(1.5e-2));
    CHECK(df.via_pole);  // the meridian realizes the diameter when beta <= 1
}

TEST_CASE("stencil refinement decreases the diameter estimate") {
    GeodesicGraphConfig cfg;
    cfg.rings = 96;
    cfg.sectors = 96;
    cfg.sample_rings = 8;
    const MetricProfile m = football_metric(1.0);
    ThetaProfile theta(grid(), m);
    double prev = 1e300;
    for (int k : {1, 2, 3}) {
        GeodesicGraphConfig c = cfg;
        c.stencil = k;
        GeodesicGraph graph(theta, c);
        const DistanceField f = distance_field(graph);
        CHECK(f.max_distance <= prev + 1e-12);
        prev = f.max_distance;
    }
}

TEST_CASE("distance field: triangle inequality, symmetry, rotation invariance") {
    GeodesicGraphConfig cfg;
    cfg.rings = 96;
    cfg.sectors = 96;
    cfg.stencil = 2;
    cfg.sample_rings = 8;
    const MetricProfile m = football_metric(0.5);
    const SampledMetric sm = sample_metric(grid(), m, cfg);
    const int n = sm.field.sample_count();

    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int trial = 0; trial < 10000; ++trial) {
        const int a = pick(rng), b = pick(rng), c = pick(rng);
        const double dab = sm.field.distance(a, b, *sm.graph);
        const double dbc = sm.field.distance(b, c, *sm.graph);
        const double dac = sm.field.distance(a, c, *sm.graph);
        CHECK(dac <= dab + dbc + 1e-9);
        CHECK(sm.field.distance(b, a, *sm.graph) == doctest::Approx(dab).epsilon(1e-9));
        if (a == b) CHECK(dab == 0.0);
    }
    // rotational invariance: distances depend only on the sector offset
    for (int j = 2; j < n; j += 17) {
        for (int i = 2; i < j; i += 13) {
            // same rings, shifted sectors: compare (i,j) against shifted pair
            const int a = (i - 2) / sm.field.sample_rings;
            const int bu = (i - 2) % sm.field.sample_rings;
            const int c = (j - 2) / sm.field.sample_rings;
            const int d = (j - 2) % sm.field.sample_rings;
            const int shift = 3 % sm.field.sample_rings;
            const int i2 = 2 + a * sm.field.sample_rings + (bu + shift) % sm.field.sample_rings;
            const int j2 = 2 + c * sm.field.sample_rings + (d + shift) % sm.field.sample_rings;
            CHECK(sm.field.distance(i, j, *sm.graph) ==
                  doctest::Approx(sm.field.distance(i2, j2, *sm.graph)).epsilon(1e-9));
        }
    }
}

TEST_CASE("gh distortion: reflexive, lower-bounded by diameter gap, triangle") {
    GeodesicGraphConfig cfg;
    cfg.rings = 96;
    cfg.sectors = 96;
    cfg.stencil = 2;
    cfg.sample_rings = 8;
    const MetricProfile round = football_metric(1.0);
    const MetricProfile half = football_metric(0.5);
    const MetricProfile threequarter = football_metric(0.75);

    const SampledMetric sr = sample_metric(grid(), round, cfg);
    const SampledMetric sh = sample_metric(grid(), half, cfg);
    const SampledMetric st = sample_metric(grid(), threequarter, cfg);

    CHECK(distortion_between(sr, sr) == 0.0);
    const double d_rh = distortion_between(sr, sh);
    // diameter pairs realize at least |pi sqrt2 - pi|
    CHECK(d_rh >= M_PI * (std::sqrt(2.0) - 1.0) - 0.05);
    const double d_rt = distortion_between(sr, st);
    const double d_th = distortion_between(st, sh);
    CHECK(d_rh <= d_rt + d_th + 1e-9);
}

TEST_CASE("tube sizes: round caps, conical decay rate, monotone shrinking") {
    const MetricProfile round = football_metric(1.0);
    // eta(delta) is the background cap radius for the round metric
    CHECK(tube_size(grid(), 0.1, round) == doctest::Approx(0.1).epsilon(1e-4));

    const MetricProfile half = football_metric(0.5);
    std::vector<double> eta;
    std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025, 0.0125};
    for (double d : deltas) eta.push_back(tube_size(grid(), d, half));
    for (std::size_t k = 1; k < eta.size(); ++k) CHECK(eta[k] < eta[k - 1]);
    // fitted decay exponent across the halvings is near beta = 1/2
    const double slope = std::log(eta.front() / eta.back()) /
                         std::log(deltas.front() / deltas.back());
    CHECK(slope > 0.4);
    CHECK(slope < 0.6);
    CHECK_THROWS_AS(tube_size(grid(), 0.7, half), std::invalid_argument);
}

TEST_CASE("theta profile rejects non-positive metrics") {
    std::vector<double> bad(grid().n, 1.0);
    bad[5] = -0.1;
    CHECK_THROWS_AS(ThetaProfile(grid(), make_metric(grid(), std::move(bad))),
                    std::domain_error);
}
