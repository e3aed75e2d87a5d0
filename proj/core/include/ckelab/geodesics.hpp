#pragma once

#include "ckelab/grid.hpp"
#include "ckelab/profiles.hpp"

#include <cstdint>
#include <vector>

namespace ckelab {

/// Rotational metric in moment coordinates:  ds^2 = dtau^2/(2 theta) + 2 theta dalpha^2
/// with theta(tau) = v''(s(tau)).  Sampled monotonically from a profile; the
/// linear cap model theta ~ p tau covers the poles below the first sample.
class ThetaProfile {
  public:
    ThetaProfile() = default;
    ThetaProfile(const RadialGrid& g, const MetricProfile& m);

    double theta(double tau) const;           // monotone interpolation + caps
    double pole_exponent(int side) const { return side == 0 ? p0_ : p1_; }
    double tau_total() const { return total_; }

    /// Meridian arc length between moment values (exact for the piecewise
    /// linear profile, caps included); [0, tau_total] gives pole-to-pole.
    double arc_length(double tau_a, double tau_b) const;

  private:
    std::vector<double> tau_, th_;
    double p0_ = 1.0, p1_ = 1.0;  // local growth of theta at the ends
    double total_ = 2.0;          // v'(+inf) - v'(-inf); 2 in the unit class
};

/// Pole-to-pole meridian length  int_0^2 dtau / sqrt(2 theta); the endpoint
/// tau^{-1/2}-type singularity is integrated by the fitted power tails.
/// Throws on non-integrable ends (fitted exponent <= 0).
double meridian_length(const RadialGrid& g, const MetricProfile& m);

struct GeodesicGraphConfig {
    int rings = 256;
    int sectors = 256;
    int stencil = 3;        // edges to lattice points within Chebyshev distance k
    int sample_rings = 16;  // GH/diameter source rings (plus the two poles)
};

/// k-stencil lattice graph on the (tau, alpha) grid with the poles as
/// distinguished vertices carrying exact meridian edges to the first ring.
class GeodesicGraph {
  public:
    GeodesicGraph(const ThetaProfile& theta, const GeodesicGraphConfig& cfg);

    int vertex(int ring, int sector) const { return ring * cfg_.sectors + sector; }
    int pole(int side) const { return cfg_.rings * cfg_.sectors + side; }
    int vertex_count() const { return cfg_.rings * cfg_.sectors + 2; }

    std::vector<double> dijkstra(int source) const;
    const GeodesicGraphConfig& config() const { return cfg_; }
    double ring_tau(int ring) const;

  private:
    GeodesicGraphConfig cfg_;
    std::vector<int> offsets_;      // CSR adjacency
    std::vector<int> targets_;
    std::vector<double> weights_;
};

/// Pairwise geodesic distances on the sample set (poles + sample_rings x
/// sample_rings sublattice), obtained from one shortest-path pass per source
/// column and rotational invariance.
struct DistanceField {
    int sample_rings = 0;
    int sectors = 0;
    std::vector<int> ring_ids;                     // sampled ring indices
    std::vector<std::vector<double>> from_ring;    // per source ring: distance to all vertices
    std::vector<double> from_pole0, from_pole1;

    double distance(int i, int j, const GeodesicGraph& graph) const;  // sample-set indexing
    int sample_count() const { return sample_rings * sample_rings + 2; }

    /// max over sampled sources of the farthest vertex (graph diameter estimate)
    double max_distance = 0.0;
    bool diameter_via_pole = false;   // the realizing path passes a pole vertex
};

DistanceField distance_field(const GeodesicGraph& graph);

/// A metric realized as a distance field on its geodesic graph; build once,
/// compare many times.
struct SampledMetric {
    std::shared_ptr<GeodesicGraph> graph;
    DistanceField field;
};
SampledMetric sample_metric(const RadialGrid& g, const MetricProfile& m,
                            const GeodesicGraphConfig& cfg);

/// Identity-correspondence distortion between two sampled metrics (same
/// configuration required).
double distortion_between(const SampledMetric& a, const SampledMetric& b);

/// Pole-sourced diameter estimate on the (k + k_plus)-stencil graph; a lower
/// companion for the bracketed estimate.
double diameter_lower_bound(const RadialGrid& g, const MetricProfile& m,
                            GeodesicGraphConfig cfg, int k_plus = 2);

struct DiameterEstimate {
    double lower = 0.0;  // finer stencil (k+2)
    double upper = 0.0;  // requested stencil k
    bool via_pole = false;
};

/// Graph diameter bracket from stencils k and k+2.  `fast_lower` reduces the
/// source set of the finer stencil (poles plus four rings).
DiameterEstimate diameter(const RadialGrid& g, const MetricProfile& m,
                          const GeodesicGraphConfig& cfg, bool fast_lower = true);

struct GHReport {
    double distortion = 0.0;   // sup over sample pairs of |d_A - d_B|
    std::vector<double> tube_profile;  // optional eta(delta) samples
};

/// Identity-correspondence Gromov-Hausdorff distortion between two metrics on
/// the same sample set; an upper bound for twice the GH distance.
GHReport gh_distortion(const RadialGrid& g, const MetricProfile& ma, const MetricProfile& mb,
                       const GeodesicGraphConfig& cfg);

/// eta(delta): max m-distance to the nearest pole over the delta-tube around
/// the divisor measured in the background metric.
double tube_size(const RadialGrid& g, double delta, const MetricProfile& m);

} // namespace ckelab
