#include "ckelab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ckelab {

namespace {

// int dtau / sqrt(2 theta) with theta linear between the two endpoints;
// exact for the piecewise-linear profile.
double segment_arc(double tau_a, double tau_b, double th_a, double th_b) {
    const double dt = tau_b - tau_a;
    if (dt <= 0.0) return 0.0;
    const double slope = (th_b - th_a) / dt;
    if (std::abs(slope) < 1e-14 * std::max(th_a, th_b))
        return dt / std::sqrt(2.0 * 0.5 * (th_a + th_b));
    return (std::sqrt(2.0 * th_b) - std::sqrt(2.0 * th_a)) / slope;
}

// cap arc int_a^c dtau / sqrt(2 p tau (1 - tau/T)): the constant-curvature
// model theta = p tau (1 - tau/T), exact for round and football caps.
double cap_arc(double a, double c, double p, double T) {
    a = std::clamp(a, 0.0, T);
    c = std::clamp(c, 0.0, T);
    if (!(c > a)) return 0.0;
    return std::sqrt(2.0 * T / p) * (std::asin(std::sqrt(c / T)) - std::asin(std::sqrt(a / T)));
}

} // namespace

std::vector<double> moment_coordinates(const RadialGrid& g, const MetricProfile& m) {
    for (double v : m.m)
        if (!(v > 0.0))
            throw std::domain_error("moment_coordinates: metric must be positive");
    if (!m.v_prime.empty()) return m.v_prime;
    // cap-corrected cumulative: the first moment value comes from the linear
    // cap model theta ~ p tau (so tau_0 = theta_0 / p), trapezoid after that
    std::vector<double> tau(g.n);
    tau[0] = m.m[0] / std::max(m.fit0.exponent, 1e-3);
    for (int i = 1; i < g.n; ++i)
        tau[i] = tau[i - 1] + 0.5 * (g.w[i - 1] * m.m[i - 1] + g.w[i] * m.m[i]);
    return tau;
}

ThetaProfile::ThetaProfile(const RadialGrid& g, const MetricProfile& m) {
    const int n = g.n;
    const std::vector<double> tau = moment_coordinates(g, m);
    tau_.reserve(n);
    th_.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (!tau_.empty() && tau[i] <= tau_.back()) continue;
        tau_.push_back(tau[i]);
        th_.push_back(m.m[i]);
    }
    // caps use the constant-curvature model theta = p tau (1 - tau/T), which
    // is exact for round and football ends; moment-backed metrics are in the
    // unit class (total 2), raw samples close the range with the cap model
    if (!m.v_prime.empty()) {
        total_ = 2.0;
    } else {
        const double p_lin = std::max(m.fit1.exponent, 1e-3);
        total_ = tau_.back() + th_.back() / p_lin;
    }
    p0_ = th_.front() / (tau_.front() * (1.0 - tau_.front() / total_));
    p1_ = th_.back() / ((total_ - tau_.back()) * (tau_.back() / total_));
    if (!(p0_ > 0.0) || !(p1_ > 0.0) || !(total_ > 0.0) || tau_.back() >= total_)
        throw std::domain_error("ThetaProfile: non-integrable pole cap");
}

double ThetaProfile::theta(double tau) const {
    if (tau <= tau_.front()) {
        tau = std::clamp(tau, 0.0, total_);
        return p0_ * tau * (1.0 - tau / total_);
    }
    if (tau >= tau_.back()) {
        tau = std::clamp(tau, 0.0, total_);
        return p1_ * (total_ - tau) * (tau / total_);
    }
    const auto it = std::upper_bound(tau_.begin(), tau_.end(), tau);
    const std::size_t k = static_cast<std::size_t>(it - tau_.begin());
    const double t0 = tau_[k - 1], t1 = tau_[k];
    const double u = (tau - t0) / (t1 - t0);
    return th_[k - 1] * (1.0 - u) + th_[k] * u;
}

double ThetaProfile::arc_length(double tau_a, double tau_b) const {
    if (!(tau_b > tau_a)) return 0.0;
    tau_a = std::max(tau_a, 0.0);
    tau_b = std::min(tau_b, total_);
    double acc = 0.0;
    // left cap piece
    const double tf = tau_.front();
    if (tau_a < tf) {
        const double hi = std::min(tau_b, tf);
        acc += cap_arc(tau_a, hi, p0_, total_);
        tau_a = hi;
        if (tau_a >= tau_b) return acc;
    }
    const double tl = tau_.back();
    double right_piece = 0.0;
    double tb = tau_b;
    if (tb > tl) {
        const double lo = std::max(tau_a, tl);
        // mirrored cap in sigma = total - tau
        right_piece = cap_arc(total_ - tb, total_ - lo, p1_, total_);
        tb = lo;
        if (tb <= tau_a) return acc + right_piece;
    }
    // sampled middle: each segment integrates the constant-curvature model
    // theta = p tau (1 - tau/T) with p matched geometrically at the ends;
    // exact for round and football profiles, asymptotically consistent
    // otherwise
    auto model_p = [&](double tau, double th) {
        const double denom = tau * (1.0 - tau / total_);
        return denom > 0.0 ? th / denom : 1.0;
    };
    auto seg = [&](double ta, double tbb, double tha, double thb) {
        const double pa = model_p(ta, tha);
        const double pb = model_p(tbb, thb);
        if (pa > 0.0 && pb > 0.0) return cap_arc(ta, tbb, std::sqrt(pa * pb), total_);
        return segment_arc(ta, tbb, tha, thb);
    };
    auto it = std::upper_bound(tau_.begin(), tau_.end(), tau_a);
    std::size_t k = static_cast<std::size_t>(it - tau_.begin());
    double t_prev = tau_a;
    double th_prev = theta(tau_a);
    while (k < tau_.size() && tau_[k] < tb) {
        acc += seg(t_prev, tau_[k], th_prev, th_[k]);
        t_prev = tau_[k];
        th_prev = th_[k];
        ++k;
    }
    acc += seg(t_prev, tb, th_prev, theta(tb));
    return acc + right_piece;
}

double meridian_length(const RadialGrid& g, const MetricProfile& m) {
    if (m.fit0.exponent <= 0.0 || m.fit1.exponent <= 0.0)
        throw std::domain_error("meridian_length: non-integrable endpoint");
    ThetaProfile theta(g, m);
    return theta.arc_length(0.0, theta.tau_total());
}

GeodesicGraph::GeodesicGraph(const ThetaProfile& theta, const GeodesicGraphConfig& cfg)
    : cfg_(cfg) {
    const int R = cfg.rings;
    const int A = cfg.sectors;
    const int k = cfg.stencil;
    const double dtau = 2.0 / R;
    const double dalpha = 2.0 * M_PI / A;
    const int V = vertex_count();

    // degree count first, then fill CSR
    std::vector<int> degree(V, 0);
    auto in_range = [R](int j) { return j >= 0 && j < R; };
    for (int j = 0; j < R; ++j) {
        int d = 0;
        for (int dj = -k; dj <= k; ++dj) {
            if (!in_range(j + dj)) continue;
            for (int dl = -k; dl <= k; ++dl) {
                if (dj == 0 && dl == 0) continue;
                ++d;
            }
        }
        for (int l = 0; l < A; ++l) degree[vertex(j, l)] = d;
    }
    for (int l = 0; l < A; ++l) {
        degree[vertex(0, l)] += 1;
        degree[vertex(R - 1, l)] += 1;
    }
    degree[pole(0)] = A;
    degree[pole(1)] = A;

    offsets_.assign(V + 1, 0);
    for (int v = 0; v < V; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
    targets_.resize(offsets_.back());
    weights_.resize(offsets_.back());
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);

    // theta cached on quarter-ring steps; edge integrands interpolate the table
    const int T = 4 * R;
    std::vector<double> theta_table(T + 1);
    for (int q = 0; q <= T; ++q) theta_table[q] = theta.theta(q * 2.0 / T);
    auto theta_fast = [&](double tau) {
        const double u = std::clamp(tau, 0.0, 2.0) * (T / 2.0);
        const int q = std::min(static_cast<int>(u), T - 1);
        const double r = u - q;
        return theta_table[q] * (1.0 - r) + theta_table[q + 1] * r;
    };

    // segment weight by composite Simpson along the straight (tau, alpha) line
    auto edge_weight = [&](int j, int dj, int dl) {
        const double t0 = (j + 0.5) * dtau;
        const double dt = dj * dtau;
        const double da = dl * dalpha;
        const int panels = std::max(std::abs(dj), 1);
        double acc = 0.0;
        auto f = [&](double u) {
            const double th = theta_fast(t0 + u * dt);
            return std::sqrt(dt * dt / (2.0 * th) + 2.0 * th * da * da);
        };
        const double hu = 1.0 / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = p * hu;
            acc += hu / 6.0 * (f(a) + 4.0 * f(a + 0.5 * hu) + f(a + hu));
        }
        return acc;
    };

    for (int j = 0; j < R; ++j) {
        for (int dj = -k; dj <= k; ++dj) {
            if (!in_range(j + dj)) continue;
            for (int dl = -k; dl <= k; ++dl) {
                if (dj == 0 && dl == 0) continue;
                const double w = edge_weight(j, dj, dl);
                for (int l = 0; l < A; ++l) {
                    const int u = vertex(j, l);
                    const int v = vertex(j + dj, ((l + dl) % A + A) % A);
                    targets_[cursor[u]] = v;
                    weights_[cursor[u]] = w;
                    ++cursor[u];
                }
            }
        }
    }
    const double w_pole0 = theta.arc_length(0.0, 0.5 * dtau);
    const double w_pole1 = theta.arc_length(2.0 - 0.5 * dtau, 2.0);
    for (int l = 0; l < A; ++l) {
        const int v0 = vertex(0, l);
        targets_[cursor[v0]] = pole(0);
        weights_[cursor[v0]] = w_pole0;
        ++cursor[v0];
        targets_[cursor[pole(0)]] = v0;
        weights_[cursor[pole(0)]] = w_pole0;
        ++cursor[pole(0)];
        const int v1 = vertex(R - 1, l);
        targets_[cursor[v1]] = pole(1);
        weights_[cursor[v1]] = w_pole1;
        ++cursor[v1];
        targets_[cursor[pole(1)]] = v1;
        weights_[cursor[pole(1)]] = w_pole1;
        ++cursor[pole(1)];
    }
}

double GeodesicGraph::ring_tau(int ring) const { return (ring + 0.5) * 2.0 / cfg_.rings; }

std::vector<double> GeodesicGraph::dijkstra(int source) const {
    const int V = vertex_count();
    std::vector<double> dist(V, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (int e = offsets_[u]; e < offsets_[u + 1]; ++e) {
            const int v = targets_[e];
            const double nd = d + weights_[e];
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

DistanceField distance_field(const GeodesicGraph& graph) {
    const GeodesicGraphConfig& cfg = graph.config();
    DistanceField f;
    f.sample_rings = cfg.sample_rings;
    f.sectors = cfg.sectors;
    f.ring_ids.resize(cfg.sample_rings);
    for (int j = 0; j < cfg.sample_rings; ++j)
        f.ring_ids[j] = static_cast<int>((j + 0.5) * cfg.rings / cfg.sample_rings);
    f.from_pole0 = graph.dijkstra(graph.pole(0));
    f.from_pole1 = graph.dijkstra(graph.pole(1));
    f.from_ring.reserve(cfg.sample_rings);
    for (int j = 0; j < cfg.sample_rings; ++j)
        f.from_ring.push_back(graph.dijkstra(graph.vertex(f.ring_ids[j], 0)));

    // graph-diameter estimate over the sampled sources
    auto scan = [&](const std::vector<double>& d, int src) {
        for (int v = 0; v < static_cast<int>(d.size()); ++v) {
            if (d[v] > f.max_distance && std::isfinite(d[v])) {
                f.max_distance = d[v];
                const double via0 = f.from_pole0[src] + f.from_pole0[v];
                const double via1 = f.from_pole1[src] + f.from_pole1[v];
                f.diameter_via_pole = (std::min(via0, via1) <= d[v] + 1e-9);
            }
        }
    };
    scan(f.from_pole0, graph.pole(0));
    scan(f.from_pole1, graph.pole(1));
    for (int j = 0; j < cfg.sample_rings; ++j)
        scan(f.from_ring[j], graph.vertex(f.ring_ids[j], 0));
    return f;
}

double DistanceField::distance(int i, int j, const GeodesicGraph& graph) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    const int step = sectors / sample_rings;
    auto decode = [&](int id, int& ring, int& sector) {
        const int a = (id - 2) / sample_rings;
        const int b = (id - 2) % sample_rings;
        ring = ring_ids[a];
        sector = b * step;
    };
    if (i == 0 && j == 1) return from_pole0[graph.pole(1)];
    if (i <= 1) {
        int r, sct;
        decode(j, r, sct);
        const std::vector<double>& d = (i == 0) ? from_pole0 : from_pole1;
        return d[graph.vertex(r, 0)];  // rotational invariance
    }
    int ri, si, rj, sj;
    decode(i, ri, si);
    decode(j, rj, sj);
    const int a = (i - 2) / sample_rings;
    const int rel = ((sj - si) % sectors + sectors) % sectors;
    return from_ring[a][graph.vertex(rj, rel)];
}

DiameterEstimate diameter(const RadialGrid& g, const MetricProfile& m,
                          const GeodesicGraphConfig& cfg, bool fast_lower) {
    ThetaProfile theta(g, m);
    DiameterEstimate est;
    {
        GeodesicGraph graph(theta, cfg);
        DistanceField f = distance_field(graph);
        est.upper = f.max_distance;
        est.via_pole = f.diameter_via_pole;
    }
    {
        GeodesicGraphConfig fine = cfg;
        fine.stencil = cfg.stencil + 2;
        if (fast_lower) fine.sample_rings = 4;
        GeodesicGraph graph(theta, fine);
        DistanceField f = distance_field(graph);
        est.lower = f.max_distance;
    }
    if (est.lower > est.upper) std::swap(est.lower, est.upper);
    return est;
}

SampledMetric sample_metric(const RadialGrid& g, const MetricProfile& m,
                            const GeodesicGraphConfig& cfg) {
    ThetaProfile theta(g, m);
    SampledMetric out;
    out.graph = std::make_shared<GeodesicGraph>(theta, cfg);
    out.field = distance_field(*out.graph);
    return out;
}

double distortion_between(const SampledMetric& a, const SampledMetric& b) {
    double worst = 0.0;
    const int n = a.field.sample_count();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d =
                std::abs(a.field.distance(i, j, *a.graph) - b.field.distance(i, j, *b.graph));
            worst = std::max(worst, d);
        }
    return worst;
}

double diameter_lower_bound(const RadialGrid& g, const MetricProfile& m,
                            GeodesicGraphConfig cfg, int k_plus) {
    cfg.stencil += k_plus;
    ThetaProfile theta(g, m);
    GeodesicGraph graph(theta, cfg);
    const std::vector<double> d0 = graph.dijkstra(graph.pole(0));
    const std::vector<double> d1 = graph.dijkstra(graph.pole(1));
    double worst = 0.0;
    for (double v : d0) worst = std::max(worst, v);
    for (double v : d1) worst = std::max(worst, v);
    return worst;
}

GHReport gh_distortion(const RadialGrid& g, const MetricProfile& ma, const MetricProfile& mb,
                       const GeodesicGraphConfig& cfg) {
    GHReport rep;
    rep.distortion = distortion_between(sample_metric(g, ma, cfg), sample_metric(g, mb, cfg));
    for (double delta : {0.2, 0.1, 0.05, 0.025})
        rep.tube_profile.push_back(tube_size(g, delta, ma));
    return rep;
}

double tube_size(const RadialGrid& g, double delta, const MetricProfile& m) {
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("tube_size: delta must lie in (0, 1/2)");
    const double x_delta = std::sin(0.5 * delta) * std::sin(0.5 * delta);
    const std::vector<double> tau = moment_coordinates(g, m);
    ThetaProfile theta(g, m);
    // moment coordinate of the tube boundary, interpolated in log x below the
    // first node through the cap growth rate
    auto tau_at = [&](double xq, int side) {
        if (side == 0) {
            if (xq <= g.x[0])
                return tau[0] * std::pow(xq / g.x[0], std::max(m.fit0.exponent, 1e-3));
            const auto it = std::upper_bound(g.x.begin(), g.x.end(), xq);
            const std::size_t k = static_cast<std::size_t>(it - g.x.begin());
            const double u = (xq - g.x[k - 1]) / (g.x[k] - g.x[k - 1]);
            return tau[k - 1] * (1.0 - u) + tau[k] * u;
        }
        const double T = theta.tau_total();
        if (xq >= g.x[g.n - 1])
            return T - (T - tau[g.n - 1]) *
                           std::pow((1.0 - xq) / (1.0 - g.x[g.n - 1]),
                                    std::max(m.fit1.exponent, 1e-3));
        const auto it = std::upper_bound(g.x.begin(), g.x.end(), xq);
        const std::size_t k = static_cast<std::size_t>(it - g.x.begin());
        const double u = (xq - g.x[k - 1]) / (g.x[k] - g.x[k - 1]);
        return tau[k - 1] * (1.0 - u) + tau[k] * u;
    };
    const double tau0 = tau_at(x_delta, 0);
    const double tau1 = tau_at(1.0 - x_delta, 1);
    return std::max(theta.arc_length(0.0, tau0),
                    theta.arc_length(tau1, theta.tau_total()));
}

} // namespace ckelab
