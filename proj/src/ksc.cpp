#include "lifecycle/ksc.hpp"
#include "lifecycle/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace lifecycle {

namespace {

double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
}

std::vector<double> shifted(std::span<const double> y, int q, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        long j = static_cast<long>(i) - q;
        if (j >= 0 && j < static_cast<long>(y.size()))
            out[i] = y[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace

int default_q_range(std::size_t length) {
    return std::max(1, static_cast<int>(length / 4));
}

KscMatch ksc_distance(std::span<const double> x, std::span<const double> y,
                      int q_range) {
    const double xx = norm2(x);
    if (xx <= 0.0) throw DegenerateInputError("ksc_distance: |x| = 0");
    KscMatch best;
    best.distance = std::numeric_limits<double>::infinity();
    // Visit q in order of increasing |q| so ties resolve to the smallest.
    for (int step = 0; step <= q_range; ++step) {
        for (int sign : {-1, 1}) {
            if (step == 0 && sign == 1) continue;
            int q = sign * step;
            auto yq = shifted(y, q, x.size());
            double yy = norm2(yq);
            double dot = 0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * yq[i];
            double alpha = yy > 0 ? dot / yy : 0.0;
            // residual computed directly; the 1 - dot^2/(xx*yy) form
            // cancels catastrophically near perfect matches
            double res = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double e = x[i] - alpha * yq[i];
                res += e * e;
            }
            double d = std::sqrt(res / xx);
            if (d < best.distance) {
                best.distance = d;
                best.alpha = alpha;
                best.shift = q;
            }
        }
    }
    return best;
}

std::vector<double> update_centroid(
    const std::vector<std::vector<double>>& members) {
    if (members.empty())
        throw std::invalid_argument("update_centroid: empty cluster");
    const std::size_t n = members[0].size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
    std::size_t used = 0;
    for (const auto& mem : members) {
        Eigen::Map<const Eigen::VectorXd> x(mem.data(), n);
        double xx = x.squaredNorm();
        if (xx <= 0.0) continue;
        m += Eigen::MatrixXd::Identity(n, n) - (x * x.transpose()) / xx;
        start += x / std::sqrt(xx);
        ++used;
    }
    if (used == 0)
        throw DegenerateInputError("update_centroid: all members zero");

    // Inverse power iteration toward the smallest eigenvalue; a tiny
    // ridge keeps the factorization valid when M is singular.
    double ridge = 1e-12 * (m.trace() + 1.0);
    Eigen::LDLT<Eigen::MatrixXd> solver(
        m + ridge * Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd v = start;
    if (v.norm() <= 0.0) v = Eigen::VectorXd::Ones(n);
    v.normalize();
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = solver.solve(v);
        w.normalize();
        double delta = std::min((w - v).norm(), (w + v).norm());
        v = w;
        if (delta < 1e-10) break;
    }
    if (v.sum() < 0) v = -v;
    v.normalize();
    return {v.data(), v.data() + n};
}

ShapeClusterModel ksc_cluster(const std::vector<std::vector<double>>& profiles,
                              int k, int q_range, int max_iter,
                              std::uint64_t seed) {
    const int n = static_cast<int>(profiles.size());
    if (k < 1 || k > n)
        throw std::invalid_argument("ksc_cluster: k must be in [1, #profiles]");

    std::size_t len = 0;
    for (const auto& p : profiles) len = std::max(len, p.size());
    std::vector<std::vector<double>> data(profiles.begin(), profiles.end());
    for (auto& p : data) p.resize(len, 0.0);

    auto as_unit = [&](int idx) {
        auto v = data[static_cast<std::size_t>(idx)];
        double nn = std::sqrt(norm2(v));
        if (nn > 0)
            for (auto& x : v) x /= nn;
        return v;
    };

    // Several restarts from different farthest-point seedings; the run
    // with the lowest objective wins.
    ShapeClusterModel best_model;
    best_model.objective = std::numeric_limits<double>::infinity();
    const int restarts = k > 1 ? 8 : 1;
    for (int restart = 0; restart < restarts; ++restart) {

        std::mt19937_64 rng(seed + 0x9E3779B9u * static_cast<std::uint64_t>(restart));
        std::vector<int> seeds;
        seeds.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
        std::vector<double> min_dist(static_cast<std::size_t>(n),
                                     std::numeric_limits<double>::infinity());
        while (static_cast<int>(seeds.size()) < k) {
            int last = seeds.back();
            auto c = as_unit(last);
            int far = -1;
            double far_d = -1;
            for (int i = 0; i < n; ++i) {
                if (norm2(data[static_cast<std::size_t>(i)]) <= 0.0) continue;
                double d =
                    ksc_distance(data[static_cast<std::size_t>(i)], c, q_range)
                        .distance;
                auto& md = min_dist[static_cast<std::size_t>(i)];
                md = std::min(md, d);
                bool taken =
                    std::find(seeds.begin(), seeds.end(), i) != seeds.end();
                if (!taken && md > far_d) {
                    far_d = md;
                    far = i;
                }
            }
            if (far < 0) far = static_cast<int>(seeds.size()) % n;
            seeds.push_back(far);
        }

        ShapeClusterModel model;
        model.k = k;
        for (int s : seeds) model.centroids.push_back(as_unit(s));
        model.assignments.assign(static_cast<std::size_t>(n), -1);
        model.alphas.assign(static_cast<std::size_t>(n), 0.0);
        model.shifts.assign(static_cast<std::size_t>(n), 0);

        for (int iter = 0; iter < max_iter; ++iter) {
            // Assignment.
            bool changed = false;
            double objective = 0.0;
            std::vector<KscMatch> matches(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const auto& x = data[static_cast<std::size_t>(i)];
                if (norm2(x) <= 0.0) {
                    if (model.assignments[static_cast<std::size_t>(i)] < 0) {
                        model.assignments[static_cast<std::size_t>(i)] = 0;
                        changed = true;
                    }
                    continue;
                }
                int best_c = 0;
                KscMatch best;
                best.distance = std::numeric_limits<double>::infinity();
                for (int c = 0; c < k; ++c) {
                    auto match = ksc_distance(x, model.centroids[static_cast<std::size_t>(c)], q_range);
                    if (match.distance < best.distance) {
                        best = match;
                        best_c = c;
                    }
                }
                if (model.assignments[static_cast<std::size_t>(i)] != best_c)
                    changed = true;
                model.assignments[static_cast<std::size_t>(i)] = best_c;
                matches[static_cast<std::size_t>(i)] = best;
                objective += best.distance * best.distance;
            }
            model.objective = objective;
            model.iterations = iter + 1;
            for (int i = 0; i < n; ++i) {
                model.alphas[static_cast<std::size_t>(i)] =
                    matches[static_cast<std::size_t>(i)].alpha;
                model.shifts[static_cast<std::size_t>(i)] =
                    matches[static_cast<std::size_t>(i)].shift;
            }
            if (!changed && iter > 0) break;

            // Reseed empty clusters from the worst-fit member.
            for (int c = 0; c < k; ++c) {
                bool empty = std::none_of(
                    model.assignments.begin(), model.assignments.end(),
                    [c](int a) { return a == c; });
                if (!empty) continue;
                int worst = 0;
                double worst_d = -1;
                for (int i = 0; i < n; ++i)
                    if (matches[static_cast<std::size_t>(i)].distance > worst_d) {
                        worst_d = matches[static_cast<std::size_t>(i)].distance;
                        worst = i;
                    }
                model.assignments[static_cast<std::size_t>(worst)] = c;
                model.centroids[static_cast<std::size_t>(c)] = as_unit(worst);
                matches[static_cast<std::size_t>(worst)] = KscMatch{0.0, 1.0, 0};
            }

            // Centroid update on members aligned by their best shift. The
            // match shifted the centroid by q to meet the member, so the
            // member moves by -q to meet the centroid.
            for (int c = 0; c < k; ++c) {
                std::vector<std::vector<double>> aligned;
                for (int i = 0; i < n; ++i) {
                    if (model.assignments[static_cast<std::size_t>(i)] != c)
                        continue;
                    const auto& x = data[static_cast<std::size_t>(i)];
                    if (norm2(x) <= 0.0) continue;
                    aligned.push_back(shifted(
                        x, -matches[static_cast<std::size_t>(i)].shift, len));
                }
                if (!aligned.empty())
                    model.centroids[static_cast<std::size_t>(c)] =
                        update_centroid(aligned);
            }
        }

        if (model.objective < best_model.objective)
            best_model = std::move(model);
    }
    return best_model;
}

PatternReport pattern_report(const std::vector<ProductLifecycle>& lifecycles,
                             int k_outer, int k_inner, int q_range,
                             std::uint64_t seed, int max_iter) {
    std::vector<std::vector<double>> sales;
    sales.reserve(lifecycles.size());
    for (const auto& lc : lifecycles) sales.push_back(lc.sales_density.values);
    auto outer = ksc_cluster(sales, k_outer, q_range, max_iter, seed);

    struct Family {
        const char* name;
        const WeeklySeries ProductLifecycle::* series;
    };
    static constexpr Family kFamilies[] = {
        {"helpfulness_avp", &ProductLifecycle::helpfulness_avp},
        {"sentiment_avp", &ProductLifecycle::sentiment_avp},
        {"cum_avp_like_rating", &ProductLifecycle::cum_avp_like_rating},
        {"cum_nonavp_rating", &ProductLifecycle::cum_nonavp_rating},
        {"nonavp_count", &ProductLifecycle::nonavp_count},
    };

    PatternReport report;
    report.assignments = outer.assignments;
    for (int c = 0; c < k_outer; ++c) {
        PatternGroup group;
        group.sales_centroid = outer.centroids[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < lifecycles.size(); ++i)
            if (outer.assignments[i] == c)
                group.member_indices.push_back(static_cast<int>(i));
        group.size = static_cast<int>(group.member_indices.size());

        for (const auto& fam : kFamilies) {
            FamilyPattern fp;
            fp.family = fam.name;
            std::vector<std::vector<double>> members;
            for (int idx : group.member_indices) {
                const auto& v =
                    (lifecycles[static_cast<std::size_t>(idx)].*fam.series)
                        .values;
                if (norm2(v) > 0.0) members.push_back(v);
            }
            if (members.empty()) {
                fp.present = false;
                fp.note = "no nonzero series in group";
            } else {
                int ki = std::min<int>(k_inner, static_cast<int>(members.size()));
                auto inner = ksc_cluster(members, ki, q_range, max_iter,
                                         seed + static_cast<std::uint64_t>(c) + 1);
                std::vector<int> sizes(static_cast<std::size_t>(ki), 0);
                for (int a : inner.assignments)
                    ++sizes[static_cast<std::size_t>(a)];
                int dom = static_cast<int>(std::distance(
                    sizes.begin(), std::max_element(sizes.begin(), sizes.end())));
                fp.present = true;
                fp.dominant_centroid =
                    inner.centroids[static_cast<std::size_t>(dom)];
                fp.dominant_size = sizes[static_cast<std::size_t>(dom)];
            }
            group.families.push_back(std::move(fp));
        }
        report.groups.push_back(std::move(group));
    }
    return report;
}

} // namespace lifecycle
