#pragma once

#include "lifecycle/series.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lifecycle {

struct KscMatch {
    double distance = 0.0; // in [0, 1]-ish, relative residual norm
    double alpha = 0.0;    // optimal scaling
    int shift = 0;         // optimal q
};

// Scale- and shift-invariant distance: min over q of |x - alpha y_(q)|/|x|
// with the optimal alpha per shift. Ties break toward the smallest |q|.
// Throws DegenerateInputError when |x| = 0.
KscMatch ksc_distance(std::span<const double> x, std::span<const double> y,
                      int q_range);

// Unit-norm minimizer of the summed squared distances to the (already
// aligned) members: smallest eigenvector of sum(I - x x^T / |x|^2),
// sign fixed so the entry sum is non-negative.
std::vector<double> update_centroid(
    const std::vector<std::vector<double>>& members);

struct ShapeClusterModel {
    int k = 0;
    std::vector<std::vector<double>> centroids; // unit norm
    std::vector<int> assignments;               // profile -> cluster
    std::vector<double> alphas;                 // per profile, at convergence
    std::vector<int> shifts;
    double objective = 0.0; // sum of squared distances
    int iterations = 0;
};

// Lloyd-style K-SC: seeded farthest-point init, assignment by
// ksc_distance, eigenvector centroid updates, empty clusters reseeded
// from the worst-fit member. Deterministic given the seed.
ShapeClusterModel ksc_cluster(const std::vector<std::vector<double>>& profiles,
                              int k, int q_range, int max_iter,
                              std::uint64_t seed);

// Default shift search range: +/- 25% of the series length.
int default_q_range(std::size_t length);

struct FamilyPattern {
    std::string family;
    std::vector<double> dominant_centroid;
    int dominant_size = 0;
    bool present = false;
    std::string note;
};

struct PatternGroup {
    std::vector<double> sales_centroid;
    int size = 0;
    std::vector<int> member_indices;
    std::vector<FamilyPattern> families;
};

struct PatternReport {
    std::vector<PatternGroup> groups;
    std::vector<int> assignments;
};

// Cluster sales densities into k_outer groups, then cluster each allied
// series family within a group into k_inner and report the dominant
// (largest-cluster) centroid per family.
PatternReport pattern_report(const std::vector<ProductLifecycle>& lifecycles,
                             int k_outer, int k_inner, int q_range,
                             std::uint64_t seed, int max_iter = 100);

} // namespace lifecycle
