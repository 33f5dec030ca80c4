#include <doctest.h>

#include "lifecycle/errors.hpp"
#include "lifecycle/kde.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace lifecycle;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent port of the diffusion bandwidth selector: discrete cosine
// coefficients, the s-stage functional recursion, and a dense-grid root
// scan. Written from the published algorithm, not from the library code.
double oracle_bandwidth(const std::vector<double>& hist, double n) {
    const std::size_t m = hist.size();
    double total = std::accumulate(hist.begin(), hist.end(), 0.0);
    std::vector<double> a(m, 0.0);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j)
            a[k] += hist[j] / total *
                    std::cos(kPi * static_cast<double>(k) *
                             (static_cast<double>(j) + 0.5) /
                             static_cast<double>(m));
    std::vector<double> a2(m - 1), idx2(m - 1);
    for (std::size_t k = 1; k < m; ++k) {
        a2[k - 1] = a[k] * a[k];
        idx2[k - 1] = static_cast<double>(k) * static_cast<double>(k);
    }
    auto functional = [&](int s, double t) {
        double f = 0;
        for (std::size_t k = 0; k < a2.size(); ++k)
            f += std::pow(idx2[k], s) * a2[k] *
                 std::exp(-idx2[k] * kPi * kPi * t);
        return 2.0 * std::pow(kPi, 2 * s) * f;
    };
    auto fixed_point = [&](double t) {
        const int l = 7;
        double f = functional(l, t);
        for (int s = l - 1; s >= 2; --s) {
            double k0 = 1.0;
            for (int odd = 1; odd <= 2 * s - 1; odd += 2) k0 *= odd;
            k0 /= std::sqrt(2.0 * kPi);
            double cst = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
            double ts = std::pow(2.0 * cst * k0 / (n * f),
                                 2.0 / (3.0 + 2.0 * s));
            f = functional(s, ts);
        }
        return t - std::pow(2.0 * n * std::sqrt(kPi) * f, -0.4);
    };
    // dense scan for the first sign change, then bisect
    double lo = 0, hi = 0, prev_t = 1e-8, prev_v = fixed_point(prev_t);
    for (int i = 1; i <= 2000; ++i) {
        double t = 0.1 * static_cast<double>(i) / 2000.0;
        double v = fixed_point(t);
        if (prev_v < 0 != v < 0) {
            lo = prev_t;
            hi = t;
            break;
        }
        prev_t = t;
        prev_v = v;
    }
    REQUIRE(hi > 0);
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (fixed_point(lo) < 0 != fixed_point(mid) < 0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> gaussian_histogram(std::size_t bins, double n_draws,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> hist(bins, 0.0);
    for (int i = 0; i < static_cast<int>(n_draws); ++i) {
        double u1 = std::max(
            static_cast<double>(rng() >> 11) * 0x1.0p-53, 1e-300);
        double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * kPi * u2);
        double x = 0.5 + 0.12 * z;
        if (x < 0 || x >= 1) continue;
        hist[static_cast<std::size_t>(x * static_cast<double>(bins))] += 1.0;
    }
    return hist;
}

} // namespace

TEST_CASE("cosine transform round-trips and preserves total mass") {
    std::vector<double> f = {0.1, 0.4, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0};
    auto a = dct::forward(f);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-12)); // sum of masses
    auto back = dct::inverse(a);
    REQUIRE(back.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-10));
}

TEST_CASE("degenerate one-bin histogram falls back to the rule of thumb") {
    std::vector<double> hist = {0, 0, 2, 0};
    bool fallback = false;
    double t = select_bandwidth(hist, 2, &fallback);
    CHECK(t > 0);
    CHECK(fallback);
}

TEST_CASE("too few samples is an insufficient-data error") {
    std::vector<double> hist = {1, 0, 0, 0};
    CHECK_THROWS_AS(select_bandwidth(hist, 1, nullptr),
                    InsufficientDataError);
}

TEST_CASE("bandwidth agrees with an independent reference implementation") {
    auto hist = gaussian_histogram(64, 500, 21);
    double n = std::accumulate(hist.begin(), hist.end(), 0.0);
    bool fallback = false;
    double t = select_bandwidth(hist, n, &fallback);
    CHECK(!fallback);
    double oracle = oracle_bandwidth(hist, n);
    CHECK(t > 0.5 * oracle);
    CHECK(t < 1.5 * oracle);
}

TEST_CASE("more samples on the same shape shrink the bandwidth") {
    auto hist = gaussian_histogram(64, 2000, 8);
    double t_prev = 1e9;
    for (double n : {100.0, 400.0, 1600.0}) {
        double t = select_bandwidth(hist, n, nullptr);
        CHECK(t < t_prev);
        t_prev = t;
    }
}

TEST_CASE("vanishing diffusion time reproduces the normalized histogram") {
    std::vector<double> hist = {0, 3, 1, 0, 2, 0, 0, 2};
    auto prof = diffuse(hist, 1e-12);
    double total = std::accumulate(hist.begin(), hist.end(), 0.0);
    for (std::size_t i = 0; i < hist.size(); ++i)
        CHECK(prof.values[i] ==
              doctest::Approx(hist[i] / total).epsilon(1e-4));
}

TEST_CASE("infinite diffusion time flattens to the uniform density") {
    std::vector<double> hist = {5, 0, 0, 0, 0, 0, 0, 1};
    auto prof = diffuse(hist, 1e6);
    for (double v : prof.values)
        CHECK(v == doctest::Approx(1.0 / 8).epsilon(1e-9));
}

TEST_CASE("delta diffusion matches a reflected Gaussian convolution") {
    const std::size_t m = 64;
    const double t = 0.01;
    std::vector<double> hist(m, 0.0);
    hist[20] = 1.0;
    auto prof = diffuse(hist, t);

    // heat kernel on [0,1] with reflecting walls, via image charges
    double x0 = (20 + 0.5) / static_cast<double>(m);
    double sd = std::sqrt(t);
    std::vector<double> oracle(m, 0.0);
    double total = 0;
    for (std::size_t j = 0; j < m; ++j) {
        double x = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        double v = 0;
        for (int img = -8; img <= 8; ++img) {
            for (double center : {2.0 * img + x0, 2.0 * img - x0}) {
                double z = (x - center) / sd;
                v += std::exp(-0.5 * z * z);
            }
        }
        oracle[j] = v;
        total += v;
    }
    double max_dev = 0;
    for (std::size_t j = 0; j < m; ++j)
        max_dev = std::max(max_dev,
                           std::abs(prof.values[j] - oracle[j] / total));
    CHECK(max_dev < 1e-3);

    // unimodal, symmetric around the source bin
    auto peak = std::max_element(prof.values.begin(), prof.values.end());
    CHECK(peak - prof.values.begin() == 20);
}

TEST_CASE("smoothed output is a probability vector") {
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> hist(24, 0.0);
        for (int i = 0; i < 200; ++i) hist[rng() % 24] += 1.0;
        auto prof = smooth_histogram(hist, 200);
        double sum = 0;
        for (double v : prof.values) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("diffusion depends only on the histogram shape") {
    std::vector<double> hist = {1, 4, 2, 0, 3, 1, 0, 1};
    std::vector<double> scaled = hist;
    for (auto& v : scaled) v *= 37.0;
    auto a = diffuse(hist, 0.004);
    auto b = diffuse(scaled, 0.004);
    for (std::size_t i = 0; i < hist.size(); ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
}

TEST_CASE("density estimate tracks a known Gaussian shape") {
    auto hist = gaussian_histogram(64, 500, 77);
    double n = std::accumulate(hist.begin(), hist.end(), 0.0);
    auto prof = smooth_histogram(hist, n);
    double l1 = 0;
    for (std::size_t j = 0; j < 64; ++j) {
        double x = (static_cast<double>(j) + 0.5) / 64.0;
        double z = (x - 0.5) / 0.12;
        double truth = std::exp(-0.5 * z * z) /
                       (0.12 * std::sqrt(2.0 * kPi)) / 64.0;
        l1 += std::abs(prof.values[j] - truth);
    }
    CHECK(l1 <= 0.10);
}
