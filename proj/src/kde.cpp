#include "lifecycle/kde.hpp"
#include "lifecycle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lifecycle {

namespace dct {

std::vector<double> forward(const std::vector<double>& f) {
    const std::size_t m = f.size();
    std::vector<double> a(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            s += f[j] * std::cos(M_PI * static_cast<double>(k) *
                                 (static_cast<double>(j) + 0.5) /
                                 static_cast<double>(m));
        a[k] = s;
    }
    return a;
}

std::vector<double> inverse(const std::vector<double>& a) {
    const std::size_t m = a.size();
    std::vector<double> f(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double s = a[0];
        for (std::size_t k = 1; k < m; ++k)
            s += 2.0 * a[k] *
                 std::cos(M_PI * static_cast<double>(k) *
                          (static_cast<double>(j) + 0.5) /
                          static_cast<double>(m));
        f[j] = s / static_cast<double>(m);
    }
    return f;
}

} // namespace dct

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

std::vector<double> pad_normalize(const std::vector<double>& histogram) {
    std::vector<double> f(histogram);
    f.resize(next_pow2(std::max<std::size_t>(f.size(), 4)), 0.0);
    double total = std::accumulate(f.begin(), f.end(), 0.0);
    if (total > 0)
        for (auto& v : f) v /= total;
    return f;
}

// One evaluation of the fixed-point map t - xi gamma^[5](t) on the
// squared cosine coefficients (Botev-style plug-in recursion).
double fixed_point(double t, double n, const std::vector<double>& i_sq,
                   const std::vector<double>& a2) {
    constexpr int kStages = 7;
    double f = 0.0;
    for (std::size_t k = 0; k < a2.size(); ++k)
        f += std::pow(i_sq[k], kStages) * a2[k] *
             std::exp(-i_sq[k] * M_PI * M_PI * t);
    f *= 2.0 * std::pow(M_PI, 2 * kStages);
    for (int s = kStages - 1; s >= 2; --s) {
        double k0 = 1.0;
        for (int j = 1; j < 2 * s; j += 2) k0 *= j; // (2s-1)!!
        k0 /= std::sqrt(2.0 * M_PI);
        double cnst = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
        double time = std::pow(2.0 * cnst * k0 / (n * f), 2.0 / (3.0 + 2.0 * s));
        f = 0.0;
        for (std::size_t k = 0; k < a2.size(); ++k)
            f += std::pow(i_sq[k], s) * a2[k] *
                 std::exp(-i_sq[k] * M_PI * M_PI * time);
        f *= 2.0 * std::pow(M_PI, 2 * s);
    }
    return t - std::pow(2.0 * n * std::sqrt(M_PI) * f, -2.0 / 5.0);
}

double rule_of_thumb(const std::vector<double>& f, double n) {
    // Weighted sigma of bin centers on the unit grid.
    const double m = static_cast<double>(f.size());
    double mean = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        mean += f[j] * (static_cast<double>(j) + 0.5) / m;
    double var = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        double d = (static_cast<double>(j) + 0.5) / m - mean;
        var += f[j] * d * d;
    }
    double sigma = std::sqrt(std::max(var, 1e-12));
    double h = 1.06 * sigma * std::pow(n, -0.2);
    return h * h;
}

} // namespace

double select_bandwidth(const std::vector<double>& histogram, double n_samples,
                        bool* used_fallback) {
    if (n_samples < 2)
        throw InsufficientDataError("bandwidth selection needs n >= 2");
    if (histogram.size() < 4)
        throw InsufficientDataError("histogram shorter than 4 bins");
    auto f = pad_normalize(histogram);
    auto a = dct::forward(f);
    std::vector<double> i_sq, a2;
    i_sq.reserve(a.size() - 1);
    a2.reserve(a.size() - 1);
    for (std::size_t k = 1; k < a.size(); ++k) {
        i_sq.push_back(static_cast<double>(k) * static_cast<double>(k));
        a2.push_back(a[k] * a[k]);
    }
    if (used_fallback) *used_fallback = false;

    // Bracket a sign change of the fixed-point map on (0, 0.1].
    const int kGrid = 64;
    double prev_t = 1e-8;
    double prev_g = fixed_point(prev_t, n_samples, i_sq, a2);
    double lo = 0, hi = 0;
    bool bracketed = false;
    for (int i = 1; i <= kGrid && !bracketed; ++i) {
        double t = 1e-8 + (0.1 - 1e-8) * i / kGrid;
        double g = fixed_point(t, n_samples, i_sq, a2);
        if (std::isfinite(prev_g) && std::isfinite(g) && prev_g * g <= 0.0) {
            lo = prev_t;
            hi = t;
            bracketed = true;
        }
        prev_t = t;
        prev_g = g;
    }
    if (!bracketed) {
        if (used_fallback) *used_fallback = true;
        return rule_of_thumb(f, n_samples);
    }
    double glo = fixed_point(lo, n_samples, i_sq, a2);
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = fixed_point(mid, n_samples, i_sq, a2);
        if (glo * gm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    return 0.5 * (lo + hi);
}

DensityProfile diffuse(const std::vector<double>& histogram, double t) {
    if (!(t > 0)) throw std::invalid_argument("diffusion time must be > 0");
    DensityProfile out;
    out.diffusion_time = t;
    out.values.assign(histogram.size(), 0.0);
    double total = std::accumulate(histogram.begin(), histogram.end(), 0.0);
    if (total <= 0) return out; // empty selection -> all-zero density
    auto f = pad_normalize(histogram);
    auto a = dct::forward(f);
    for (std::size_t k = 1; k < a.size(); ++k)
        a[k] *= std::exp(-static_cast<double>(k) * static_cast<double>(k) *
                         M_PI * M_PI * t / 2.0);
    auto g = dct::inverse(a);
    double mass = 0.0;
    for (std::size_t j = 0; j < histogram.size(); ++j) {
        out.values[j] = std::max(g[j], 0.0);
        mass += out.values[j];
    }
    if (mass > 0)
        for (auto& v : out.values) v /= mass;
    return out;
}

DensityProfile smooth_histogram(const std::vector<double>& histogram,
                                double n_samples) {
    bool fb = false;
    double t = select_bandwidth(histogram, n_samples, &fb);
    auto out = diffuse(histogram, t);
    out.used_fallback = fb;
    return out;
}

void attach_sales_density(ProductLifecycle& lc) {
    const auto& h = lc.sales_count.values;
    double n = std::accumulate(h.begin(), h.end(), 0.0);
    lc.sales_density.epoch_week = lc.sales_count.epoch_week;
    if (n < 2 || h.size() < 4) {
        // Too sparse to smooth: use the normalized histogram directly.
        lc.sales_density.values = h;
        if (n > 0)
            for (auto& v : lc.sales_density.values) v /= n;
        return;
    }
    lc.sales_density.values = smooth_histogram(h, n).values;
}

} // namespace lifecycle
