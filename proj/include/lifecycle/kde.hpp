#pragma once

#include "lifecycle/series.hpp"

#include <vector>

namespace lifecycle {

// Smoothed weekly probability masses. diffusion_time is the heat-equation
// time on the unit-normalized grid (bandwidth h relates as t = h^2).
struct DensityProfile {
    std::vector<double> values;
    double diffusion_time = 0.0;
    bool used_fallback = false;
};

namespace dct {
// Orthogonality-free cosine transforms on the reflected (Neumann) grid:
// forward[k] = sum_j f[j] cos(pi k (j+0.5)/m), inverse reconstructs f.
std::vector<double> forward(const std::vector<double>& f);
std::vector<double> inverse(const std::vector<double>& a);
} // namespace dct

// Diffusion time selected by the improved Sheather-Jones fixed point on
// the cosine coefficients of the normalized histogram; Gaussian
// rule-of-thumb fallback when the fixed point has no bracketed root.
// n_samples is the underlying review count. Throws InsufficientDataError
// for n_samples < 2.
double select_bandwidth(const std::vector<double>& histogram, double n_samples,
                        bool* used_fallback = nullptr);

// Damp cosine coefficient k by exp(-k^2 pi^2 t / 2), clip negative
// ripple, renormalize to sum 1. The histogram is padded to the next
// power of two for the transform and cropped back.
DensityProfile diffuse(const std::vector<double>& histogram, double t);

// select_bandwidth + diffuse.
DensityProfile smooth_histogram(const std::vector<double>& histogram,
                                double n_samples);

// Convenience: fill lifecycle.sales_density from its AVP histogram.
void attach_sales_density(ProductLifecycle& lc);

} // namespace lifecycle
