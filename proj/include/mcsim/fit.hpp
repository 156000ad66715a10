#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mcsim {

struct ScalingFit {
    double exponent = 0.0;   // slope of log2 y vs log2 x
    double prefactor = 0.0;  // y ~ prefactor * x^exponent
    double residual = 0.0;   // rms residual in log2 space
};

// Least-squares fit of log y against log x. Requires at least 4 distinct
// positive x values.
inline ScalingFit fit_scaling(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit: values must be positive");
        lx.push_back(std::log2(xs[i]));
        ly.push_back(std::log2(ys[i]));
    }
    std::vector<double> distinct = lx;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   distinct.end());
    if (distinct.size() < 4) throw std::invalid_argument("fit: need at least 4 distinct x values");

    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw std::invalid_argument("fit: degenerate data");
    ScalingFit f;
    f.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - f.exponent * sx) / n;
    f.prefactor = std::exp2(intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (f.exponent * lx[i] + intercept);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

}  // namespace mcsim
