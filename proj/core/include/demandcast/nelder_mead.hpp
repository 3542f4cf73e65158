#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace demandcast {

struct NelderMeadOptions {
    double initial_step = 0.15;
    /// Stop once every vertex lies within this distance (infinity norm) of the
    /// best vertex, relative to max(1, |best|).
    double relative_size_tol = 1e-8;
    std::size_t max_evaluations = 5000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Minimizes `objective` with the adaptive-coefficient simplex method of
/// Gao and Han (2012). Non-finite objective values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, const NelderMeadOptions& options = {});

}  // namespace demandcast
