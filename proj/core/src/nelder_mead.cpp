#include "demandcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace demandcast {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    if (n == 0) {
        result.value = eval({});
        result.converged = true;
        return result;
    }

    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double gamma = 1.0 + 2.0 / dn;
    const double rho = 0.75 - 1.0 / (2.0 * dn);
    const double sigma = 1.0 - 1.0 / dn;

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto size_ok = [&]() {
        const auto& best = simplex[order[0]];
        double scale = 1.0;
        for (double v : best) scale = std::max(scale, std::abs(v));
        double size = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const auto& v = simplex[order[k]];
            for (std::size_t i = 0; i < n; ++i) size = std::max(size, std::abs(v[i] - best[i]));
        }
        return size <= options.relative_size_tol * scale;
    };

    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        if (size_ok()) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evaluations) break;

        const std::size_t worst = order[n];
        const std::size_t second = order[n - 1];
        const std::size_t best = order[0];
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i] / dn;

        for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + alpha * (centroid[i] - simplex[worst][i]);
        const double fr = eval(trial);

        if (fr < fx[best]) {
            for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + gamma * (trial[i] - centroid[i]);
            const double fe = eval(trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                fx[worst] = fe;
            } else {
                simplex[worst] = trial;
                fx[worst] = fr;
            }
            continue;
        }
        if (fr < fx[second]) {
            simplex[worst] = trial;
            fx[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflection improved on the worst vertex, inside otherwise.
        const bool outside = fr < fx[worst];
        for (std::size_t i = 0; i < n; ++i) {
            trial2[i] = outside ? centroid[i] + rho * (trial[i] - centroid[i])
                                : centroid[i] + rho * (simplex[worst][i] - centroid[i]);
        }
        const double fc = eval(trial2);
        if (fc < (outside ? fr : fx[worst])) {
            simplex[worst] = trial2;
            fx[worst] = fc;
            continue;
        }
        for (std::size_t k = 1; k <= n; ++k) {
            auto& v = simplex[order[k]];
            for (std::size_t i = 0; i < n; ++i) v[i] = simplex[best][i] + sigma * (v[i] - simplex[best][i]);
            fx[order[k]] = eval(v);
        }
    }

    result.x = simplex[order[0]];
    result.value = fx[order[0]];
    return result;
}

}  // namespace demandcast
