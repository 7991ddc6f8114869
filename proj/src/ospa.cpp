#include "tbdphd/ospa.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tbdphd {

OspaParams::OspaParams(double c, double p) : cutoff(c), order(p) {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw std::invalid_argument("ospa cutoff must be positive and finite");
    }
    if (!(order >= 1.0) || !std::isfinite(order)) {
        throw std::invalid_argument("ospa order must be >= 1");
    }
}

double hungarian_min_cost(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols()) {
        throw std::invalid_argument("cost matrix must be square");
    }
    const int n = static_cast<int>(cost.rows());
    if (n == 0) return 0.0;
    if (!cost.allFinite()) {
        throw std::invalid_argument("cost matrix must be finite");
    }

    // Potentials formulation: rows enter one at a time along augmenting paths.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);  // column -> row
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        total += cost(match[static_cast<std::size_t>(j)] - 1, j - 1);
    }
    return total;
}

OspaResult ospa(const std::vector<Eigen::Vector2d>& a,
                const std::vector<Eigen::Vector2d>& b, const OspaParams& params) {
    const auto* small = &a;
    const auto* large = &b;
    if (small->size() > large->size()) std::swap(small, large);
    const int m = static_cast<int>(small->size());
    const int n = static_cast<int>(large->size());
    if (n == 0) return {};

    const double cp = std::pow(params.cutoff, params.order);
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i < m) {
                const double d = std::min(((*small)[static_cast<std::size_t>(i)] -
                                           (*large)[static_cast<std::size_t>(j)])
                                              .norm(),
                                          params.cutoff);
                cost(i, j) = std::pow(d, params.order);
            } else {
                cost(i, j) = cp;  // unmatched: full cutoff penalty
            }
        }
    }

    const double assigned = hungarian_min_cost(cost);
    const double card_p = (n - m) * cp;
    const double loc_p = std::max(assigned - card_p, 0.0);
    const double inv_p = 1.0 / params.order;
    OspaResult r;
    r.total = std::pow(assigned / n, inv_p);
    r.loc = std::pow(loc_p / n, inv_p);
    r.card = std::pow(card_p / n, inv_p);
    return r;
}

SeriesStats aggregate(const std::vector<std::vector<double>>& runs) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate needs at least one run");
    }
    const std::size_t scans = runs.front().size();
    for (const auto& r : runs) {
        if (r.size() != scans) {
            throw std::invalid_argument("aggregate runs must share the scan count");
        }
    }
    SeriesStats s;
    s.mean.resize(scans, 0.0);
    s.stddev.resize(scans, 0.0);
    const double R = static_cast<double>(runs.size());
    for (std::size_t k = 0; k < scans; ++k) {
        double mean = 0.0;
        for (const auto& r : runs) mean += r[k];
        mean /= R;
        double var = 0.0;
        for (const auto& r : runs) var += (r[k] - mean) * (r[k] - mean);
        s.mean[k] = mean;
        s.stddev[k] = std::sqrt(var / R);
    }
    return s;
}

}  // namespace tbdphd
