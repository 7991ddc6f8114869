#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tbdphd {

struct OspaParams {
    double cutoff = 8.0;  // c, metres
    double order = 2.0;   // p

    OspaParams(double c, double p);
};

struct OspaResult {
    double total = 0.0;
    double loc = 0.0;
    double card = 0.0;
};

// Minimum-cost perfect assignment of a square cost matrix (Hungarian
// algorithm, O(n^3)). Costs must be finite.
double hungarian_min_cost(const Eigen::MatrixXd& cost);

// Optimal sub-pattern assignment distance of order p with cutoff c between
// two finite sets of planar positions, with the standard location /
// cardinality split. Both sets empty gives all zeros.
OspaResult ospa(const std::vector<Eigen::Vector2d>& a,
                const std::vector<Eigen::Vector2d>& b, const OspaParams& params);

struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population standard deviation
};

// Per-scan mean and population std across runs. All runs must share the scan
// count; zero runs is an error.
SeriesStats aggregate(const std::vector<std::vector<double>>& runs);

}  // namespace tbdphd
