#pragma once

#include "ahc/core.hpp"

#include <span>
#include <vector>

namespace ahc {

// F_beta = (1+beta^2) P R / (beta^2 P + R); 0 when the denominator vanishes.
double fbeta_score(long tp, long fp, long fn, double beta);

struct MetricBundle {
    double precision = 0.0;
    double recall = 0.0;
    std::vector<double> betas;  // parallel to fbeta
    std::vector<double> fbeta;
    long tp = 0, fp = 0, fn = 0, tn = 0;
    double cost_per_item = 0.0;  // mean crowd votes per pool item

    double f(double beta) const;  // throws if beta was not requested
};

// Positive class is "passes every predicate". Every decision must carry a
// final In/Out verdict.
MetricBundle compute_metrics(const std::vector<Decision>& decisions, const Dataset& gold,
                             std::span<const double> betas);

}  // namespace ahc
