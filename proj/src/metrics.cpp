#include "ahc/metrics.hpp"

#include <cmath>

namespace ahc {

double fbeta_score(long tp, long fp, long fn, double beta) {
    if (tp == 0) return 0.0;
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double b2 = beta * beta;
    const double denom = b2 * p + r;
    if (denom <= 0.0) return 0.0;
    return (1.0 + b2) * p * r / denom;
}

double MetricBundle::f(double beta) const {
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (betas[i] == beta) return fbeta[i];
    }
    throw std::out_of_range("F_beta not computed for beta=" + std::to_string(beta));
}

MetricBundle compute_metrics(const std::vector<Decision>& decisions, const Dataset& gold,
                             std::span<const double> betas) {
    MetricBundle m;
    for (const Decision& d : decisions) {
        const int pos = gold.index_of(d.item_id);
        if (pos < 0) {
            throw MissingGold("no gold labels for item " + std::to_string(d.item_id));
        }
        if (d.verdict == Verdict::Undecided) {
            throw std::invalid_argument("item " + std::to_string(d.item_id) +
                                        " has no final verdict");
        }
        const bool truth = gold.item_passes_all(pos);
        const bool said_in = d.verdict == Verdict::In;
        if (said_in && truth) ++m.tp;
        else if (said_in && !truth) ++m.fp;
        else if (!said_in && truth) ++m.fn;
        else ++m.tn;
    }
    if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / (m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / (m.tp + m.fn);
    m.betas.assign(betas.begin(), betas.end());
    m.fbeta.reserve(m.betas.size());
    for (double b : m.betas) m.fbeta.push_back(fbeta_score(m.tp, m.fp, m.fn, b));
    return m;
}

}  // namespace ahc
