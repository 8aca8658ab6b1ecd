#include "wlpost/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wlpost {

double log_sum_exp(std::span<const double> x)
{
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (x.empty())
        return neg_inf;
    const double m = *std::max_element(x.begin(), x.end());
    if (m == neg_inf)
        return neg_inf;
    if (std::isinf(m))
        return m;
    double s = 0.0;
    for (double v : x)
        s += std::exp(v - m);
    return m + std::log(s);
}

void softmax(std::span<const double> logits, std::vector<double>& out)
{
    out.resize(logits.size());
    if (logits.empty())
        return;
    const double m = *std::max_element(logits.begin(), logits.end());
    if (!std::isfinite(m))
        throw std::domain_error("softmax: maximum logit is not finite");
    double s = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        s += out[i];
    }
    const double inv = 1.0 / s;
    for (double& p : out)
        p *= inv;
}

std::vector<double> softmax(std::span<const double> logits)
{
    std::vector<double> out;
    softmax(logits, out);
    return out;
}

}  // namespace wlpost
