#pragma once

#include <span>
#include <vector>

namespace wlpost {

// log(sum_i exp(x_i)). Returns -inf for an empty range or when every entry is -inf.
double log_sum_exp(std::span<const double> x);

// Max-shifted softmax of log-weights into `out` (resized). Entries equal to -inf
// get probability 0; at least one entry must be finite.
void softmax(std::span<const double> logits, std::vector<double>& out);
std::vector<double> softmax(std::span<const double> logits);

}  // namespace wlpost
