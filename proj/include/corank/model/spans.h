#pragma once

#include <vector>

#include "corank/corpus/document.h"

namespace corank::model {

// All candidate spans of width <= max_width over T tokens, in lexicographic
// (start, end) order. The candidate count is sum_t min(max_width, T-t).
std::vector<corpus::Span> enumerate_spans(int num_tokens, int max_width);

// Greedy span pruning: walk candidates by descending score (ties broken by
// earlier start, then shorter span), skip any span that partially overlaps
// an already kept span, and stop at floor(ratio*T) spans (at least 1 when
// T >= 1). Returns indices into `spans` re-sorted to text order.
std::vector<int> prune_spans(const std::vector<corpus::Span>& spans, const std::vector<double>& scores,
                             double ratio, int num_tokens);

}  // namespace corank::model
