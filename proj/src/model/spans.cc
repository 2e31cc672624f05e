#include "corank/model/spans.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corank::model {

std::vector<corpus::Span> enumerate_spans(int num_tokens, int max_width) {
  if (num_tokens < 0) throw std::invalid_argument("negative token count");
  if (max_width < 1) throw std::invalid_argument("max span width must be >= 1");
  std::vector<corpus::Span> out;
  for (int s = 0; s < num_tokens; ++s)
    for (int e = s; e < std::min(s + max_width, num_tokens); ++e) out.push_back({s, e});
  return out;
}

std::vector<int> prune_spans(const std::vector<corpus::Span>& spans, const std::vector<double>& scores,
                             double ratio, int num_tokens) {
  if (spans.size() != scores.size())
    throw std::invalid_argument("prune_spans: " + std::to_string(spans.size()) + " spans but " +
                                std::to_string(scores.size()) + " scores");
  if (num_tokens < 1 || spans.empty()) return {};

  size_t limit = static_cast<size_t>(std::floor(ratio * num_tokens));
  if (limit < 1) limit = 1;

  std::vector<int> order(spans.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (spans[a].start != spans[b].start) return spans[a].start < spans[b].start;
    return spans[a].width() < spans[b].width();
  });

  std::vector<int> kept;
  for (int idx : order) {
    if (kept.size() >= limit) break;
    bool crosses = false;
    for (int k : kept) {
      if (corpus::partial_overlap(spans[idx], spans[k])) {
        crosses = true;
        break;
      }
    }
    if (!crosses) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end(), [&](int a, int b) { return spans[a] < spans[b]; });
  return kept;
}

}  // namespace corank::model
