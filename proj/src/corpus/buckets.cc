#include "corank/corpus/buckets.h"

#include <stdexcept>
#include <string>

namespace corank::corpus {

int bucket_cluster_size(int n) {
  if (n < 1) throw std::invalid_argument("cluster size must be >= 1, got " + std::to_string(n));
  if (n <= 4) return n - 1;
  if (n <= 7) return 4;
  if (n <= 11) return 5;
  if (n <= 19) return 6;
  return 7;
}

int bucket_distance(int d) {
  if (d < 0) throw std::invalid_argument("mention distance must be >= 0, got " + std::to_string(d));
  if (d <= 4) return d;
  if (d <= 7) return 5;
  if (d <= 15) return 6;
  if (d <= 31) return 7;
  if (d <= 63) return 8;
  return 9;
}

}  // namespace corank::corpus
