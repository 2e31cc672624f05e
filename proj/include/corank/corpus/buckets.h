#pragma once

namespace corank::corpus {

constexpr int kNumSizeBuckets = 8;
constexpr int kNumDistanceBuckets = 10;

// Cluster-size bucketing over [1,2,3,4,5-7,8-11,12-19,20+].
// Hard error for n < 1.
int bucket_cluster_size(int n);

// Mention-distance bucketing over [0,1,2,3,4,5-7,8-15,16-31,32-63,64+].
// Hard error for d < 0. Distances are differences of mention indices in
// detection order.
int bucket_distance(int d);

}  // namespace corank::corpus
