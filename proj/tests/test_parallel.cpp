#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "topomatch/global_match.hpp"
#include "topomatch/matching.hpp"
#include "topomatch/parallel.hpp"
#include "topomatch/synth.hpp"

namespace topomatch {
namespace {

class Threads : public ::testing::Test {
 protected:
  void TearDown() override { ::unsetenv("TOPO_MATCH_THREADS"); }
  static void use(const char* n) { ::setenv("TOPO_MATCH_THREADS", n, 1); }
};

TEST_F(Threads, EnvironmentSetsWorkerCount) {
  use("3");
  EXPECT_EQ(worker_count(), 3u);
  use("junk");
  EXPECT_GE(worker_count(), 1u);
  use("0");
  EXPECT_GE(worker_count(), 1u);
}

TEST_F(Threads, EveryIndexRunsOnce) {
  use("4");
  std::vector<std::atomic<int>> hits(5000);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST_F(Threads, ExceptionsPropagate) {
  use("4");
  EXPECT_THROW(parallel_for(1000, [](std::size_t i) {
                 if (i == 517) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST_F(Threads, ResultsIndependentOfWorkerCount) {
  ConsensusConfig config;
  const auto set = consensus_facets(config, 21);
  use("1");
  const auto a = make_feature_set(set.facets[0], Connectivity::Eight);
  const auto b = make_feature_set(set.facets[1], Connectivity::Eight);
  const Matrix serial = similarity_matrix(a, b);
  const auto tracks_serial = match_global(set.facets).tracks;
  use("4");
  const Matrix threaded = similarity_matrix(a, b);
  ASSERT_EQ(serial.rows(), threaded.rows());
  ASSERT_EQ(serial.cols(), threaded.cols());
  for (std::size_t i = 0; i < serial.rows(); ++i) {
    for (std::size_t j = 0; j < serial.cols(); ++j) ASSERT_EQ(serial(i, j), threaded(i, j));
  }
  EXPECT_EQ(match_global(set.facets).tracks, tracks_serial);
}

}  // namespace
}  // namespace topomatch
