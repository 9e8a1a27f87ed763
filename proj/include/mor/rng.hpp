#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace mor {

// Deterministic random stream: one seed plus a stream tag gives a
// reproducible draw sequence on every platform (mt19937_64 is pinned by the
// standard; the normal transform is our own Box-Muller, not the libstdc++
// distribution, so sequences do not depend on the standard library).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::string_view stream = "");

  std::uint64_t seed() const { return seed_; }
  const std::string& algorithm() const { return algorithm_; }

  std::uint64_t next_u64();
  // uniform in [0,1)
  double uniform();
  // standard normal via Box-Muller
  double normal();
  // uniform integer in [0, bound)
  std::uint64_t below(std::uint64_t bound);

  Eigen::VectorXd normal_vector(int n);
  // 9 iid standard normals, filled row-major
  Eigen::Matrix3d normal_matrix3();

 private:
  std::uint64_t seed_;
  std::string algorithm_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mor
