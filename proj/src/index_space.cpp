#include "chrono_duhamel/index_space.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace chrono_duhamel {

namespace {

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// nondecreasing sequences of length n with values in [v, dim)
std::uint64_t tail_count(int dim, int v, int n) {
  if (n == 0) return 1;
  return binom(dim - v + n - 1, n);
}

}  // namespace

std::size_t symmetric_size(int dim, int degree) {
  return static_cast<std::size_t>(binom(dim + degree - 1, degree));
}

IndexSpace::IndexSpace(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0) throw std::invalid_argument("IndexSpace: dim >= 1 and degree >= 0 required");
  if (dim > 65535) throw std::invalid_argument("IndexSpace: dim too large");
  size_ = symmetric_size(dim, degree);
  if (size_ > (std::size_t{1} << 31)) throw std::length_error("IndexSpace: too many coefficients");
  indices_.resize(size_ * degree_);
  multiplicity_.resize(size_);

  std::vector<int> cur(degree_, 0);
  std::vector<double> fact(degree_ + 1, 1.0);
  for (int i = 1; i <= degree_; ++i) fact[i] = fact[i - 1] * i;
  for (std::size_t r = 0; r < size_; ++r) {
    double denom = 1.0;
    int run = 0;
    for (int i = 0; i < degree_; ++i) {
      indices_[r * degree_ + i] = static_cast<std::uint16_t>(cur[i]);
      run = (i > 0 && cur[i] == cur[i - 1]) ? run + 1 : 1;
      denom *= run;
    }
    multiplicity_[r] = fact[degree_] / denom;
    // advance to the next nondecreasing sequence
    int j = degree_ - 1;
    while (j >= 0 && cur[j] == dim_ - 1) --j;
    if (j < 0) break;
    ++cur[j];
    for (int i = j + 1; i < degree_; ++i) cur[i] = cur[j];
  }

  if (degree_ >= 1) {
    auto lower = degree_ == 1 ? nullptr : IndexSpace::get(dim_, degree_ - 1);
    const std::size_t lower_size = degree_ == 1 ? 1 : lower->size();
    insert_.resize(lower_size * dim_);
    std::vector<int> merged(degree_);
    for (std::size_t b = 0; b < lower_size; ++b) {
      for (int a = 0; a < dim_; ++a) {
        int k = 0;
        bool placed = false;
        for (int i = 0; i < degree_ - 1; ++i) {
          const int v = lower->index(b)[i];
          if (!placed && a <= v) {
            merged[k++] = a;
            placed = true;
          }
          merged[k++] = v;
        }
        if (!placed) merged[k++] = a;
        insert_[b * dim_ + a] = static_cast<std::uint32_t>(rank(merged));
      }
    }
  }
}

std::size_t IndexSpace::rank(std::span<const int> sorted) const {
  std::uint64_t r = 0;
  int prev = 0;
  for (int i = 0; i < degree_; ++i) {
    const int remaining = degree_ - i - 1;
    for (int v = prev; v < sorted[i]; ++v) r += tail_count(dim_, v, remaining);
    prev = sorted[i];
  }
  return static_cast<std::size_t>(r);
}

std::shared_ptr<const IndexSpace> IndexSpace::get(int dim, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const IndexSpace>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({dim, degree});
    if (it != cache.end()) return it->second;
  }
  // built outside the lock: construction recurses into get() for degree-1
  auto built = std::make_shared<const IndexSpace>(dim, degree);
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(std::make_pair(dim, degree), built);
  return it->second;
}

std::shared_ptr<const std::vector<std::uint32_t>> product_table(int dim, int da, int db) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const std::vector<std::uint32_t>>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({dim, da, db});
    if (it != cache.end()) return it->second;
  }
  auto A = IndexSpace::get(dim, da);
  auto B = IndexSpace::get(dim, db);
  auto C = IndexSpace::get(dim, da + db);
  auto table = std::make_shared<std::vector<std::uint32_t>>(A->size() * B->size());
  std::vector<int> merged(da + db);
  for (std::size_t ra = 0; ra < A->size(); ++ra) {
    const std::uint16_t* ia = A->index(ra);
    for (std::size_t rb = 0; rb < B->size(); ++rb) {
      const std::uint16_t* ib = B->index(rb);
      std::merge(ia, ia + da, ib, ib + db, merged.begin());
      (*table)[ra * B->size() + rb] = static_cast<std::uint32_t>(C->rank(merged));
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(std::make_tuple(dim, da, db), std::move(table));
  return it->second;
}

}  // namespace chrono_duhamel
