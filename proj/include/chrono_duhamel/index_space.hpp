#ifndef CHRONO_DUHAMEL_INDEX_SPACE_HPP
#define CHRONO_DUHAMEL_INDEX_SPACE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace chrono_duhamel {

/// Canonical multi-indices of a symmetric tensor: nondecreasing sequences
/// (a_1 <= ... <= a_p) with entries in [0, dim), in lexicographic order.
///
/// Example, dim=2, degree=2: ranks 0,1,2 are (0,0), (0,1), (1,1) with
/// multiplicities 1, 2, 1.
class IndexSpace {
 public:
  /// Shared immutable instance; built once per (dim, degree).
  static std::shared_ptr<const IndexSpace> get(int dim, int degree);

  IndexSpace(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return size_; }

  /// Pointer to the `degree` entries of the multi-index with this rank.
  const std::uint16_t* index(std::size_t rank) const { return &indices_[rank * degree_]; }
  /// Number of distinct orderings, p! / prod(count_i!).
  double multiplicity(std::size_t rank) const { return multiplicity_[rank]; }
  const std::vector<double>& multiplicities() const { return multiplicity_; }

  /// Rank of a nondecreasing multi-index.
  std::size_t rank(std::span<const int> sorted) const;

  /// Rank of sort(beta + {a}), where beta is a rank in the (degree-1) space.
  std::size_t insert(std::size_t beta_rank, int a) const {
    return insert_[beta_rank * dim_ + a];
  }

 private:
  int dim_;
  int degree_;
  std::size_t size_;
  std::vector<std::uint16_t> indices_;
  std::vector<double> multiplicity_;
  std::vector<std::uint32_t> insert_;
};

/// Number of nondecreasing multi-indices: C(dim+degree-1, degree).
std::size_t symmetric_size(int dim, int degree);

/// table[ra * size(db) + rb] = rank of the merged multi-index in degree da+db.
/// Cached per (dim, da, db).
std::shared_ptr<const std::vector<std::uint32_t>> product_table(int dim, int da, int db);

}  // namespace chrono_duhamel

#endif
