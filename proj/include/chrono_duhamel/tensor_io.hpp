#ifndef CHRONO_DUHAMEL_TENSOR_IO_HPP
#define CHRONO_DUHAMEL_TENSOR_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "chrono_duhamel/multilinear.hpp"

namespace chrono_duhamel {

// Binary record: int64 degree, int64 dim, int64 codomain_dim, then
// codomain_dim * C(dim+degree-1, degree) float64 entries in canonical
// multi-index order, component-major. All little-endian. A file may hold
// several records back to back.
//
// Text record: a line "tensor <degree> <dim> <codomain_dim>" followed by one
// line per canonical multi-index: the indices, then one entry per component.

void write_tensor_binary(std::ostream& out, const SymTensor& t);
/// Returns false at clean end of stream; throws std::runtime_error on a
/// truncated or malformed record.
bool read_tensor_binary(std::istream& in, SymTensor& t);

void write_tensor_text(std::ostream& out, const SymTensor& t);
bool read_tensor_text(std::istream& in, SymTensor& t);

std::vector<SymTensor> load_tensors(const std::string& path);
void save_tensors_binary(const std::string& path, const std::vector<SymTensor>& tensors);

/// Scalar functional assembled from the records of a tensor file.
SymFunctional load_functional(const std::string& path, int max_degree);

}  // namespace chrono_duhamel

#endif
