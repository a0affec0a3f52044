#include "chrono_duhamel/tensor_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chrono_duhamel {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
bool get_le(std::istream& in, T& value) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (in.gcount() == 0 && in.eof()) return false;
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw std::runtime_error("tensor file: truncated record");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

void check_header(std::int64_t degree, std::int64_t dim, std::int64_t codim) {
  if (degree < 0 || degree > 64 || dim < 1 || dim > 4096 || codim < 1 || codim > 4096)
    throw std::runtime_error(fmt::format("tensor file: implausible header ({}, {}, {})", degree, dim, codim));
}

}  // namespace

void write_tensor_binary(std::ostream& out, const SymTensor& t) {
  put_le<std::int64_t>(out, t.degree());
  put_le<std::int64_t>(out, t.dim());
  put_le<std::int64_t>(out, t.codomain_dim());
  for (double c : t.coeffs()) put_le<double>(out, c);
}

bool read_tensor_binary(std::istream& in, SymTensor& t) {
  std::int64_t degree = 0, dim = 0, codim = 0;
  if (!get_le(in, degree)) return false;
  if (!get_le(in, dim) || !get_le(in, codim)) throw std::runtime_error("tensor file: truncated header");
  check_header(degree, dim, codim);
  SymTensor out(static_cast<int>(degree), static_cast<int>(dim), static_cast<int>(codim));
  for (double& c : out.coeffs())
    if (!get_le(in, c)) throw std::runtime_error("tensor file: truncated coefficients");
  t = std::move(out);
  return true;
}

void write_tensor_text(std::ostream& out, const SymTensor& t) {
  out << fmt::format("tensor {} {} {}\n", t.degree(), t.dim(), t.codomain_dim());
  for (std::size_t r = 0; r < t.size(); ++r) {
    std::string line;
    for (int j = 0; j < t.degree(); ++j) line += fmt::format("{} ", t.space().index(r)[j]);
    for (int i = 0; i < t.codomain_dim(); ++i) line += fmt::format("{:.17g}{}", t.entry(i, r), i + 1 < t.codomain_dim() ? " " : "");
    out << line << '\n';
  }
}

bool read_tensor_text(std::istream& in, SymTensor& t) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream hs(line);
    std::string tag;
    std::int64_t degree = 0, dim = 0, codim = 0;
    if (!(hs >> tag >> degree >> dim >> codim) || tag != "tensor")
      throw std::runtime_error("tensor text: expected 'tensor <degree> <dim> <codomain_dim>', got: " + line);
    check_header(degree, dim, codim);
    SymTensor out(static_cast<int>(degree), static_cast<int>(dim), static_cast<int>(codim));
    for (std::size_t r = 0; r < out.size(); ++r) {
      if (!std::getline(in, line)) throw std::runtime_error("tensor text: truncated record");
      std::istringstream rs(line);
      std::vector<int> idx(degree);
      for (auto& a : idx) rs >> a;
      if (!rs) throw std::runtime_error("tensor text: bad index row: " + line);
      const std::size_t rank = out.space().rank(idx);
      for (int i = 0; i < codim; ++i) {
        double v = 0;
        if (!(rs >> v)) throw std::runtime_error("tensor text: missing entry: " + line);
        out.entry(i, rank) = v;
      }
    }
    t = std::move(out);
    return true;
  }
  return false;
}

std::vector<SymTensor> load_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tensor file: " + path);
  char first = 0;
  in.get(first);
  in.unget();
  std::vector<SymTensor> out;
  SymTensor t;
  if (first == 't' || first == '#') {
    while (read_tensor_text(in, t)) out.push_back(t);
  } else {
    while (read_tensor_binary(in, t)) out.push_back(t);
  }
  return out;
}

void save_tensors_binary(const std::string& path, const std::vector<SymTensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write tensor file: " + path);
  for (const auto& t : tensors) write_tensor_binary(out, t);
}

SymFunctional load_functional(const std::string& path, int max_degree) {
  std::vector<SymTensor> ts = load_tensors(path);
  if (ts.empty()) throw std::runtime_error("tensor file holds no records: " + path);
  SymFunctional f(ts[0].dim(), ts[0].codomain_dim(), max_degree);
  for (auto& t : ts) {
    if (t.degree() > max_degree)
      throw std::runtime_error(fmt::format("tensor file: degree {} exceeds cap {}", t.degree(), max_degree));
    if (f.has_term(t.degree())) {
      f.term_mut(t.degree()) += t;
    } else {
      f.set_term(std::move(t));
    }
  }
  return f;
}

}  // namespace chrono_duhamel
