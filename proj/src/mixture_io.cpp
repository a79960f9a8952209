#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gmf/format.hpp"
#include "gmf/mixture.hpp"

namespace gmf {
namespace {

constexpr std::array<char, 4> kMagic{'G', 'M', 'F', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) {
    throw IngestError(0, "binary snapshot truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t comma = std::min(line.find(',', start), line.size());
    values.push_back(parse_double(std::string_view(line).substr(start, comma - start), line_no));
    start = comma + 1;
  }
  return values;
}

}  // namespace

void write_mixture_csv(std::ostream& out, const GaussianMixtured& mix) {
  const Eigen::Index n = mix.dim();
  out << "weight";
  for (Eigen::Index i = 0; i < n; ++i) {
    out << ",m" << i;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out << ",c" << r << c;
    }
  }
  out << '\n';
  for (const auto& comp : mix) {
    out << format_double(comp.weight);
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',' << format_double(comp.mean[i]);
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        out << ',' << format_double(comp.cov(r, c));
      }
    }
    out << '\n';
  }
}

GaussianMixtured read_mixture_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IngestError(1, "missing header");
  }
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
  // columns = 1 + n + n^2
  Eigen::Index dim = 0;
  while (static_cast<std::size_t>(1 + dim + dim * dim) < columns) {
    ++dim;
  }
  if (static_cast<std::size_t>(1 + dim + dim * dim) != columns || line.rfind("weight", 0) != 0) {
    throw IngestError(1, "header does not describe a mixture snapshot");
  }
  GaussianMixtured mix;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto values = parse_row(line, line_no);
    if (values.size() != columns) {
      throw IngestError(line_no, "expected " + std::to_string(columns) + " fields");
    }
    GaussianComponentd comp{Vector(dim), Matrix(dim, dim), values[0]};
    for (Eigen::Index i = 0; i < dim; ++i) {
      comp.mean[i] = values[static_cast<std::size_t>(1 + i)];
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        comp.cov(r, c) = values[static_cast<std::size_t>(1 + dim + r * dim + c)];
      }
    }
    mix.push_back(std::move(comp));
  }
  return mix;
}

void write_mixture_binary(std::ostream& out, const GaussianMixtured& mix) {
  const auto n = static_cast<std::uint32_t>(mix.dim());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, n);
  put_le<std::uint64_t>(out, mix.size());
  for (const auto& comp : mix) {
    put_le<double>(out, comp.weight);
    for (std::uint32_t i = 0; i < n; ++i) {
      put_le<double>(out, comp.mean[i]);
    }
    for (std::uint32_t r = 0; r < n; ++r) {
      for (std::uint32_t c = 0; c < n; ++c) {
        put_le<double>(out, comp.cov(r, c));
      }
    }
  }
}

GaussianMixtured read_mixture_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IngestError(0, "not a GMFS snapshot");
  }
  if (const auto version = get_le<std::uint32_t>(in); version != kVersion) {
    throw IngestError(0, "unsupported snapshot version " + std::to_string(version));
  }
  const auto n = static_cast<Eigen::Index>(get_le<std::uint32_t>(in));
  const auto count = get_le<std::uint64_t>(in);
  GaussianMixtured mix;
  for (std::uint64_t k = 0; k < count; ++k) {
    GaussianComponentd comp{Vector(n), Matrix(n, n), get_le<double>(in)};
    for (Eigen::Index i = 0; i < n; ++i) {
      comp.mean[i] = get_le<double>(in);
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        comp.cov(r, c) = get_le<double>(in);
      }
    }
    mix.push_back(std::move(comp));
  }
  return mix;
}

}  // namespace gmf
