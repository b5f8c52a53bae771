#include "ttcov/matrix_io.hpp"

#include "ttcov/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace ttcov {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Index n, const char* what) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != n) {
    throw DataError(std::string("ground truth: ") + what + " must have " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw DataError(std::string("ground truth: ") + what + " row has wrong length");
    }
    for (Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

std::vector<Matrix> list_from_json(const json& j, const char* key, Index count, Index n) {
  const json& arr = j.at(key);
  if (!arr.is_array() || static_cast<Index>(arr.size()) != count) {
    throw DataError(std::string("ground truth: '") + key + "' must hold " + std::to_string(count) +
                    " matrices");
  }
  std::vector<Matrix> out;
  for (const json& m : arr) out.push_back(matrix_from_json(m, n, key));
  return out;
}

std::uint64_t fnv1a(const double* data, std::size_t count) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_matrix(const Matrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  long long rows = -1;
  long long cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw DataError("matrix file: missing or invalid 'rows cols' header");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) throw DataError("matrix file: expected " + std::to_string(rows * cols) + " entries");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw DataError("matrix file: bad entry '" + tok + "'");
      if (!std::isfinite(v)) throw DataError("matrix file: non-finite entry");
      m(i, j) = v;
    }
  std::string extra;
  if (in >> extra) throw DataError("matrix file: trailing data after the last row");
  return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  atomic_write(path, format_matrix(m));
}

Matrix read_matrix(const std::filesystem::path& path) { return parse_matrix(read_file(path)); }

std::string ground_truth_to_json(const GroundTruth& gt) {
  gt.validate();
  json j;
  j["schema_version"] = kGroundTruthSchema;
  j["shape"] = {gt.shape.p, gt.shape.q, gt.shape.r};
  j["J"] = gt.rank_j();
  j["K"] = gt.rank_k();
  j["seed"] = gt.seed;
  auto list = [](const std::vector<Matrix>& ms) {
    json arr = json::array();
    for (const Matrix& m : ms) arr.push_back(matrix_to_json(m));
    return arr;
  };
  j["a"] = list(gt.a);
  j["b"] = list(gt.b);
  j["c"] = list(gt.c);
  return j.dump() + "\n";
}

GroundTruth ground_truth_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != kGroundTruthSchema) {
      throw DataError("ground truth: unsupported schema_version");
    }
    GroundTruth gt;
    const json& shape = j.at("shape");
    if (!shape.is_array() || shape.size() != 3) throw DataError("ground truth: shape must be [p, q, r]");
    gt.shape = {shape[0].get<Index>(), shape[1].get<Index>(), shape[2].get<Index>()};
    gt.shape.validate();
    const Index jj = j.at("J").get<Index>();
    const Index kk = j.at("K").get<Index>();
    if (jj < 1 || kk < 1) throw DataError("ground truth: J and K must be >= 1");
    gt.seed = j.at("seed").get<std::uint64_t>();
    gt.a = list_from_json(j, "a", jj, gt.shape.p);
    gt.b = list_from_json(j, "b", jj * kk, gt.shape.q);
    gt.c = list_from_json(j, "c", kk, gt.shape.r);
    return gt;
  } catch (const json::exception& e) {
    throw DataError(std::string("ground truth: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("ground truth: ") + e.what());
  }
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  atomic_write(path, ground_truth_to_json(gt));
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  return ground_truth_from_json(read_file(path));
}

std::uint64_t data_hash(const Matrix& m) {
  return fnv1a(m.data(), static_cast<std::size_t>(m.size()));
}

std::uint64_t data_hash(const Tensor3& t) { return fnv1a(t.data().data(), t.data().size()); }

}  // namespace ttcov
