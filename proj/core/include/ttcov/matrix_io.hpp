#pragma once

#include "ttcov/synthgen.hpp"
#include "ttcov/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ttcov {

/// Writes `content` to a temporary sibling file and renames it over `path`,
/// so readers never observe a partial file. Throws IoError.
void atomic_write(const std::filesystem::path& path, std::string_view content);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Plain-text matrix: a "rows cols" header line, then one line per row with
/// 17 significant digits.
[[nodiscard]] std::string format_matrix(const Matrix& m);
[[nodiscard]] Matrix parse_matrix(std::string_view text);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
/// Throws IoError when unreadable and DataError when malformed or non-finite.
[[nodiscard]] Matrix read_matrix(const std::filesystem::path& path);

inline constexpr int kGroundTruthSchema = 1;

[[nodiscard]] std::string ground_truth_to_json(const GroundTruth& gt);
[[nodiscard]] GroundTruth ground_truth_from_json(std::string_view text);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);
[[nodiscard]] GroundTruth read_ground_truth(const std::filesystem::path& path);

/// 64-bit FNV-1a over the raw bytes of the entries.
[[nodiscard]] std::uint64_t data_hash(const Matrix& m);
[[nodiscard]] std::uint64_t data_hash(const Tensor3& t);

/// %.17g formatting.
[[nodiscard]] std::string format_double(double v);

}  // namespace ttcov
