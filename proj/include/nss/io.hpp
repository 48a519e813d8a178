#pragma once

#include <cstdint>
#include <filesystem>

#include "nss/grid.hpp"
#include "nss/model.hpp"
#include "nss/stepper.hpp"

namespace nss::io {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr char kSnapshotMagic[8] = {'N', 'S', 'S', 'F', 'L', 'D', '0', '1'};

/// Binary layout (little-endian, 56 bytes):
///   u32 format_version, u32 N, f64 L, f64 epsilon, f64 A, f64 t,
///   i64 step_index, i64 stage_index
struct FieldHeader {
  std::uint32_t format_version = kFormatVersion;
  std::uint32_t n = 0;
  double length = 0.0;
  double epsilon = 0.0;
  double A = 0.0;
  double t = 0.0;
  std::int64_t step_index = 0;
  std::int64_t stage_index = 0;

  static FieldHeader make(const ModelParams& params, const HistoryWindow& window, int stage);
};

struct Checkpoint {
  FieldHeader header;
  HistoryWindow window;
};

struct Snapshot {
  FieldHeader header;
  RealField2D field;
};

/// Header followed by u^n, u^{n-1}, u^{n-2} as row-major float64.
void write_checkpoint(const std::filesystem::path& path, const FieldHeader& header,
                      const HistoryWindow& window);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// "NSSFLD01", header, one row-major float64 field.
void write_snapshot(const std::filesystem::path& path, const FieldHeader& header,
                    const RealField2D& field);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Whitespace-separated N x N matrix, one grid row per line.
void write_text_matrix(const std::filesystem::path& path, const RealField2D& field);

}  // namespace nss::io
