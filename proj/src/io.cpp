#include "nss/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace nss::io {
namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw NssError("truncated-file", "unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_header(std::ostream& out, const FieldHeader& h) {
  put(out, h.format_version);
  put(out, h.n);
  put(out, h.length);
  put(out, h.epsilon);
  put(out, h.A);
  put(out, h.t);
  put(out, h.step_index);
  put(out, h.stage_index);
}

FieldHeader get_header(std::istream& in) {
  FieldHeader h;
  h.format_version = get<std::uint32_t>(in);
  if (h.format_version != kFormatVersion) {
    throw NssError("version-mismatch", "unsupported file format version " +
                                           std::to_string(h.format_version));
  }
  h.n = get<std::uint32_t>(in);
  h.length = get<double>(in);
  h.epsilon = get<double>(in);
  h.A = get<double>(in);
  h.t = get<double>(in);
  h.step_index = get<std::int64_t>(in);
  h.stage_index = get<std::int64_t>(in);
  return h;
}

void put_field(std::ostream& out, const RealField2D& f) {
  for (double v : f.values()) put(out, v);
}

RealField2D get_field(std::istream& in, const GridSpec& grid) {
  RealField2D f(grid);
  for (double& v : f.values()) v = get<double>(in);
  return f;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NssError("write-failed", "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NssError("read-failed", "cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw NssError("write-failed", "error while writing " + path.string());
}

void expect_end(std::ifstream& in, const std::filesystem::path& path) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw NssError("corrupt-file", "trailing bytes in " + path.string());
  }
}

}  // namespace

FieldHeader FieldHeader::make(const ModelParams& params, const HistoryWindow& window, int stage) {
  FieldHeader h;
  h.n = static_cast<std::uint32_t>(window.grid().n);
  h.length = window.grid().length;
  h.epsilon = params.epsilon;
  h.A = params.A;
  h.t = window.time;
  h.step_index = window.step_index;
  h.stage_index = stage;
  return h;
}

void write_checkpoint(const std::filesystem::path& path, const FieldHeader& header,
                      const HistoryWindow& window) {
  if (header.n != static_cast<std::uint32_t>(window.grid().n)) {
    throw NssError("grid-mismatch", "checkpoint header N disagrees with the fields");
  }
  auto out = open_out(path);
  put_header(out, header);
  put_field(out, window.u_n);
  put_field(out, window.u_nm1);
  put_field(out, window.u_nm2);
  finish(out, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  auto in = open_in(path);
  Checkpoint c;
  c.header = get_header(in);
  const GridSpec grid(static_cast<int>(c.header.n), c.header.length);
  c.window.u_n = get_field(in, grid);
  c.window.u_nm1 = get_field(in, grid);
  c.window.u_nm2 = get_field(in, grid);
  c.window.time = c.header.t;
  c.window.step_index = c.header.step_index;
  expect_end(in, path);
  return c;
}

void write_snapshot(const std::filesystem::path& path, const FieldHeader& header,
                    const RealField2D& field) {
  auto out = open_out(path);
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put_header(out, header);
  put_field(out, field);
  finish(out, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  char magic[sizeof kSnapshotMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0) {
    throw NssError("bad-magic", path.string() + " is not a field snapshot");
  }
  Snapshot s;
  s.header = get_header(in);
  s.field = get_field(in, GridSpec(static_cast<int>(s.header.n), s.header.length));
  expect_end(in, path);
  return s;
}

void write_text_matrix(const std::filesystem::path& path, const RealField2D& field) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw NssError("write-failed", "cannot open " + path.string() + " for writing");
  char buf[32];
  for (int i = 0; i < field.n(); ++i) {
    for (int j = 0; j < field.n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", field(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw NssError("write-failed", "error while writing " + path.string());
}

}  // namespace nss::io
