#include "aiready/io.hpp"

#include <fstream>

#include "aiready/error.hpp"

namespace aiready {
namespace {

std::atomic<std::uint64_t> g_bytes_read{0};

}  // namespace

std::string DiskReader::read(const std::filesystem::path& path, std::uint64_t offset,
                             std::size_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::PermissionDenied, "cannot open " + path.string());
  if (offset > 0) {
    in.seekg(static_cast<std::streamoff>(offset));
    if (!in) return {};
  }
  std::string buf(max_bytes, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(max_bytes));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  g_bytes_read += buf.size();
  return buf;
}

std::string CountingReader::read(const std::filesystem::path& path, std::uint64_t offset,
                                 std::size_t max_bytes) {
  ++calls_;
  std::string out = inner_.read(path, offset, max_bytes);
  bytes_ += out.size();
  return out;
}

FileReader& default_reader() {
  static DiskReader reader;
  return reader;
}

std::uint64_t process_bytes_read() { return g_bytes_read.load(); }

}  // namespace aiready
