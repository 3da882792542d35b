#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>

namespace aiready {

/// Byte-range reads used by every component that touches dataset files. The
/// indirection lets tests count or fail reads.
class FileReader {
 public:
  virtual ~FileReader() = default;

  /// Reads up to `max_bytes` starting at `offset`. Short reads mean EOF.
  /// Throws Error(PermissionDenied) when the file cannot be opened.
  virtual std::string read(const std::filesystem::path& path, std::uint64_t offset,
                           std::size_t max_bytes) = 0;
};

class DiskReader final : public FileReader {
 public:
  std::string read(const std::filesystem::path& path, std::uint64_t offset,
                   std::size_t max_bytes) override;
};

/// Forwards to another reader and tallies bytes returned.
class CountingReader final : public FileReader {
 public:
  explicit CountingReader(FileReader& inner) : inner_(inner) {}

  std::string read(const std::filesystem::path& path, std::uint64_t offset,
                   std::size_t max_bytes) override;

  std::uint64_t bytes_read() const { return bytes_.load(); }
  std::uint64_t calls() const { return calls_.load(); }

 private:
  FileReader& inner_;
  std::atomic<std::uint64_t> bytes_{0};
  std::atomic<std::uint64_t> calls_{0};
};

/// Process-wide disk reader.
FileReader& default_reader();

/// Total bytes returned by every DiskReader in this process.
std::uint64_t process_bytes_read();

}  // namespace aiready
