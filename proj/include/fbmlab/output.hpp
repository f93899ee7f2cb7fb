#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fbmlab {

/// Collects result files in a staging directory under `dir` and moves each
/// into place with a rename on commit(), so `dir` only ever holds complete
/// files. Destruction without commit() discards the staged files.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::filesystem::path dir);
  ~AtomicOutput();
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;

  void write(const std::string& name, std::string_view content);
  void commit();
  void discard();

  const std::filesystem::path& directory() const { return dir_; }
  const std::vector<std::string>& files() const { return names_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path staging_;
  std::vector<std::string> names_;
  bool open_ = true;
};

/// Writes a single file through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& file, std::string_view content);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace fbmlab
