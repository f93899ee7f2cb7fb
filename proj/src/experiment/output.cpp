#include "fbmlab/output.hpp"

#include <cstdio>
#include <fstream>

#include "fbmlab/error.hpp"

namespace fbmlab {

namespace fs = std::filesystem;

namespace {

void write_plain(const fs::path& file, std::string_view content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error("cannot write " + file.string());
}

}  // namespace

AtomicOutput::AtomicOutput(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  staging_ = dir_ / ".staging";
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

AtomicOutput::~AtomicOutput() {
  if (open_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void AtomicOutput::write(const std::string& name, std::string_view content) {
  if (!open_) throw Error("output already committed");
  if (name.empty() || name.find('/') != std::string::npos || name[0] == '.') {
    throw Error("invalid output file name '" + name + "'");
  }
  write_plain(staging_ / name, content);
  names_.push_back(name);
}

void AtomicOutput::commit() {
  if (!open_) return;
  for (const auto& name : names_) fs::rename(staging_ / name, dir_ / name);
  fs::remove_all(staging_);
  open_ = false;
}

void AtomicOutput::discard() {
  if (!open_) return;
  fs::remove_all(staging_);
  names_.clear();
  open_ = false;
}

void write_file_atomic(const fs::path& file, std::string_view content) {
  fs::path tmp = file;
  tmp += ".tmp";
  write_plain(tmp, content);
  fs::rename(tmp, file);
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fbmlab
