#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>

#include <unistd.h>

namespace adsurge::io {

/// Output file that only appears at its final path once commit() succeeds.
/// Writes go to a sibling temp file which is renamed over the target. The
/// path "-" writes straight to stdout.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::filesystem::path target) : target_(std::move(target)) {
    if (target_ == "-") return;
    tmp_ = target_;
    tmp_ += ".tmp." + std::to_string(::getpid());
    file_ = std::make_unique<std::ofstream>(tmp_, std::ios::binary | std::ios::trunc);
    if (!*file_) throw std::runtime_error("cannot open '" + tmp_.string() + "' for writing");
  }

  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;

  ~AtomicOutput() {
    if (file_ && !committed_) {
      file_->close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }

  void commit() {
    if (!file_) {
      std::cout.flush();
      committed_ = true;
      return;
    }
    file_->flush();
    if (!*file_) throw std::runtime_error("write failed for '" + tmp_.string() + "'");
    file_->close();
    std::filesystem::rename(tmp_, target_);
    committed_ = true;
  }

 private:
  std::filesystem::path target_;
  std::filesystem::path tmp_;
  std::unique_ptr<std::ofstream> file_;
  bool committed_ = false;
};

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace adsurge::io
