#pragma once

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

namespace rekom::testing {

/// Fresh directory named after the running test, removed on scope exit.
class TempDir {
 public:
  TempDir() : TempDir(current_test_name()) {}
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("rekom-" + name);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static std::string current_test_name() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    return std::string(info->test_suite_name()) + "-" + info->name();
  }

  std::filesystem::path path_;
};

}  // namespace rekom::testing
