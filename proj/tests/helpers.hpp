#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "statedup/dom.hpp"
#include "statedup/hashing.hpp"

// Shared test utilities.  TEST_DATA_DIR is injected by the build.

namespace testutil {

inline statedup::DomSequence seq(std::initializer_list<const char*> tokens) {
    statedup::DomSequence s;
    for (const char* t : tokens) s.elements.emplace_back(t);
    return s;
}

inline statedup::HtmlDocument doc(std::string id, std::string html) {
    return statedup::HtmlDocument{std::move(id), std::move(html), std::nullopt};
}

inline std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(TEST_DATA_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Scratch directory wiped on construction and destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() / ("statedup_test_" + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

// Deterministic 64-bit stream for test inputs, independent of the library's
// production draw order.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() { return statedup::hashing::splitmix64(state_); }
    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

}  // namespace testutil
