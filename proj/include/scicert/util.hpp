#pragma once

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scicert {

// Warnings go to stderr; callers that care about counts use WarningCounter.
inline void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }
inline void info(const std::string& msg) { std::cerr << "info: " << msg << "\n"; }

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::vector<std::string> read_lines(const std::string& path);

// FNV-1a, used for stage-manifest input hashing.
std::uint64_t fnv1a(const std::string& data);
std::uint64_t hash_file(const std::string& path);

std::vector<std::string> split(const std::string& s, char delim);
std::string trim(const std::string& s);
std::string lower(const std::string& s);
std::vector<std::string> tokenize_words(const std::string& s);

// Shortest round-trip decimal form, stable across runs.
std::string fmt_double(double v);

std::optional<double> parse_double(const std::string& s);
std::optional<long> parse_long(const std::string& s);

// Chunked parallel map into a preallocated result vector; output independent
// of worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace scicert
