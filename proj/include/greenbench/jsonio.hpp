#ifndef GREENBENCH_JSONIO_HPP
#define GREENBENCH_JSONIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace greenbench {

/// Parse with file/line/column context on errors (Errc::parse), or Errc::io
/// if the file cannot be read.
nlohmann::json parse_json_file(const std::filesystem::path& path);
nlohmann::json parse_json_text(const std::string& text, const std::string& origin = "<string>");

/// Canonical serialization: two-space indent, keys sorted, trailing newline.
/// parse(canonical_dump(x)) re-dumps byte-identically.
std::string canonical_dump(const nlohmann::json& j);

std::string read_file(const std::filesystem::path& path);
/// Write-then-rename so concurrent readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex16(std::uint64_t value);

/// Shortest decimal form that round-trips to the same double.
std::string double_to_string(double value);
/// Fixed four significant digits, trailing zeros kept ("14.00", "-0.9090").
std::string format_sig4(double value);

}  // namespace greenbench

#endif
