#include "greenbench/jsonio.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "greenbench/errors.hpp"

namespace greenbench {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(Errc::io, "read failed for '" + path.string() + "'");
    return buf.str();
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(Errc::parse, origin + ": " + e.what());
    }
}

nlohmann::json parse_json_file(const fs::path& path) {
    return parse_json_text(read_file(path), path.string());
}

std::string canonical_dump(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) fail(Errc::io, "cannot create directory '" + path.parent_path().string() + "'");
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::io, "cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(Errc::io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(Errc::io, "cannot rename into place: '" + path.string() + "'");
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, value);
    return std::string(buf, 16);
}

std::string double_to_string(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) fail(Errc::internal, "double formatting failed");
    return std::string(buf, ptr);
}

std::string format_sig4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%#.4g", value);
    std::string s(buf);
    // %# leaves a dangling point when the four digits land left of it.
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace greenbench
