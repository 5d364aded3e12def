#ifndef ILLUMINATI_IO_HPP
#define ILLUMINATI_IO_HPP

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace illuminati::io {

inline bool is_gzip_path(const std::filesystem::path& path) { return path.extension() == ".gz"; }

/// Reads a whole file; paths ending in .gz are inflated.
inline std::string read_file(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::io_error, "no such file: " + path.string());
    if (is_gzip_path(path)) {
        gzFile in = gzopen(path.c_str(), "rb");
        if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
        std::string out;
        char buf[1 << 16];
        int got = 0;
        while ((got = gzread(in, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
        const bool failed = got < 0;
        gzclose(in);
        if (failed) throw Error(ErrorCode::parse_error, "corrupt gzip stream in " + path.string());
        return out;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    if (is_gzip_path(path)) {
        gzFile out = gzopen(tmp.c_str(), "wb");
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
        const int wrote = content.empty() ? 0 : gzwrite(out, content.data(), static_cast<unsigned>(content.size()));
        gzclose(out);
        if (wrote != static_cast<int>(content.size())) throw Error(ErrorCode::io_error, "short write " + tmp.string());
    } else {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
        out << content;
        out.close();
        if (!out) throw Error(ErrorCode::io_error, "short write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::io_error, "rename " + tmp.string() + ": " + ec.message());
}

} // namespace illuminati::io

#endif // ILLUMINATI_IO_HPP
