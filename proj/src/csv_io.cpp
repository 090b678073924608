#include "shearmix/csv_io.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace shearmix {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw std::runtime_error("cannot open for writing: " + path);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(static_cast<std::FILE*>(f_));
}

void CsvWriter::write(const std::string& s) {
    if (std::fwrite(s.data(), 1, s.size(), static_cast<std::FILE*>(f_)) != s.size())
        throw std::runtime_error("write failed: " + path_);
}

void CsvWriter::line(const std::string& text) { write(text + "\n"); }

void CsvWriter::row(std::initializer_list<double> vals) {
    std::string s;
    bool first = true;
    for (double v : vals) {
        if (!first) s += ',';
        s += fmt_double(v);
        first = false;
    }
    s += '\n';
    write(s);
}

void CsvWriter::kv(const std::string& key, double value) {
    write(key + "," + fmt_double(value) + "\n");
}

void CsvWriter::kv(const std::string& key, const std::string& value) {
    write(key + "," + value + "\n");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory: " + dir);
}

} // namespace shearmix
