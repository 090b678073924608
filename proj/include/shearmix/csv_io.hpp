#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace shearmix {

// 17 significant digits: round-trips every finite double bit-exactly
std::string fmt_double(double v);

// Line-oriented CSV writer; '\n' newlines, floats via fmt_double. Throws
// std::runtime_error on I/O failure.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void line(const std::string& text);
    void row(std::initializer_list<double> vals);
    void kv(const std::string& key, double value);
    void kv(const std::string& key, const std::string& value);

  private:
    void write(const std::string& s);
    void* f_ = nullptr;
    std::string path_;
};

// creates missing parents like `mkdir -p`
void ensure_dir(const std::string& dir);

} // namespace shearmix
