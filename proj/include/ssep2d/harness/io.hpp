#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "ssep2d/radial_density.hpp"

namespace ssep2d::harness {

inline constexpr const char* kOutputRootVariable = "SSEP2D_OUTPUT_ROOT";

// Shortest text that round-trips at 17 significant digits, independent of locale.
std::string format_double(double v);

// Comma-separated file whose first line is "# config_hash=<hash>".
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
              std::initializer_list<std::string_view> header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::int64_t v);
    CsvWriter& cell(std::uint64_t v);
    CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
    CsvWriter& cell(std::string_view text);
    void end_row();
    void close();

private:
    void separator();
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

// Two numeric columns (r, m); an optional header and '#' comment lines are
// skipped. Throws ConfigError on anything else.
RadialDensity read_density_csv(const std::filesystem::path& path, double alpha);

// Output directory written under "<name>.partial" and renamed into place on
// commit; an uncommitted directory is removed on destruction.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path final_path);
    ~RunDirectory();
    RunDirectory(const RunDirectory&) = delete;
    RunDirectory& operator=(const RunDirectory&) = delete;

    const std::filesystem::path& staging() const { return staging_; }
    const std::filesystem::path& destination() const { return final_; }
    std::filesystem::path file(const std::string& name) const { return staging_ / name; }
    void commit();

private:
    std::filesystem::path final_;
    std::filesystem::path staging_;
    bool committed_ = false;
};

// --out verbatim when given. Otherwise the config's output entry or the
// fallback name, relative ones placed under $SSEP2D_OUTPUT_ROOT (default "runs").
std::filesystem::path resolve_output(const std::string& flag, const std::string& configured,
                                     const std::string& fallback);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ssep2d::harness
