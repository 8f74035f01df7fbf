#include "ssep2d/harness/io.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>
#include <system_error>

#include "ssep2d/errors.hpp"

namespace ssep2d::harness {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf, end);
}

CsvWriter::CsvWriter(const fs::path& path, const std::string& config_hash,
                     std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), path_(path), columns_(header.size()) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << "# config_hash=" << config_hash << '\n';
    for (auto h : header) cell(h);
    end_row();
}

void CsvWriter::separator() {
    if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double v) {
    separator();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    out_ << text;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw Error(path_.string() + ": row has wrong number of cells");
    out_ << '\n';
    filled_ = 0;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw Error("write failed: " + path_.string());
}

namespace {

bool parse_number(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

RadialDensity read_density_csv(const fs::path& path, double alpha) {
    std::ifstream in(path);
    if (!in) throw ConfigError("rate.file", "cannot open " + path.string());
    RadialDensity d;
    d.alpha = alpha;
    std::string line;
    std::size_t lineno = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        const auto comma = line.find(',');
        double r = 0.0, m = 0.0;
        const bool ok = comma != std::string::npos &&
                        line.find(',', comma + 1) == std::string::npos &&
                        parse_number(std::string_view(line).substr(0, comma), r) &&
                        parse_number(std::string_view(line).substr(comma + 1), m);
        if (!ok) {
            if (header_allowed && comma != std::string::npos) {
                header_allowed = false;
                continue;
            }
            throw ConfigError("rate.file",
                              path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        header_allowed = false;
        d.r.push_back(r);
        d.m.push_back(m);
    }
    try {
        d.validate();
    } catch (const DomainError& e) {
        throw ConfigError("rate.file", path.string() + ": " + e.what());
    }
    d.alpha_extended = d.is_alpha_extended();
    return d;
}

RunDirectory::RunDirectory(fs::path final_path) : final_(std::move(final_path)) {
    staging_ = final_;
    staging_ += ".partial";
    std::error_code ec;
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_);
}

RunDirectory::~RunDirectory() {
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

void RunDirectory::commit() {
    std::error_code ec;
    fs::remove_all(final_, ec);
    fs::rename(staging_, final_);
    committed_ = true;
}

fs::path resolve_output(const std::string& flag, const std::string& configured,
                        const std::string& fallback) {
    if (!flag.empty()) return fs::path(flag);
    fs::path p = !configured.empty() ? fs::path(configured) : fs::path(fallback);
    if (p.is_absolute()) return p;
    const char* root = std::getenv(kOutputRootVariable);
    return fs::path(root && *root ? root : "runs") / p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace ssep2d::harness
