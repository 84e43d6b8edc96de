// SPDX-License-Identifier: Apache-2.0

#include "isac/csvio.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace isac {

std::string fmt_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_metric(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path, std::string schema,
                     const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
    if (header.empty()) throw std::invalid_argument("CsvWriter: header row is mandatory");
    temp_ = path_;
    temp_ += ".tmp";
    if (!path_.parent_path().empty()) std::filesystem::create_directories(path_.parent_path());
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + temp_.string());
    out_ << "# schema: " << schema << "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "");
    out_ << "\n";
}

CsvWriter::~CsvWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
        throw std::invalid_argument("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < fields.size(); ++i)
        out_ << fields[i] << (i + 1 < fields.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::commit() {
    out_.flush();
    out_.close();
    if (!out_) throw std::runtime_error("CsvWriter: write failed for " + temp_.string());
    std::filesystem::rename(temp_, path_);
    committed_ = true;
}

Eigen::VectorXcd read_waveform_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open waveform file " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# schema: isac-waveform-v1", 0) != 0)
        throw std::runtime_error(path.string() + ": not an isac-waveform-v1 file");
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header");
    std::vector<std::complex<double>> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string idx, re, im;
        if (!std::getline(row, idx, ',') || !std::getline(row, re, ',') ||
            !std::getline(row, im))
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        values.emplace_back(std::stod(re), std::stod(im));
    }
    Eigen::VectorXcd s(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) s(static_cast<Eigen::Index>(i)) = values[i];
    return s;
}

}  // namespace isac
