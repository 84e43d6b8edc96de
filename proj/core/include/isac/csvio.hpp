// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_CSVIO_HPP
#define ISAC_CSVIO_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace isac {

/// Formats with enough digits to identify the double exactly (artifact files
/// that get read back).
std::string fmt_exact(double v);

/// Shorter fixed-significance formatting for metric columns.
std::string fmt_metric(double v);

/// CSV emitter: a schema comment line, a mandatory header row, then data
/// rows. Content goes to a temporary file that is atomically renamed into
/// place on commit; an uncommitted writer leaves nothing behind.
class CsvWriter {
  public:
    CsvWriter(std::filesystem::path path, std::string schema,
              const std::vector<std::string>& header);
    ~CsvWriter();

    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);
    void commit();

  private:
    std::filesystem::path path_;
    std::filesystem::path temp_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    bool committed_ = false;
};

/// Reads a waveform artifact (schema isac-waveform-v1) back into memory.
Eigen::VectorXcd read_waveform_csv(const std::filesystem::path& path);

}  // namespace isac

#endif
