#ifndef PAN_CSV_HPP
#define PAN_CSV_HPP

#include <string>
#include <vector>

#include "pan/dataset.hpp"

namespace pan {

// Reads an RFC-4180-style CSV (header row required, '.' decimal separator)
// into an uncentered Dataset. outcome names the Y column; covariates, when
// nonempty, selects and orders the X columns, otherwise every non-outcome
// column is used in file order. Rows with missing or malformed cells are
// rejected with row/column diagnostics.
Dataset ingest_csv(const std::string& path, const std::string& outcome,
                   const std::vector<std::string>& covariates = {});

// Parsed rectangular text form, exposed for tooling.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv_table(const std::string& path);

}  // namespace pan

#endif
