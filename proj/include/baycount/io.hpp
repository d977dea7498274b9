#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "baycount/count_model.hpp"
#include "baycount/gibbs.hpp"
#include "baycount/model_selection.hpp"

namespace baycount::io {

/// Version written into, and required from, every file this library reads.
inline constexpr int kSchemaVersion = 1;

enum class CountFormat { kTsv, kMatrixMarket };

CountFormat parse_count_format(std::string_view name);

/// Malformed or unsupported input. The message names the file and location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// TSV: optional "# baycount.counts v1" line, then a header row whose first
/// cell is the corner label and the rest sample ids, then one row per gene.
/// Matrix Market: coordinate integer general, 1-based entries; gene and
/// sample ids come from `<path>.genes` and `<path>.samples` when present.
CountMatrix read_counts(const std::filesystem::path& path, CountFormat format);
void write_counts(const std::filesystem::path& path, const CountMatrix& y, CountFormat format);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// %.17g
std::string format_real(double x);

/// "# baycount.<name> v<version>"
std::string schema_line(std::string_view name);

/// Real matrix as CSV with a schema line, a header and one row per
/// matrix row.
std::string matrix_csv(std::string_view schema, std::string_view corner,
                       std::span<const std::string> row_ids,
                       std::span<const std::string> col_ids, const Eigen::MatrixXd& m);

/// Table columns K, loglik_mean, ci_lo, ci_hi, delta2 (empty at the grid ends).
std::string selection_csv(const SelectionReport& report);
SelectionReport parse_selection_csv(std::string_view text);

/// A chain together with the identifiers of the data it was fitted to.
struct StoredChain {
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;
  ChainOutput chain;
};

/// JSON Lines: a header object, one object per kept iteration (with the
/// full state when draws are stored) and a closing moments object. Timing
/// and thread count are not written.
std::string chain_jsonl(const ChainOutput& chain, const CountMatrix& y);
StoredChain parse_chain_jsonl(std::string_view text);

void write_chain(const std::filesystem::path& path, const ChainOutput& chain,
                 const CountMatrix& y);
StoredChain read_chain(const std::filesystem::path& path);

std::string loglik_csv(const ChainOutput& chain);

std::string read_text(const std::filesystem::path& path);

}  // namespace baycount::io
