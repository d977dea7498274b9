#include "baycount/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>

#include <json.hpp>

namespace baycount::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kSchemaPrefix = "# baycount.";

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Checks a schema line. Returns false when the line is not one.
bool check_schema(std::string_view line, std::string_view expected, std::string_view comment,
                  const fs::path& path, std::size_t line_no) {
  std::string prefix(comment);
  prefix += " baycount.";
  if (!line.starts_with(prefix)) return false;
  const auto tokens = split_whitespace(line.substr(comment.size()));
  if (tokens.size() != 2 || !tokens[1].starts_with("v")) fail(path, line_no, "malformed schema line");
  const std::string_view name = tokens[0].substr(std::string_view("baycount.").size());
  if (name != expected) {
    fail(path, line_no, "expected schema baycount." + std::string(expected) + ", found " +
                            std::string(tokens[0]));
  }
  int version = 0;
  if (!parse_number(tokens[1].substr(1), version) || version != kSchemaVersion) {
    fail(path, line_no, "unsupported schema version " + std::string(tokens[1]));
  }
  return true;
}

std::vector<std::string> default_ids(std::string_view prefix, Eigen::Index n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 1; i <= n; ++i) ids.push_back(std::string(prefix) + std::to_string(i));
  return ids;
}

CountMatrix build_matrix(const fs::path& path, CountArray values, std::vector<std::string> genes,
                         std::vector<std::string> samples) {
  try {
    return CountMatrix(std::move(values), std::move(genes), std::move(samples));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

CountMatrix read_tsv(const fs::path& path) {
  const std::string text = read_text(path);
  const auto lines = split_lines(text);
  std::size_t at = 0;
  while (at < lines.size() && is_blank(lines[at])) ++at;
  if (at < lines.size()) {
    if (check_schema(lines[at], "counts", "#", path, at + 1)) ++at;
  }
  if (at >= lines.size()) fail(path, at, "missing header row");
  const std::size_t header_line = at + 1;
  const auto header = split(lines[at], '\t');
  if (header.size() < 2) fail(path, header_line, "header has no sample ids");
  std::vector<std::string> samples;
  for (std::size_t c = 1; c < header.size(); ++c) samples.emplace_back(header[c]);
  ++at;

  std::vector<std::string> genes;
  std::vector<std::int64_t> flat;
  for (; at < lines.size(); ++at) {
    if (is_blank(lines[at])) continue;
    const auto cells = split(lines[at], '\t');
    if (cells.size() != header.size()) {
      fail(path, at + 1, "expected " + std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
    }
    genes.emplace_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      std::int64_t v = 0;
      if (!parse_number(cells[c], v)) {
        fail(path, at + 1, "column " + std::to_string(c + 1) + ": not an integer: '" +
                               std::string(cells[c]) + "'");
      }
      if (v < 0) fail(path, at + 1, "column " + std::to_string(c + 1) + ": negative count");
      flat.push_back(v);
    }
  }
  if (genes.empty()) fail(path, header_line, "no gene rows");
  const auto g = static_cast<Eigen::Index>(genes.size());
  const auto s = static_cast<Eigen::Index>(samples.size());
  CountArray values(g, s);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) values(i, j) = flat[static_cast<std::size_t>(i * s + j)];
  }
  return build_matrix(path, std::move(values), std::move(genes), std::move(samples));
}

std::vector<std::string> read_id_file(const fs::path& path, Eigen::Index expected,
                                      std::string_view fallback_prefix) {
  if (!fs::exists(path)) return default_ids(fallback_prefix, expected);
  const std::string text = read_text(path);
  std::vector<std::string> ids;
  for (std::string_view line : split_lines(text)) {
    if (!is_blank(line)) ids.emplace_back(line);
  }
  if (static_cast<Eigen::Index>(ids.size()) != expected) {
    throw ParseError(path.string() + ": expected " + std::to_string(expected) + " ids, found " +
                     std::to_string(ids.size()));
  }
  return ids;
}

fs::path sidecar(const fs::path& path, std::string_view suffix) {
  fs::path out = path;
  out += suffix;
  return out;
}

CountMatrix read_matrix_market(const fs::path& path) {
  const std::string text = read_text(path);
  const auto lines = split_lines(text);
  if (lines.empty()) fail(path, 1, "empty file");
  {
    auto banner = split_whitespace(lines[0]);
    std::vector<std::string> lower;
    for (auto t : banner) {
      std::string s(t);
      std::transform(s.begin(), s.end(), s.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      lower.push_back(std::move(s));
    }
    if (lower.size() != 5 || lower[0] != "%%matrixmarket" || lower[1] != "matrix" ||
        lower[2] != "coordinate" || lower[3] != "integer" || lower[4] != "general") {
      fail(path, 1, "expected '%%MatrixMarket matrix coordinate integer general'");
    }
  }
  std::size_t at = 1;
  for (; at < lines.size(); ++at) {
    if (lines[at].starts_with("%")) {
      check_schema(lines[at], "counts", "%", path, at + 1);
      continue;
    }
    if (!is_blank(lines[at])) break;
  }
  if (at >= lines.size()) fail(path, at, "missing size line");
  const auto size = split_whitespace(lines[at]);
  Eigen::Index rows = 0, cols = 0;
  std::int64_t nnz = 0;
  if (size.size() != 3 || !parse_number(size[0], rows) || !parse_number(size[1], cols) ||
      !parse_number(size[2], nnz) || rows < 1 || cols < 1 || nnz < 0) {
    fail(path, at + 1, "malformed size line");
  }
  CountArray values = CountArray::Zero(rows, cols);
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  std::int64_t entries = 0;
  for (++at; at < lines.size(); ++at) {
    if (is_blank(lines[at]) || lines[at].starts_with("%")) continue;
    const auto tok = split_whitespace(lines[at]);
    Eigen::Index i = 0, j = 0;
    std::int64_t v = 0;
    if (tok.size() != 3 || !parse_number(tok[0], i) || !parse_number(tok[1], j)) {
      fail(path, at + 1, "malformed entry");
    }
    if (!parse_number(tok[2], v)) {
      fail(path, at + 1, "not an integer: '" + std::string(tok[2]) + "'");
    }
    if (i < 1 || i > rows || j < 1 || j > cols) fail(path, at + 1, "entry index out of range");
    if (v < 0) fail(path, at + 1, "negative count");
    if (!seen.emplace(i, j).second) fail(path, at + 1, "duplicate entry");
    values(i - 1, j - 1) = v;
    ++entries;
  }
  if (entries != nnz) {
    throw ParseError(path.string() + ": size line declares " + std::to_string(nnz) +
                     " entries, found " + std::to_string(entries));
  }
  auto genes = read_id_file(sidecar(path, ".genes"), rows, "gene_");
  auto samples = read_id_file(sidecar(path, ".samples"), cols, "sample_");
  return build_matrix(path, std::move(values), std::move(genes), std::move(samples));
}

std::string id_lines(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    out += id;
    out += '\n';
  }
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from(const json& rows, Eigen::Index r, Eigen::Index c) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r) {
    throw ParseError("matrix has the wrong number of rows");
  }
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw ParseError("matrix row has the wrong length");
    }
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const json& values, Eigen::Index n) {
  if (!values.is_array() || static_cast<Eigen::Index>(values.size()) != n) {
    throw ParseError("vector has the wrong length");
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = values[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json state_json(const ModelState& s) {
  return json{{"phi", matrix_json(s.phi)},     {"theta", matrix_json(s.theta)},
              {"alpha", vector_json(s.alpha)}, {"lambda", s.lambda},
              {"zeta", vector_json(s.zeta)},   {"p", vector_json(s.p)},
              {"r", vector_json(s.r)},         {"c", vector_json(s.c)},
              {"gamma0", s.gamma0},            {"c0", s.c0}};
}

ModelState state_from(const json& j, Eigen::Index g, Eigen::Index s, int k) {
  ModelState st;
  st.phi = matrix_from(j.at("phi"), g, k);
  st.theta = matrix_from(j.at("theta"), k, s);
  st.alpha = vector_from(j.at("alpha"), g);
  st.lambda = j.at("lambda").get<double>();
  st.zeta = vector_from(j.at("zeta"), s);
  st.p = vector_from(j.at("p"), s);
  st.r = vector_from(j.at("r"), k);
  st.c = vector_from(j.at("c"), s);
  st.gamma0 = j.at("gamma0").get<double>();
  st.c0 = j.at("c0").get<double>();
  return st;
}

json hyper_json(const Hyperparameters& hp) {
  return json{{"eta", hp.eta}, {"delta", hp.delta}, {"a0", hp.a0}, {"b0", hp.b0},
              {"e0", hp.e0},   {"f0", hp.f0},       {"g0", hp.g0}, {"h0", hp.h0},
              {"u0", hp.u0},   {"v0", hp.v0}};
}

Hyperparameters hyper_from(const json& j) {
  Hyperparameters hp;
  hp.eta = j.at("eta").get<double>();
  hp.delta = j.at("delta").get<double>();
  hp.a0 = j.at("a0").get<double>();
  hp.b0 = j.at("b0").get<double>();
  hp.e0 = j.at("e0").get<double>();
  hp.f0 = j.at("f0").get<double>();
  hp.g0 = j.at("g0").get<double>();
  hp.h0 = j.at("h0").get<double>();
  hp.u0 = j.at("u0").get<double>();
  hp.v0 = j.at("v0").get<double>();
  return hp;
}

}  // namespace

CountFormat parse_count_format(std::string_view name) {
  if (name == "tsv") return CountFormat::kTsv;
  if (name == "mtx" || name == "matrix-market") return CountFormat::kMatrixMarket;
  throw std::invalid_argument("unknown count format '" + std::string(name) +
                              "' (expected tsv or matrix-market)");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string schema_line(std::string_view name) {
  return std::string(kSchemaPrefix) + std::string(name) + " v" + std::to_string(kSchemaVersion);
}

CountMatrix read_counts(const fs::path& path, CountFormat format) {
  if (!fs::exists(path)) throw std::runtime_error("input file not found: " + path.string());
  return format == CountFormat::kTsv ? read_tsv(path) : read_matrix_market(path);
}

void write_counts(const fs::path& path, const CountMatrix& y, CountFormat format) {
  std::string out;
  if (format == CountFormat::kTsv) {
    out = schema_line("counts") + "\ngene_id";
    for (const auto& id : y.sample_ids()) out += "\t" + id;
    out += '\n';
    for (Eigen::Index i = 0; i < y.genes(); ++i) {
      out += y.gene_ids()[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < y.samples(); ++j) out += "\t" + std::to_string(y(i, j));
      out += '\n';
    }
    write_file_atomic(path, out);
    return;
  }
  const auto nnz = (y.values().array() != 0).count();
  out = "%%MatrixMarket matrix coordinate integer general\n";
  out += "%" + schema_line("counts").substr(1) + "\n";
  out += std::to_string(y.genes()) + " " + std::to_string(y.samples()) + " " +
         std::to_string(nnz) + "\n";
  for (Eigen::Index j = 0; j < y.samples(); ++j) {
    for (Eigen::Index i = 0; i < y.genes(); ++i) {
      if (y(i, j) == 0) continue;
      out += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " +
             std::to_string(y(i, j)) + "\n";
    }
  }
  write_file_atomic(sidecar(path, ".genes"), id_lines(y.gene_ids()));
  write_file_atomic(sidecar(path, ".samples"), id_lines(y.sample_ids()));
  write_file_atomic(path, out);
}

std::string matrix_csv(std::string_view schema, std::string_view corner,
                       std::span<const std::string> row_ids,
                       std::span<const std::string> col_ids, const Eigen::MatrixXd& m) {
  if (static_cast<Eigen::Index>(row_ids.size()) != m.rows() ||
      static_cast<Eigen::Index>(col_ids.size()) != m.cols()) {
    throw std::invalid_argument("id lists do not match the matrix shape");
  }
  std::string out = schema_line(schema) + "\n" + std::string(corner);
  for (const auto& id : col_ids) out += "," + id;
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < m.cols(); ++k) out += "," + format_real(m(i, k));
    out += '\n';
  }
  return out;
}

std::string selection_csv(const SelectionReport& report) {
  std::string out = schema_line("selection") + "\nK,loglik_mean,ci_lo,ci_hi,delta2\n";
  for (std::size_t m = 0; m < report.k_grid.size(); ++m) {
    out += std::to_string(report.k_grid[m]) + "," + format_real(report.loglik_mean[m]) + "," +
           format_real(report.loglik_ci[m].first) + "," +
           format_real(report.loglik_ci[m].second) + ",";
    if (m >= 1 && m + 1 < report.k_grid.size()) out += format_real(report.delta2[m - 1]);
    out += '\n';
  }
  return out;
}

SelectionReport parse_selection_csv(std::string_view text) {
  const fs::path where("selection.csv");
  const auto lines = split_lines(text);
  if (lines.size() < 2 || !check_schema(lines[0], "selection", "#", where, 1)) {
    throw ParseError("selection table lacks its schema line");
  }
  if (lines[1] != "K,loglik_mean,ci_lo,ci_hi,delta2") fail(where, 2, "unexpected header");
  std::vector<LoglikEstimate> estimates;
  int k_min = 0;
  for (std::size_t at = 2; at < lines.size(); ++at) {
    if (is_blank(lines[at])) continue;
    const auto cells = split(lines[at], ',');
    int k = 0;
    LoglikEstimate e;
    if (cells.size() != 5 || !parse_number(cells[0], k) || !parse_number(cells[1], e.mean) ||
        !parse_number(cells[2], e.lower) || !parse_number(cells[3], e.upper)) {
      fail(where, at + 1, "malformed row");
    }
    if (estimates.empty()) k_min = k;
    if (k != k_min + static_cast<int>(estimates.size())) fail(where, at + 1, "K grid has a gap");
    estimates.push_back(e);
  }
  return assemble_report(k_min, estimates);
}

std::string chain_jsonl(const ChainOutput& chain, const CountMatrix& y) {
  const ChainConfig& cfg = chain.config;
  json header{{"schema", "baycount.chain"},
              {"version", kSchemaVersion},
              {"num_factors", chain.num_factors},
              {"genes", y.gene_ids()},
              {"samples", y.sample_ids()},
              {"config",
               {{"burn_in", cfg.burn_in},
                {"total_iterations", cfg.total_iterations},
                {"thin", cfg.thin},
                {"seed", cfg.seed},
                {"store_draws", cfg.store_draws}}},
              {"hyper", hyper_json(chain.hyper)}};
  std::string out = header.dump() + "\n";
  for (std::size_t d = 0; d < chain.kept(); ++d) {
    json line{{"iteration", chain.kept_iterations[d]}, {"loglik", chain.loglik_trace[d]}};
    if (cfg.store_draws) line["state"] = state_json(chain.draws[d]);
    out += line.dump() + "\n";
  }
  const StreamingMoments& m = chain.moments;
  json moments{{"count", m.count},
               {"phi_mean", matrix_json(m.phi_mean)},
               {"phi_m2", matrix_json(m.phi_m2)},
               {"theta_mean", matrix_json(m.theta_mean)},
               {"theta_m2", matrix_json(m.theta_m2)},
               {"alpha_mean", vector_json(m.alpha_mean)},
               {"zeta_mean", vector_json(m.zeta_mean)},
               {"p_mean", vector_json(m.p_mean)},
               {"r_mean", vector_json(m.r_mean)},
               {"c_mean", vector_json(m.c_mean)},
               {"lambda_mean", m.lambda_mean},
               {"gamma0_mean", m.gamma0_mean},
               {"c0_mean", m.c0_mean}};
  out += json{{"moments", std::move(moments)}}.dump() + "\n";
  return out;
}

StoredChain parse_chain_jsonl(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<json> objects;
  try {
    for (std::string_view line : lines) {
      if (!is_blank(line)) objects.push_back(json::parse(line));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("chain file is not valid JSON Lines: ") + e.what());
  }
  if (objects.size() < 2) throw ParseError("chain file is truncated");
  try {
    const json& header = objects.front();
    if (header.value("schema", "") != "baycount.chain") throw ParseError("not a chain file");
    if (header.at("version").get<int>() != kSchemaVersion) {
      throw ParseError("unsupported chain schema version " + header.at("version").dump());
    }
    StoredChain stored;
    stored.gene_ids = header.at("genes").get<std::vector<std::string>>();
    stored.sample_ids = header.at("samples").get<std::vector<std::string>>();
    ChainOutput& chain = stored.chain;
    chain.num_factors = header.at("num_factors").get<int>();
    const json& cfg = header.at("config");
    chain.config.burn_in = cfg.at("burn_in").get<int>();
    chain.config.total_iterations = cfg.at("total_iterations").get<int>();
    chain.config.thin = cfg.at("thin").get<int>();
    chain.config.seed = cfg.at("seed").get<std::uint64_t>();
    chain.config.store_draws = cfg.at("store_draws").get<bool>();
    chain.hyper = hyper_from(header.at("hyper"));

    const auto g = static_cast<Eigen::Index>(stored.gene_ids.size());
    const auto s = static_cast<Eigen::Index>(stored.sample_ids.size());
    const int k = chain.num_factors;
    for (std::size_t d = 1; d + 1 < objects.size(); ++d) {
      const json& line = objects[d];
      chain.kept_iterations.push_back(line.at("iteration").get<int>());
      chain.loglik_trace.push_back(line.at("loglik").get<double>());
      if (chain.config.store_draws) chain.draws.push_back(state_from(line.at("state"), g, s, k));
    }
    const json& m = objects.back().at("moments");
    StreamingMoments& mo = chain.moments;
    mo.count = m.at("count").get<std::int64_t>();
    mo.phi_mean = matrix_from(m.at("phi_mean"), g, k);
    mo.phi_m2 = matrix_from(m.at("phi_m2"), g, k);
    mo.theta_mean = matrix_from(m.at("theta_mean"), k, s);
    mo.theta_m2 = matrix_from(m.at("theta_m2"), k, s);
    mo.alpha_mean = vector_from(m.at("alpha_mean"), g);
    mo.zeta_mean = vector_from(m.at("zeta_mean"), s);
    mo.p_mean = vector_from(m.at("p_mean"), s);
    mo.r_mean = vector_from(m.at("r_mean"), k);
    mo.c_mean = vector_from(m.at("c_mean"), s);
    mo.lambda_mean = m.at("lambda_mean").get<double>();
    mo.gamma0_mean = m.at("gamma0_mean").get<double>();
    mo.c0_mean = m.at("c0_mean").get<double>();
    if (mo.count != static_cast<std::int64_t>(chain.kept())) {
      throw ParseError("chain moments disagree with the number of kept iterations");
    }
    return stored;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed chain file: ") + e.what());
  }
}

void write_chain(const fs::path& path, const ChainOutput& chain, const CountMatrix& y) {
  write_file_atomic(path, chain_jsonl(chain, y));
}

StoredChain read_chain(const fs::path& path) {
  try {
    return parse_chain_jsonl(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string loglik_csv(const ChainOutput& chain) {
  std::string out = schema_line("loglik") + "\niteration,loglik\n";
  for (std::size_t d = 0; d < chain.kept(); ++d) {
    out += std::to_string(chain.kept_iterations[d]) + "," + format_real(chain.loglik_trace[d]) +
           "\n";
  }
  return out;
}

}  // namespace baycount::io
