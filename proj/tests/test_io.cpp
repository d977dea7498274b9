#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "baycount/distributions.hpp"
#include "baycount/io.hpp"
#include "baycount/synthetic.hpp"
#include "support.hpp"

using namespace baycount;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string parse_error(const fs::path& path, io::CountFormat format) {
  try {
    io::read_counts(path, format);
  } catch (const io::ParseError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("count format names") {
  CHECK(io::parse_count_format("tsv") == io::CountFormat::kTsv);
  CHECK(io::parse_count_format("mtx") == io::CountFormat::kMatrixMarket);
  CHECK(io::parse_count_format("matrix-market") == io::CountFormat::kMatrixMarket);
  CHECK_THROWS(io::parse_count_format("csv"));
}

TEST_CASE("tsv counts") {
  support::TempDir dir;
  SUBCASE("2x2 fixture") {
    write(dir / "a.tsv", "gene_id\tS1\tS2\nTP53\t3\t0\nEGFR\t12\t7\n");
    const auto y = io::read_counts(dir / "a.tsv", io::CountFormat::kTsv);
    CHECK(y.gene_ids() == std::vector<std::string>{"TP53", "EGFR"});
    CHECK(y.sample_ids() == std::vector<std::string>{"S1", "S2"});
    CHECK(y(0, 0) == 3);
    CHECK(y(1, 0) == 12);
    CHECK(y(1, 1) == 7);
    io::write_counts(dir / "b.tsv", y, io::CountFormat::kTsv);
    CHECK(io::read_counts(dir / "b.tsv", io::CountFormat::kTsv) == y);
    CHECK(io::read_text(dir / "b.tsv").starts_with("# baycount.counts v1\n"));
  }
  SUBCASE("schema line and CRLF are accepted") {
    write(dir / "a.tsv", "# baycount.counts v1\r\ngene_id\tS1\r\ng1\t5\r\n");
    CHECK(io::read_counts(dir / "a.tsv", io::CountFormat::kTsv)(0, 0) == 5);
  }
  SUBCASE("malformed cells name the line and column") {
    write(dir / "a.tsv", "gene_id\tS1\tS2\ng1\t1\t2\ng2\t3\tx\n");
    auto msg = parse_error(dir / "a.tsv", io::CountFormat::kTsv);
    CHECK(contains(msg, ":3:"));
    CHECK(contains(msg, "column 3"));
    write(dir / "a.tsv", "gene_id\tS1\tS2\ng1\t-1\t2\n");
    msg = parse_error(dir / "a.tsv", io::CountFormat::kTsv);
    CHECK(contains(msg, ":2:"));
    CHECK(contains(msg, "negative"));
    write(dir / "a.tsv", "gene_id\tS1\tS2\ng1\t1.5\t2\n");
    CHECK(contains(parse_error(dir / "a.tsv", io::CountFormat::kTsv), "column 2"));
    write(dir / "a.tsv", "gene_id\tS1\tS2\ng1\t1\n");
    CHECK(contains(parse_error(dir / "a.tsv", io::CountFormat::kTsv), "expected 3 cells"));
    write(dir / "a.tsv", "gene_id\tS1\tS2\ng1\t1\t2\ng1\t1\t2\n");
    CHECK(contains(parse_error(dir / "a.tsv", io::CountFormat::kTsv), "a.tsv"));
    write(dir / "a.tsv", "# baycount.counts v2\ngene_id\tS1\ng1\t1\n");
    CHECK(contains(parse_error(dir / "a.tsv", io::CountFormat::kTsv), "unsupported schema version"));
  }
  SUBCASE("missing file") {
    CHECK_THROWS(io::read_counts(dir / "absent.tsv", io::CountFormat::kTsv));
  }
}

TEST_CASE("matrix market counts") {
  support::TempDir dir;
  SUBCASE("implicit zeros and sidecar ids") {
    write(dir / "m.mtx",
          "%%MatrixMarket matrix coordinate integer general\n% comment\n3 2 2\n1 1 4\n3 2 9\n");
    write(dir / "m.mtx.genes", "a\nb\nc\n");
    const auto y = io::read_counts(dir / "m.mtx", io::CountFormat::kMatrixMarket);
    CountArray expected(3, 2);
    expected << 4, 0, 0, 0, 0, 9;
    CHECK(y.values() == expected);
    CHECK(y.gene_ids() == std::vector<std::string>{"a", "b", "c"});
    CHECK(y.sample_ids() == std::vector<std::string>{"sample_1", "sample_2"});
  }
  SUBCASE("malformed entries") {
    const std::string banner = "%%MatrixMarket matrix coordinate integer general\n";
    write(dir / "m.mtx", banner + "2 2 2\n1 1 4\n1 1 5\n");
    CHECK(contains(parse_error(dir / "m.mtx", io::CountFormat::kMatrixMarket), "duplicate"));
    write(dir / "m.mtx", banner + "2 2 1\n3 1 4\n");
    CHECK(contains(parse_error(dir / "m.mtx", io::CountFormat::kMatrixMarket), "out of range"));
    write(dir / "m.mtx", banner + "2 2 2\n1 1 4\n");
    CHECK(contains(parse_error(dir / "m.mtx", io::CountFormat::kMatrixMarket), "declares 2"));
    write(dir / "m.mtx", "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2.5\n");
    CHECK(contains(parse_error(dir / "m.mtx", io::CountFormat::kMatrixMarket), ":1:"));
    write(dir / "m.mtx", banner + "2 2 1\n1 2 x\n");
    CHECK(contains(parse_error(dir / "m.mtx", io::CountFormat::kMatrixMarket), ":3:"));
    write(dir / "m.mtx", banner + "2 2 1\n1 2 3\n");
    write(dir / "m.mtx.samples", "only_one\n");
    CHECK(contains(parse_error(dir / "m.mtx", io::CountFormat::kMatrixMarket), "expected 2 ids"));
  }
}

TEST_CASE("count round trip on a random matrix") {
  support::TempDir dir;
  RngStream rng(91, 1);
  CountArray v(50, 10);
  for (Eigen::Index i = 0; i < 50; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      v(i, j) = rng.uniform() < 0.3 ? 0 : dist::sample_negative_binomial(0.5, 0.999, rng);
    }
  }
  const auto y = CountMatrix::with_default_ids(v);
  for (auto format : {io::CountFormat::kTsv, io::CountFormat::kMatrixMarket}) {
    const auto path = dir / (format == io::CountFormat::kTsv ? "r.tsv" : "r.mtx");
    io::write_counts(path, y, format);
    CHECK(io::read_counts(path, format) == y);
  }
}

TEST_CASE("atomic writes leave no temp files") {
  support::TempDir dir;
  io::write_file_atomic(dir / "x.txt", "hello\n");
  io::write_file_atomic(dir / "x.txt", "again\n");
  CHECK(io::read_text(dir / "x.txt") == "again\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
  CHECK_THROWS(io::write_file_atomic(dir / "missing" / "x.txt", "data"));
}

TEST_CASE("number formatting round-trips") {
  RngStream rng(92, 1);
  for (int d = 0; d < 1000; ++d) {
    const double x = dist::sample_gamma(0.1, 1.0, rng) * 1e-3;
    REQUIRE(std::stod(io::format_real(x)) == x);
  }
  CHECK(io::format_real(0.1) == "0.10000000000000001");
  CHECK(io::schema_line("phi_mean") == "# baycount.phi_mean v1");
}

TEST_CASE("matrix csv layout") {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.25, 1.0, 0.0;
  const std::vector<std::string> rows{"g1", "g2"}, cols{"factor_1", "factor_2"};
  CHECK(io::matrix_csv("phi_mean", "gene_id", rows, cols, m) ==
        "# baycount.phi_mean v1\ngene_id,factor_1,factor_2\ng1,0.5,0.25\ng2,1,0\n");
}

TEST_CASE("selection table round trip") {
  const std::vector<LoglikEstimate> est{{-10.0, -11.0, -9.0}, {-5.0, -6.0, -4.5},
                                        {-4.0, -4.5, -3.0}, {-3.8, -4.1, -3.5}};
  const auto report = assemble_report(2, est);
  const std::string text = io::selection_csv(report);
  CHECK(text.starts_with("# baycount.selection v1\nK,loglik_mean,ci_lo,ci_hi,delta2\n2,-10,-11,-9,\n3,"));
  const auto back = io::parse_selection_csv(text);
  CHECK(back.k_grid == report.k_grid);
  CHECK(back.loglik_mean == report.loglik_mean);
  CHECK(back.loglik_ci == report.loglik_ci);
  CHECK(back.delta2 == report.delta2);
  CHECK(back.k_hat == 3);
  CHECK_THROWS_AS(io::parse_selection_csv("K,loglik_mean\n"), io::ParseError);
}

TEST_CASE("chain round trip") {
  const auto truth = generate_scenario1(15, 5, 2, 93);
  ChainConfig cfg;
  cfg.burn_in = 5;
  cfg.total_iterations = 25;
  cfg.thin = 2;
  cfg.seed = 11;
  Hyperparameters hp;
  hp.delta = 0.3;
  const auto chain = run_chain(truth.y, 2, hp, cfg);
  const std::string text = io::chain_jsonl(chain, truth.y);
  const auto stored = io::parse_chain_jsonl(text);
  CHECK(stored.gene_ids == truth.y.gene_ids());
  CHECK(stored.sample_ids == truth.y.sample_ids());
  CHECK(stored.chain.num_factors == 2);
  CHECK(stored.chain.hyper == hp);
  CHECK(stored.chain.config.seed == 11);
  CHECK(stored.chain.config.thin == 2);
  CHECK(stored.chain.loglik_trace == chain.loglik_trace);
  CHECK(stored.chain.kept_iterations == chain.kept_iterations);
  REQUIRE(stored.chain.draws.size() == chain.draws.size());
  for (std::size_t d = 0; d < chain.draws.size(); ++d) {
    REQUIRE(identical(stored.chain.draws[d], chain.draws[d]));
  }
  CHECK(stored.chain.moments.theta_mean == chain.moments.theta_mean);
  CHECK(stored.chain.moments.phi_m2 == chain.moments.phi_m2);
  CHECK(io::chain_jsonl(stored.chain, truth.y) == text);

  SUBCASE("streaming chains carry moments only") {
    cfg.store_draws = false;
    const auto lean = run_chain(truth.y, 2, hp, cfg);
    const auto back = io::parse_chain_jsonl(io::chain_jsonl(lean, truth.y));
    CHECK(back.chain.draws.empty());
    CHECK(back.chain.moments.count == 10);
    CHECK(back.chain.moments.theta_mean == lean.moments.theta_mean);
  }
  SUBCASE("rejects other versions and truncation") {
    std::string bumped = text;
    bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":2");
    CHECK_THROWS_AS(io::parse_chain_jsonl(bumped), io::ParseError);
    const std::string cut = text.substr(0, text.rfind("{\"moments\""));
    CHECK_THROWS_AS(io::parse_chain_jsonl(cut), io::ParseError);
    CHECK_THROWS_AS(io::parse_chain_jsonl("not json\n"), io::ParseError);
  }
  SUBCASE("file helpers") {
    support::TempDir dir;
    io::write_chain(dir / "chain.jsonl", chain, truth.y);
    CHECK(io::read_text(dir / "chain.jsonl") == text);
    CHECK(io::read_chain(dir / "chain.jsonl").chain.loglik_trace == chain.loglik_trace);
    const std::string trace = io::loglik_csv(chain);
    CHECK(trace.starts_with("# baycount.loglik v1\niteration,loglik\n7,"));
  }
}
