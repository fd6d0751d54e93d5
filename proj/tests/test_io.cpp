#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "isw/config.hpp"
#include "isw/error.hpp"
#include "isw/io.hpp"
#include "support.hpp"

using namespace isw;

TEST_CASE("analytic basis file round trip") {
  const auto b = build_analytic_basis(DomainSpec::cylinder(2 * testing::kPi, 3.0), 12);
  const auto text = io::basis_to_json(b);
  const auto back = io::basis_from_json(text);
  CHECK(back.fingerprint() == b.fingerprint());
  CHECK(back.domain().fingerprint() == b.domain().fingerprint());
  REQUIRE(back.size() == b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(back.eigenvalues()[i] == b.eigenvalues()[i]);
    CHECK(back.modes()[i] == b.modes()[i]);
  }
}

TEST_CASE("graph basis file round trip and tamper detection") {
  isw::Rng rng(4);
  const auto g = testing::random_connected_graph(rng, 12, 6);
  const auto b = build_graph_basis(g, 5);
  auto text = io::basis_to_json(b);
  const auto back = io::basis_from_json(text);
  CHECK(back.fingerprint() == b.fingerprint());
  for (std::size_t i = 0; i < b.vectors().size(); ++i) CHECK(back.vectors()[i] == b.vectors()[i]);
  const auto pos = text.find("\"fingerprint\"");
  REQUIRE(pos != std::string::npos);
  const auto q = text.find('"', text.find(':', pos) + 1) + 1;
  text[q] = text[q] == '0' ? '1' : '0';
  CHECK_THROWS_AS(io::basis_from_json(text), BasisMismatch);
}

TEST_CASE("histogram CSV round trip") {
  const auto d = DomainSpec::rectangle(1.0, 2.0);
  isw::Rng rng(9);
  std::vector<Histogram> hs{testing::random_histogram(d, rng, 4), testing::random_histogram(d, rng, 3)};
  std::ostringstream out;
  io::write_histograms(out, {"a", "b"}, hs, 2);
  std::istringstream in(out.str());
  const auto c = io::read_histograms(in, d);
  REQUIRE(c.ids == std::vector<std::string>{"a", "b"});
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(c.histograms[i].size() == hs[i].size());
    for (std::size_t a = 0; a < hs[i].size(); ++a) {
      CHECK(c.histograms[i].support()[a] == hs[i].support()[a]);
      CHECK(c.histograms[i].weights()[a] == doctest::Approx(hs[i].weights()[a]).epsilon(1e-15));
    }
  }
}

TEST_CASE("histogram reader: header, normalization, errors with line numbers") {
  const auto d = DomainSpec::interval(1.0);
  std::istringstream in("id,x,w\ns,0.25,2\ns,0.75,6\n\nt,0.5,1\n");
  const auto c = io::read_histograms(in, d);
  REQUIRE(c.histograms.size() == 2);
  CHECK(c.histograms[0].weights()[0] == doctest::Approx(0.25));
  std::istringstream bad("s,0.25,1\ns,1.5,1\n");
  try {
    io::read_histograms(bad, d, "h.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream neg("s,0.25,-1\n");
  CHECK_THROWS_AS(io::read_histograms(neg, d), ParseError);
}

TEST_CASE("edge list reader") {
  std::istringstream in("src,dst,w\n0,1,2.5\n1,2\n");
  const auto g = io::read_edge_list(in, true);
  CHECK(g.node_count() == 3);
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0].weight == 2.5);
  CHECK(g.edges()[1].weight == 1.0);
  std::istringstream bad("0,1\n1,x\n2,3\n");
  try {
    io::read_edge_list(bad, false, 0, "e.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("e.csv:2") != std::string::npos);
  }
}

TEST_CASE("embedding CSV and sidecar round trip") {
  EmbeddingMeta meta{2, 3, "heat(t=1)", 0x0123456789abcdefULL};
  io::EmbeddingTable t{{"x", "y"}, RowMatrix(2, 6, {0.1, 1e-300, -2.5, 1.0 / 3.0, 7, 8, 9, 10, 11, 12, 13, 14}), meta};
  std::ostringstream out;
  io::write_embedding_csv(out, t);
  const auto side = io::embedding_meta_from_json(io::embedding_sidecar_json(meta));
  CHECK(side == meta);
  std::istringstream in(out.str());
  const auto back = io::read_embedding_csv(in, side);
  CHECK(back.ids == t.ids);
  for (std::size_t i = 0; i < 12; ++i) CHECK(back.rows.data()[i] == t.rows.data()[i]);
  std::istringstream wrong("id,e1\nx,1\n");
  CHECK_THROWS_AS(io::read_embedding_csv(wrong, side), ParseError);
}

TEST_CASE("p-value list and FDR output") {
  std::istringstream in("label,p\na,0.01\nb,0.5\n");
  const auto rows = io::read_pvalues(in);
  REQUIRE(rows.size() == 2);
  std::ostringstream out;
  io::write_fdr(out, rows, {0});
  CHECK(out.str() == "label,p,rejected\na,0.01,true\nb,0.5,false\n");
  std::istringstream bad("a,1.5\n");
  CHECK_THROWS_AS(io::read_pvalues(bad), ParseError);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-310, 12345678.9, -0.0, 5e-324}) {
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("run config JSON round trip is lossless") {
  RunConfig c;
  c.domain = "cylinder";
  c.length1 = 0.1 + 0.2;
  c.length2 = 1.0 / 3.0;
  c.heat_t = 1e-17;
  c.seed = std::numeric_limits<std::uint64_t>::max();
  c.deltas = std::vector<double>{0.0, 0.26179938779914941, 2.0 / 7.0};
  c.replicates = 400;
  c.linear_offset = true;
  c.output = "out dir/x.csv";
  const auto back = run_config_from_json(run_config_to_json(c));
  CHECK(back == c);
  CHECK(run_config_from_json(run_config_to_json(RunConfig{})) == RunConfig{});
}

TEST_CASE("run config rejects unknown keys and bad types") {
  CHECK_THROWS_AS(run_config_from_json(R"({"sede": 1})"), ParseError);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": -1})"), ParseError);
  CHECK_THROWS_AS(run_config_from_json(R"({"L": "three"})"), ParseError);
  CHECK_THROWS_AS(run_config_from_json("[1,2]"), ParseError);
  CHECK_THROWS_AS(run_config_from_json("{"), ParseError);
}

TEST_CASE("run config merge lets later layers win") {
  RunConfig base;
  base.seed = 1;
  base.num_slices = 3;
  RunConfig over;
  over.seed = 2;
  base.merge(over);
  CHECK(base.seed == 2u);
  CHECK(base.num_slices == 3u);
}
