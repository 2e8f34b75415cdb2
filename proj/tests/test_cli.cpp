#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arganno/corpus_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli = ARGANNO_CLI_PATH;
const fs::path fixtures = ARGANNO_FIXTURE_DIR;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  fs::path out_file = fs::temp_directory_path() / "arganno_cli_out.txt";
  std::string command = std::string(cli) + " " + args + " > " + out_file.string() + " 2>&1";
  int status = std::system(command.c_str());
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  return {WEXITSTATUS(status), buf.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("cli ingest is deterministic and prints fixture stats") {
  fs::path out1 = temp_dir("arganno_cli_ingest1");
  fs::path out2 = temp_dir("arganno_cli_ingest2");

  RunResult r1 = run("ingest --format brat --in " + (fixtures / "aae").string() +
                     " --out " + out1.string());
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("B") != std::string::npos);
  CHECK(r1.output.find("52") != std::string::npos);  // fixture B count

  RunResult r2 = run("ingest --format brat --in " + (fixtures / "aae").string() +
                     " --out " + out2.string());
  REQUIRE(r2.exit_code == 0);
  // byte-identical canonical files across reruns
  CHECK(slurp(out1 / "index.json") == slurp(out2 / "index.json"));
  CHECK(slurp(out1 / "docs" / "essay00.json") == slurp(out2 / "docs" / "essay00.json"));
  // manifest digests agree even though timestamps may differ
  auto m1 = nlohmann::json::parse(slurp(out1 / "manifest.json"));
  auto m2 = nlohmann::json::parse(slurp(out2 / "manifest.json"));
  CHECK(m1.at("digest") == m2.at("digest"));
}

TEST_CASE("cli ingest on an empty directory warns but succeeds") {
  fs::path empty = temp_dir("arganno_cli_empty");
  fs::path out = temp_dir("arganno_cli_empty_out");
  RunResult r = run("ingest --format brat --in " + empty.string() + " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("warning") != std::string::npos);
}

TEST_CASE("cli ingest on a missing directory fails with exit 1") {
  RunResult r = run("ingest --format brat --in /nonexistent/nowhere --out /tmp/x");
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli full pipeline: vocab, train, predict, evaluate, export") {
  fs::path corpus = temp_dir("arganno_cli_corpus");
  REQUIRE(run("ingest --format brat --in " + (fixtures / "aae").string() + " --out " +
              corpus.string())
              .exit_code == 0);

  fs::path vocab = fs::temp_directory_path() / "arganno_cli_vocab.txt";
  REQUIRE(run("vocab --in " + corpus.string() + " --out " + vocab.string() + " --size 120")
              .exit_code == 0);

  fs::path config = fs::temp_directory_path() / "arganno_cli_config.txt";
  write(config,
        "layers = 1\nheads = 2\nwidth = 8\nsegment_len = 32\nmem_len = 32\n"
        "vocab_size = auto\nnum_labels = auto\nepochs = 2\nmax_tokens = 256\n"
        "batch_size = 1\nlearning_rate = 0.005\ndev_fraction = 0.2\nseed = 4\n"
        "stop_metric = sum_kappa\n");

  fs::path model1 = temp_dir("arganno_cli_model1");
  RunResult t1 = run("train --task aae_bio --in " + corpus.string() + " --vocab " +
                     vocab.string() + " --config " + config.string() + " --out " +
                     model1.string());
  REQUIRE(t1.exit_code == 0);
  // log line count equals epochs
  std::string log = slurp(model1 / "metrics.log");
  CHECK(std::count(log.begin(), log.end(), '\n') == 2);

  // identical rerun produces an identical manifest digest
  fs::path model2 = temp_dir("arganno_cli_model2");
  RunResult t2 = run("train --task aae_bio --in " + corpus.string() + " --vocab " +
                     vocab.string() + " --config " + config.string() + " --out " +
                     model2.string());
  REQUIRE(t2.exit_code == 0);
  auto m1 = nlohmann::json::parse(slurp(model1 / "manifest.json"));
  auto m2 = nlohmann::json::parse(slurp(model2 / "manifest.json"));
  CHECK(m1.at("digest") == m2.at("digest"));

  fs::path pred = temp_dir("arganno_cli_pred");
  REQUIRE(run("predict --task aae_bio --in " + corpus.string() + " --vocab " +
              vocab.string() + " --checkpoint " + (model1 / "model.ckpt").string() +
              " --out " + pred.string())
              .exit_code == 0);

  // evaluating the gold corpus against itself prints a perfect macro F1
  RunResult self_eval = run("evaluate --task aae_bio --pred " + corpus.string() +
                            " --gold " + corpus.string());
  REQUIRE(self_eval.exit_code == 0);
  CHECK(self_eval.output.find("Macro Avg") != std::string::npos);
  CHECK(self_eval.output.find("1.000") != std::string::npos);

  // predictions evaluate without error (accuracy depends on the toy model)
  RunResult eval = run("evaluate --task aae_bio --pred " + pred.string() + " --gold " +
                       corpus.string());
  CHECK(eval.exit_code == 0);

  // export-html round-trips the document text
  fs::path html = fs::temp_directory_path() / "arganno_cli_doc.html";
  REQUIRE(run("export-html --in " + (corpus / "docs" / "essay00.json").string() +
              " --scheme AAE_COMPONENT --out " + html.string())
              .exit_code == 0);
  std::string rendered = slurp(html);
  CHECK(rendered.find("class=\"essay\"") != std::string::npos);
  CHECK(rendered.find("span style=\"background-color:") != std::string::npos);

  // correspond a corpus with itself: identity rows of 100
  RunResult corr = run("correspond --human " + corpus.string() + " --synth " +
                       corpus.string());
  REQUIRE(corr.exit_code == 0);
  CHECK(corr.output.find("100.0") != std::string::npos);
}

TEST_CASE("cli missing config key names the key and exits 2") {
  fs::path corpus = temp_dir("arganno_cli_cfg_corpus");
  REQUIRE(run("ingest --format brat --in " + (fixtures / "aae").string() + " --out " +
              corpus.string())
              .exit_code == 0);
  fs::path vocab = fs::temp_directory_path() / "arganno_cli_vocab2.txt";
  REQUIRE(run("vocab --in " + corpus.string() + " --out " + vocab.string() + " --size 120")
              .exit_code == 0);
  fs::path config = fs::temp_directory_path() / "arganno_cli_bad_config.txt";
  write(config, "layers = 1\nheads = 2\n");  // width and the rest missing
  RunResult r = run("train --task aae_bio --in " + corpus.string() + " --vocab " +
                    vocab.string() + " --config " + config.string() + " --out /tmp/x");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("width") != std::string::npos);
}

TEST_CASE("cli unknown flags and subcommands exit 2") {
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("ingest --format brat").exit_code == 2);  // missing required flags
}

TEST_CASE("cli persuade ingest matches fixture shares") {
  fs::path in = temp_dir("arganno_cli_persuade_in");
  fs::copy_file(fixtures / "persuade_fixture.csv", in / "persuade_fixture.csv");
  fs::path out = temp_dir("arganno_cli_persuade_out");
  RunResult r = run("ingest --format persuade --in " + in.string() + " --out " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("42.8%") != std::string::npos);  // Evidence share
  CHECK(r.output.find("14.8%") != std::string::npos);  // None share
}

TEST_CASE("cli ensemble writes plan, seeds, synthetic corpus, and universal model") {
  using namespace arganno;
  using namespace arganno::testsupport;

  fs::path prompts_dir = temp_dir("arganno_cli_prompts");
  Rng rng(404);
  for (int p = 0; p < 3; ++p) {
    std::vector<AnnotatedDocument> docs;
    for (int d = 0; d < 2; ++d)
      docs.push_back(make_learnable_essay(rng, "p" + std::to_string(p) + std::to_string(d)));
    save_corpus(docs, (prompts_dir / ("prompt" + std::to_string(p))).string());
  }
  fs::path unlabeled_dir = temp_dir("arganno_cli_unlabeled");
  {
    std::vector<AnnotatedDocument> docs;
    for (int d = 0; d < 3; ++d) docs.push_back(make_learnable_essay(rng, "u" + std::to_string(d)));
    save_corpus(docs, unlabeled_dir.string());
  }

  // vocab over one of the prompt corpora
  fs::path vocab = fs::temp_directory_path() / "arganno_cli_ens_vocab.txt";
  REQUIRE(run("vocab --in " + (prompts_dir / "prompt0").string() + " --out " +
              vocab.string() + " --size 200")
              .exit_code == 0);

  fs::path config = fs::temp_directory_path() / "arganno_cli_ens_config.txt";
  write(config,
        "layers = 1\nheads = 2\nwidth = 8\nsegment_len = 24\nmem_len = 24\n"
        "vocab_size = auto\nnum_labels = auto\nepochs = 2\nmax_tokens = 128\n"
        "batch_size = 1\nlearning_rate = 0.01\ndev_fraction = 0.34\nseed = 9\n"
        "stop_metric = sum_kappa\n");

  fs::path out = temp_dir("arganno_cli_ens_out");
  RunResult r = run("ensemble --in " + prompts_dir.string() + " --unlabeled " +
                    unlabeled_dir.string() + " --vocab " + vocab.string() + " --config " +
                    config.string() + " --k 2 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out / "plan.json"));
  CHECK(fs::exists(out / "seed0.ckpt"));
  CHECK(fs::exists(out / "seed1.ckpt"));
  CHECK(fs::exists(out / "universal.ckpt"));
  CHECK(fs::exists(out / "synthetic" / "index.json"));
  // vote provenance columns present in the synthetic corpus
  auto synthetic = load_corpus((out / "synthetic").string());
  REQUIRE(!synthetic.empty());
  bool any_votes = false;
  for (const auto& doc : synthetic)
    for (const auto& span : doc.spans)
      if (span.votes.size() == 2) any_votes = true;
  CHECK(any_votes);
}
