#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gts/cli.hpp"

using namespace gts;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "gts");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const char* name) { return std::string(GTS_SAMPLES_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("gts_cli_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(CliEval, WordModelExistsA) {
  const auto r = run({"eval", sample("abbaa.model"), sample("exists_a.lform")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 11), "ProvenTrue(");
}

TEST(CliEval, ExpressionAndSign) {
  const auto r = run({"eval", sample("abbaa.model"), "-e", "exists x Pa(x)", "--sign", "-"});
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_EQ(r.out.substr(0, 12), "ProvenFalse(");
}

TEST(CliEval, UnassignedVariableIsUsageError) {
  const auto r = run({"eval", sample("abbaa.model"), "-e", "#1{(Pa(x) | #1)}"});
  EXPECT_EQ(r.code, exit_code::kUsage);
  EXPECT_NE(r.err.find("free variable x"), std::string::npos);
}

TEST(CliEval, LoopWitness) {
  EXPECT_EQ(run({"eval", sample("point.model"), sample("loop.lform"), "--assign", "x=0", "--budget", "100"}).code, 2);
  EXPECT_EQ(run({"eval", sample("point_in_p.model"), sample("loop.lform"), "--assign", "x=0"}).code, 0);
  EXPECT_EQ(run({"eval", sample("point_in_p.model"), sample("loop.lform"), "--assign", "x=0", "--sign", "-"}).code, 1);
}

TEST(CliEval, RelationVariableAssignment) {
  const auto r = run({"eval", sample("edge.model"), "-e", "exists x exists y ($X(x,y) & R(x,y))", "--assign",
                      "$X=(0,1)(1,1)"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliEval, CompiledMachineOnWordModel) {
  EXPECT_EQ(run({"eval", "--tm", sample("even_a.tm"), "--word", "a"}).code, 1);
  EXPECT_EQ(run({"eval", "--tm", sample("even_a.tm"), "--word", "b"}).code, 0);
}

TEST(CliEval, CompiledPipelineMatchesRuns) {
  for (const auto& w : all_words({"a", "b"}, 2)) {
    const std::string word = word_text(w) == "ε" ? "" : word_text(w);
    const int run_code = run({"run-tm", sample("even_a.tm"), word}).code;
    const int eval_code = run({"eval", "--tm", sample("even_a.tm"), "--word", word, "--geometric"}).code;
    EXPECT_EQ(eval_code, run_code) << word_text(w);
  }
}

TEST(CliEval, MemoDoesNotChangeTheVerdict) {
  const auto a = run({"eval", sample("abbaa.model"), "-e", "forall x (Pa(x) | exists y Succ(y, x))"});
  const auto b = run({"eval", sample("abbaa.model"), "-e", "forall x (Pa(x) | exists y Succ(y, x))", "--no-memo"});
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), b.out.substr(0, b.out.find('\n')));
}

TEST(CliEval, Errors) {
  EXPECT_EQ(run({"eval", "/nonexistent.model", "-e", "T"}).code, exit_code::kNoInput);
  EXPECT_EQ(run({"eval", sample("abbaa.model"), "-e", "exists x Pc(x)"}).code, exit_code::kData);
  EXPECT_EQ(run({"eval", sample("abbaa.model"), "-e", "T", "--sign", "x"}).code, exit_code::kUsage);
  EXPECT_EQ(run({"eval", sample("abbaa.model")}).code, exit_code::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, exit_code::kUsage);
}

TEST(CliEval, CustomQuantifierTable) {
  const std::string table = temp_file("q.table", "quant Two: 6 2 -> 1\n");
  const auto r = run({"eval", sample("abbaa.model"), "-e", "Q<Two> x Pb(x)", "--quantifiers", table});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"eval", sample("abbaa.model"), "-e", "Q<Two> x Pa(x)", "--quantifiers", table}).code, 1);
}

TEST(CliRunTm, EvenA) {
  const auto r = run({"run-tm", sample("even_a.tm"), "aa"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 6), "Accept");
  EXPECT_EQ(run({"run-tm", sample("even_a.tm"), "a"}).code, 1);
  EXPECT_EQ(run({"run-tm", sample("right_forever.tm"), "ab", "--budget", "50"}).code, 2);
  EXPECT_EQ(run({"run-tm", sample("even_a.tm"), "ac"}).code, exit_code::kUsage);
}

TEST(CliCompileTm, OutputParsesBack) {
  const auto r = run({"compile-tm", sample("even_a.tm")});
  ASSERT_EQ(r.code, 0);
  const TuringMachine tm = parse_tm(cli::read_file(sample("even_a.tm"))).value();
  const auto back = parse_formula(r.out, tm_vocabulary(tm));
  ASSERT_TRUE(back) << back.diagnostic().to_string();
  EXPECT_EQ(back.value(), compile(tm));
}

TEST(CliCertify, AcceptRejectDiverge) {
  const std::string out = (std::filesystem::temp_directory_path() / "gts_cli_test_cert.txt").string();
  const auto acc = run({"certify", sample("even_a.tm"), "aa", "-o", out});
  EXPECT_EQ(acc.code, 0) << acc.err;
  EXPECT_NE(acc.out.find("verified"), std::string::npos);
  std::ifstream lines(out);
  std::string first;
  ASSERT_TRUE(std::getline(lines, first));
  EXPECT_NE(first.find(" -> "), std::string::npos);
  EXPECT_EQ(run({"certify", sample("even_a.tm"), "a", "-o", out}).code, 1);
  EXPECT_EQ(run({"certify", sample("right_forever.tm"), "a", "--budget", "100"}).code, 2);
}

TEST(CliEncode, Examples) {
  auto r = run({"encode", sample("edge.model")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0010100\n");
  r = run({"encode", temp_file("one.model", "domain 1\n")});
  EXPECT_EQ(r.out, "01\n");
  r = run({"encode", sample("edge.model"), "--order", "1,0"});
  EXPECT_EQ(r.out, "0010010\n");
  EXPECT_EQ(run({"encode", sample("edge.model"), "--order", "0,0"}).code, exit_code::kUsage);
  EXPECT_EQ(run({"encode", sample("edge.model"), "--order", "0,7"}).code, exit_code::kUsage);
}

TEST(CliPlay, HumanVerifierPicksWitness) {
  // Moves for exists x Pa(x) on abbaa are the elements 0..5; element 1 is in Pa.
  const auto r = run({"play", sample("abbaa.model"), sample("exists_a.lform"), "--as", "verifier"}, "1\n");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("∃ wins"), std::string::npos);
}

TEST(CliPlay, InvalidSelectionReprompts) {
  const auto r = run({"play", sample("abbaa.model"), sample("exists_a.lform")}, "9\nx\n2\n");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("enter a number"), std::string::npos);
  EXPECT_NE(r.out.find("∀ wins"), std::string::npos);
}

TEST(CliPlay, LoopingUntilQuit) {
  std::string input;
  for (int i = 0; i < 10; ++i) input += "1\n0\n";
  input += "q\n";
  const auto r = run({"play", sample("point.model"), sample("loop.lform"), "--assign", "x=0"}, input);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("without a winner"), std::string::npos);
  EXPECT_EQ(r.out.find(" wins"), std::string::npos);
}

TEST(CliPlay, EngineKeepsProvenWins) {
  // The falsifier wins forall x Pa(x) on abbaa; whatever the human does, the
  // engine must finish the job.
  const auto r = run({"play", sample("abbaa.model"), "-e", "forall x (Pa(x) | Pb(x))", "--as", "verifier"},
                     "0\n0\n0\n0\n0\n0\n");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("engine (falsifier) plays"), std::string::npos);
}

TEST(CliPlay, EngineAsVerifierWinsFoSentences) {
  RandomSentences gen(61, SentenceShape{SentenceFamily::FirstOrder, 3, {{"P", 1}, {"R", 2}}});
  std::mt19937_64 rng(62);
  for (int i = 0; i < 30; ++i) {
    const Formula phi = gen.next();
    const Structure a = random_structure(rng, 2, {{"P", 1}, {"R", 2}});
    const std::string model = temp_file("play" + std::to_string(i) + ".model", format_model(a));
    const bool truth = eval_fo_tarski(a, {}, phi);
    // The human takes the losing side and always plays move 0.
    const std::string role = truth ? "falsifier" : "verifier";
    std::string zeros;
    for (int k = 0; k < 50; ++k) zeros += "0\n";
    const auto s = run({"play", model, "-e", pretty_print(phi), "--as", role}, zeros);
    EXPECT_EQ(s.code, truth ? 0 : 1) << pretty_print(phi) << "\n" << s.out;
  }
}

TEST(CliSelftestBinary, HelpExitsZero) {
  const std::string cmd = std::string(GTS_BINARY) + " --help > /dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  const int missing = std::system((std::string(GTS_BINARY) + " eval /nonexistent -e T 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(missing), exit_code::kNoInput);
}
