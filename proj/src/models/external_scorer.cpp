#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "sgid/corpus.hpp"
#include "sgid/error.hpp"
#include "sgid/models.hpp"
#include "sgid/text.hpp"

namespace sgid {

ScorerSpec ScorerSpec::parse(std::string_view s) {
  ScorerSpec spec;
  if (s.starts_with("cmd:")) {
    spec.kind = Kind::kCommand;
    spec.target = std::string(s.substr(4));
  } else if (s.starts_with("file:")) {
    spec.target = std::string(s.substr(5));
  } else {
    spec.target = std::string(s);
  }
  if (spec.target.empty()) throw UsageError("empty scorer specification");
  return spec;
}

std::unordered_map<std::string, double> parse_score_tsv(std::istream& in,
                                                        std::string_view source) {
  std::unordered_map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail("expected id<TAB>probability");
    std::string id = line.substr(0, tab);
    std::string num = text::trim(std::string_view(line).substr(tab + 1));
    if (id.empty()) fail("empty id");
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
      fail("probability '" + std::string(num) + "' is not a number");
    }
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      fail("probability " + std::string(num) + " for id " + id + " outside [0,1]");
    }
    if (!out.emplace(id, p).second) fail("duplicate id " + id);
  }
  return out;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

std::unordered_map<std::string, double> run_command(const std::string& command,
                                                    const Corpus& corpus) {
  namespace fs = std::filesystem;
  std::random_device rd;
  fs::path input = fs::temp_directory_path() /
                   ("sgid-scorer-" + std::to_string(rd()) + "-" + std::to_string(rd()) + ".jsonl");
  write_jsonl(corpus, input);
  std::string full = "(" + command + ") < " + shell_quote(input.string());
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) {
    fs::remove(input);
    throw DataError("cannot start scorer command: " + command);
  }
  std::string output;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), got);
  int status = pclose(pipe);
  std::error_code ec;
  fs::remove(input, ec);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw DataError("scorer command failed (exit status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) +
                    "): " + command);
  }
  std::istringstream in(output);
  return parse_score_tsv(in, "scorer output");
}

}  // namespace

std::unordered_map<std::string, double> external_scores(const ScorerSpec& spec,
                                                        const Corpus& corpus) {
  std::unordered_map<std::string, double> scores;
  if (spec.kind == ScorerSpec::Kind::kCommand) {
    scores = run_command(spec.target, corpus);
  } else {
    std::ifstream in(spec.target, std::ios::binary);
    if (!in) throw DataError("cannot read score file " + spec.target);
    scores = parse_score_tsv(in, spec.target);
  }
  for (const LabeledComment& item : corpus.items) {
    if (!scores.contains(item.comment.id)) {
      throw DataError("scorer output is missing id " + item.comment.id);
    }
  }
  return scores;
}

}  // namespace sgid
