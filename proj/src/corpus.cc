#include "wazobia/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "wazobia/error.h"
#include "wazobia/rng.h"
#include "wazobia/unicode.h"

namespace wazobia {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Sentence sentence_from_tokens(std::span<const std::string> tokens,
                              Language language) {
  Sentence s;
  s.language = language;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      s.text += ' ';
      ++offset;
    }
    Token tok;
    tok.text = tokens[i];
    tok.normalized = normalize(tokens[i]);
    const std::u32string cps = unicode::to_utf32(tokens[i]);
    tok.start_char = offset;
    tok.end_char = offset + cps.size();
    tok.is_punct = !cps.empty() && std::all_of(cps.begin(), cps.end(), unicode::is_punct);
    offset = tok.end_char;
    s.text += tokens[i];
    s.tokens.push_back(std::move(tok));
  }
  return s;
}

CorpusReadResult parse_corpus(std::string_view content,
                              std::string_view source_prefix) {
  if (content.empty()) throw Error(ErrorCode::kEmptyFile, "corpus file is empty");
  CorpusReadResult result;
  Language language = Language::kUnknown;

  std::vector<std::string> words;
  std::vector<std::string> pos;
  std::vector<BioLabel> labels;
  int columns = 0;

  auto flush = [&]() {
    if (words.empty()) return;
    LabeledSentence ls;
    ls.sentence = sentence_from_tokens(words, language);
    if (columns == 3) ls.sentence.pos_tags = pos;
    result.repair_warnings += repair_bio(labels);
    ls.labels = labels;
    ls.source_id = std::string(source_prefix) + ":" +
                   std::to_string(result.sentences.size());
    result.sentences.push_back(std::move(ls));
    words.clear();
    pos.clear();
    labels.clear();
    columns = 0;
  };

  std::size_t line_no = 0;
  std::size_t at = 0;
  while (at < content.size()) {
    std::size_t nl = content.find('\n', at);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(at, nl - at);
    at = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      constexpr std::string_view kKey = "language:";
      if (body.starts_with(kKey)) {
        flush();
        language = parse_language(trim(body.substr(kKey.size())));
      }
      continue;
    }
    const auto fields = split_tabs(line);
    const int n = static_cast<int>(fields.size());
    if ((n != 2 && n != 3) || fields[0].empty() || (columns != 0 && n != columns)) {
      throw Error(ErrorCode::kBadLine,
                  "line " + std::to_string(line_no) + ": expected 2 or 3 " +
                      "tab-separated columns consistent within the sentence");
    }
    auto label = try_parse_label(fields.back());
    if (!label) {
      throw Error(ErrorCode::kBadTag, "line " + std::to_string(line_no) +
                                          ": unknown tag '" +
                                          std::string(fields.back()) + "'");
    }
    columns = n;
    words.emplace_back(fields[0]);
    if (n == 3) pos.emplace_back(fields[1]);
    labels.push_back(*label);
  }
  flush();
  return result;
}

CorpusReadResult read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), path.filename().string());
}

std::string format_corpus(std::span<const LabeledSentence> sentences) {
  std::string out;
  std::optional<Language> current;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& ls = sentences[i];
    const auto& s = ls.sentence;
    if (current != s.language) {
      out += "# language: ";
      out += language_name(s.language);
      out += '\n';
      current = s.language;
    }
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      out += s.tokens[t].text;
      out += '\t';
      if (s.pos_tags) {
        out += (*s.pos_tags)[t];
        out += '\t';
      }
      out += label_name(ls.labels[t]);
      out += '\n';
    }
    if (i + 1 < sentences.size()) out += '\n';
  }
  return out;
}

void write_corpus(std::span<const LabeledSentence> sentences,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << format_corpus(sentences);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  SplitSizes sizes{};
  sizes.train = static_cast<std::size_t>(std::floor(spec.train_frac * static_cast<double>(n) + 1e-9));
  sizes.val = static_cast<std::size_t>(std::floor(spec.val_frac * static_cast<double>(n) + 1e-9));
  sizes.test = n - sizes.train - sizes.val;
  return sizes;
}

CorpusSplit split(std::span<const LabeledSentence> corpus, const SplitSpec& spec) {
  if (corpus.size() < 3) {
    throw Error(ErrorCode::kCorpusTooSmall,
                "need at least 3 sentences to split, got " +
                    std::to_string(corpus.size()));
  }
  if (std::abs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must sum to 1");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));

  const SplitSizes sizes = split_sizes(corpus.size(), spec);
  CorpusSplit out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& item = corpus[order[i]];
    if (i < sizes.train) {
      out.train.push_back(item);
    } else if (i < sizes.train + sizes.val) {
      out.val.push_back(item);
    } else {
      out.test.push_back(item);
    }
  }
  return out;
}

std::vector<Sentence> sentences_of(std::span<const LabeledSentence> corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& ls : corpus) out.push_back(ls.sentence);
  return out;
}

}  // namespace wazobia
