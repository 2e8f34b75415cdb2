#include "arganno/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "arganno/document.hpp"
#include "arganno/errors.hpp"

namespace arganno {

namespace {

constexpr const char* kSentinel = "\xe2\x96\x81";  // ▁

const char* kSpecialNames[Vocab::num_specials] = {
    "<mask>", "<sep>", "<cls>", "<pad>", "<unk>", "<Source>", "<Target>", "<->"};

size_t utf8_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  return 4;
}

std::vector<std::string> codepoints(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    size_t len = utf8_len(static_cast<unsigned char>(s[i]));
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

int Vocab::piece_id(const std::string& piece) const {
  auto it = ids.find(piece);
  return it == ids.end() ? -1 : it->second;
}

std::string Vocab::token_name(int id) const {
  if (id >= 0 && id < num_specials) return kSpecialNames[id];
  int p = id - num_specials;
  if (p >= 0 && p < static_cast<int>(pieces.size())) return pieces[static_cast<size_t>(p)];
  throw UsageError("token id " + std::to_string(id) + " out of range");
}

Vocab train_vocab(const std::vector<std::string>& corpus, int size) {
  // Word frequency table; each word is a symbol sequence starting with ▁.
  std::map<std::vector<std::string>, long> word_freq;
  std::set<std::string> alphabet;
  alphabet.insert(kSentinel);
  alphabet.insert(":");  // relation layouts always need a colon token
  for (const std::string& text : corpus) {
    for (const TextRange& wr : split_words(text)) {
      std::vector<std::string> symbols;
      symbols.push_back(kSentinel);
      for (std::string& cp : codepoints(std::string_view(text).substr(
               static_cast<size_t>(wr.begin), static_cast<size_t>(wr.length())))) {
        alphabet.insert(cp);
        symbols.push_back(std::move(cp));
      }
      word_freq[symbols]++;
    }
  }

  int base = static_cast<int>(alphabet.size()) + Vocab::num_specials;
  if (size < base)
    throw UsageError("vocab size " + std::to_string(size) + " below base inventory " +
                     std::to_string(base));
  int merge_budget = size - base;

  std::vector<std::pair<std::vector<std::string>, long>> words(word_freq.begin(),
                                                               word_freq.end());
  std::vector<std::string> merged_pieces;
  for (int m = 0; m < merge_budget; ++m) {
    std::map<std::pair<std::string, std::string>, long> pair_counts;
    for (const auto& [symbols, freq] : words) {
      for (size_t i = 0; i + 1 < symbols.size(); ++i)
        pair_counts[{symbols[i], symbols[i + 1]}] += freq;
    }
    if (pair_counts.empty()) break;
    // Highest count wins; ties break lexicographically (std::map order).
    auto best = pair_counts.begin();
    for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it)
      if (it->second > best->second) best = it;
    if (best->second < 2) break;  // nothing left worth merging
    std::string joined = best->first.first + best->first.second;
    merged_pieces.push_back(joined);
    for (auto& [symbols, freq] : words) {
      std::vector<std::string> next;
      size_t i = 0;
      while (i < symbols.size()) {
        if (i + 1 < symbols.size() && symbols[i] == best->first.first &&
            symbols[i + 1] == best->first.second) {
          next.push_back(joined);
          i += 2;
        } else {
          next.push_back(symbols[i]);
          ++i;
        }
      }
      symbols = std::move(next);
    }
  }

  Vocab vocab;
  for (const std::string& a : alphabet) vocab.pieces.push_back(a);
  for (const std::string& p : merged_pieces) vocab.pieces.push_back(p);
  for (size_t i = 0; i < vocab.pieces.size(); ++i)
    vocab.ids.emplace(vocab.pieces[i], static_cast<int>(i) + Vocab::num_specials);
  return vocab;
}

TokenizedText encode_words(const std::vector<std::string>& words, const Vocab& vocab) {
  size_t max_piece = 1;
  for (const std::string& p : vocab.pieces) max_piece = std::max(max_piece, p.size());

  // Longest piece matching at position i; (-1, 0) when nothing matches.
  auto match_at = [&](const std::string& s, size_t i) -> std::pair<int, size_t> {
    size_t limit = std::min(max_piece, s.size() - i);
    for (size_t len = limit; len >= 1; --len) {
      int id = vocab.piece_id(s.substr(i, len));
      if (id >= 0) return {id, len};
    }
    return {-1, 0};
  };

  const std::string sentinel = kSentinel;
  TokenizedText out;
  for (const std::string& word : words) {
    out.word_alignment.push_back(static_cast<int>(out.token_ids.size()));
    std::string rendered = sentinel + word;
    size_t i = 0;
    while (i < rendered.size()) {
      auto [id, len] = match_at(rendered, i);
      if (id >= 0) {
        // A bare sentinel followed by an unknown character collapses into one
        // <unk> so an unknown word start yields a single token.
        if (i == 0 && len == sentinel.size() &&
            rendered.compare(0, len, sentinel) == 0 && len < rendered.size() &&
            match_at(rendered, len).first < 0) {
          out.token_ids.push_back(Vocab::unk_id);
          size_t skip = utf8_len(static_cast<unsigned char>(rendered[len]));
          i = len + std::min(skip, rendered.size() - len);
          continue;
        }
        out.token_ids.push_back(id);
        i += len;
      } else {
        out.token_ids.push_back(Vocab::unk_id);
        size_t skip = utf8_len(static_cast<unsigned char>(rendered[i]));
        i += std::min(skip, rendered.size() - i);
      }
    }
  }
  return out;
}

std::string decode(const std::vector<int>& token_ids, const Vocab& vocab) {
  std::string flat;
  for (int id : token_ids) {
    if (id == Vocab::unk_id) {
      flat += "\xef\xbf\xbd";  // U+FFFD
      continue;
    }
    if (vocab.is_special(id)) continue;
    flat += vocab.token_name(id);
  }
  std::string out;
  size_t i = 0;
  const std::string sentinel = kSentinel;
  while (i < flat.size()) {
    if (flat.compare(i, sentinel.size(), sentinel) == 0) {
      if (!out.empty()) out += ' ';
      i += sentinel.size();
    } else {
      out += flat[i];
      ++i;
    }
  }
  return out;
}

void save_vocab(const Vocab& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocab file " + path);
  out << "arganno-vocab v1\n";
  out << "specials";
  for (const char* name : kSpecialNames) out << ' ' << name;
  out << "\npieces " << vocab.pieces.size() << "\n";
  for (const std::string& p : vocab.pieces) out << p << "\n";
}

Vocab load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read vocab file " + path);
  std::string line;
  if (!std::getline(in, line) || line != "arganno-vocab v1")
    throw ParseError("vocab file " + path + ": bad header");
  if (!std::getline(in, line) || !line.starts_with("specials"))
    throw ParseError("vocab file " + path + ": missing specials line");
  {
    std::istringstream check(line);
    std::string word;
    check >> word;
    for (const char* name : kSpecialNames) {
      check >> word;
      if (word != name)
        throw ParseError("vocab file " + path + ": unexpected special " + word);
    }
  }
  if (!std::getline(in, line) || !line.starts_with("pieces "))
    throw ParseError("vocab file " + path + ": missing piece count");
  long count = std::stol(line.substr(7));
  Vocab vocab;
  for (long i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw ParseError("vocab file " + path + ": truncated piece list");
    vocab.pieces.push_back(line);
    vocab.ids.emplace(line, static_cast<int>(i) + Vocab::num_specials);
  }
  return vocab;
}

}  // namespace arganno
