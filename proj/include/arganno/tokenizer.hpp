#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace arganno {

/// Subword vocabulary. Special tokens occupy ids [0, num_specials); learned
/// pieces follow. Word-initial pieces carry the "▁" sentinel, so decoding is
/// lossless at the character level for in-vocabulary text.
struct Vocab {
  static constexpr int mask_id = 0;
  static constexpr int sep_id = 1;
  static constexpr int cls_id = 2;
  static constexpr int pad_id = 3;
  static constexpr int unk_id = 4;
  static constexpr int source_id = 5;  // <Source>
  static constexpr int target_id = 6;  // <Target>
  static constexpr int ignore_id = 7;  // <-> : excluded from the loss
  static constexpr int num_specials = 8;

  std::vector<std::string> pieces;
  std::unordered_map<std::string, int> ids;  // piece -> token id

  int size() const { return num_specials + static_cast<int>(pieces.size()); }
  int piece_id(const std::string& piece) const;  // -1 when absent
  bool is_special(int id) const { return id >= 0 && id < num_specials; }
  std::string token_name(int id) const;
};

struct TokenizedText {
  std::vector<int> token_ids;
  std::vector<int> word_alignment;   // first-subword index per word
  std::vector<int> unit_boundaries;  // sentence/paragraph boundaries (token space)
};

/// Greedy pair-merge training over whitespace-split words. `size` is the
/// total vocabulary budget including specials and the base character
/// inventory; frequency ties break lexicographically.
Vocab train_vocab(const std::vector<std::string>& corpus, int size);

/// Longest-match segmentation; unknown characters become <unk> (a word-initial
/// unknown absorbs the sentinel).
TokenizedText encode_words(const std::vector<std::string>& words, const Vocab& vocab);

/// Inverse of encode_words up to single-space word separators.
std::string decode(const std::vector<int>& token_ids, const Vocab& vocab);

void save_vocab(const Vocab& vocab, const std::string& path);
Vocab load_vocab(const std::string& path);

}  // namespace arganno
