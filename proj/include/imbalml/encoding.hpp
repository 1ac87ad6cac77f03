#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "imbalml/corpus.hpp"

namespace imbalml {

// Whitespace-token vocabulary with three reserved specials. Ids are dense in
// [0, size()).
class Vocabulary {
public:
    static constexpr std::int32_t kPad = 0;
    static constexpr std::int32_t kUnk = 1;
    static constexpr std::int32_t kCls = 2;

    // Tokens ranked by frequency, ties broken lexicographically; tokens seen
    // fewer than min_freq times are dropped; at most max_size entries total.
    static Vocabulary build(const Dataset& data, std::size_t max_size, std::size_t min_freq,
                            bool lowercase);

    std::int32_t id_of(std::string_view token) const; // kUnk when absent
    const std::string& token_of(std::int32_t id) const;
    std::size_t size() const { return tokens_.size(); }
    bool lowercase() const { return lowercase_; }

    void save(const std::filesystem::path& path) const; // token<TAB>id per line
    static Vocabulary load(const std::filesystem::path& path);

private:
    Vocabulary() = default;
    std::unordered_map<std::string, std::int32_t> ids_;
    std::vector<std::string> tokens_;
    bool lowercase_ = true;
};

struct EncodedBatch {
    std::size_t batch = 0;
    std::size_t max_len = 0;
    std::vector<std::int32_t> ids;  // batch * max_len, row-major
    std::vector<std::uint8_t> mask; // 1 at non-PAD positions

    std::int32_t id(std::size_t row, std::size_t pos) const { return ids[row * max_len + pos]; }
    std::uint8_t m(std::size_t row, std::size_t pos) const { return mask[row * max_len + pos]; }
};

std::vector<std::string> tokenize(std::string_view text, bool lowercase);

// CLS + tokens, padded or truncated to exactly max_len; mask marks non-PAD.
std::pair<std::vector<std::int32_t>, std::vector<std::uint8_t>>
encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len);

EncodedBatch encode_batch(const std::vector<std::string>& texts, const Vocabulary& vocab,
                          std::size_t max_len);

// Id-to-token mapping with PAD and CLS stripped.
std::vector<std::string> decode(const std::vector<std::int32_t>& ids, const Vocabulary& vocab);

// Dataset pre-encoded for training: token ids, masks and the label matrix.
struct EncodedDataset {
    EncodedBatch tokens;
    LabelMatrix labels;

    std::size_t size() const { return tokens.batch; }
    EncodedBatch slice(const std::vector<std::size_t>& rows) const;
    LabelMatrix label_slice(const std::vector<std::size_t>& rows) const;
};

EncodedDataset encode_dataset(const Dataset& data, const Vocabulary& vocab, std::size_t max_len);

} // namespace imbalml
