#include "imbalml/encoding.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace imbalml {

namespace {
const std::string kPadToken = "<pad>";
const std::string kUnkToken = "<unk>";
const std::string kClsToken = "<cls>";

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
} // namespace

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            std::string_view tok = text.substr(start, i - start);
            tokens.push_back(lowercase ? to_lower(tok) : std::string(tok));
        }
    }
    return tokens;
}

Vocabulary Vocabulary::build(const Dataset& data, std::size_t max_size, std::size_t min_freq,
                             bool lowercase) {
    if (max_size <= 3) throw ArgumentError("vocabulary max_size must exceed the 3 special tokens");

    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& rec : data.records())
        for (auto& tok : tokenize(rec.text, lowercase)) ++counts[tok];

    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.lowercase_ = lowercase;
    vocab.tokens_ = {kPadToken, kUnkToken, kClsToken};
    for (const auto& [tok, freq] : ranked) {
        if (freq < min_freq) break;
        if (vocab.tokens_.size() >= max_size) break;
        vocab.tokens_.push_back(tok);
    }
    for (std::size_t i = 0; i < vocab.tokens_.size(); ++i)
        vocab.ids_[vocab.tokens_[i]] = static_cast<std::int32_t>(i);
    return vocab;
}

std::int32_t Vocabulary::id_of(std::string_view token) const {
    const std::string key = lowercase_ ? to_lower(token) : std::string(token);
    const auto it = ids_.find(key);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(std::int32_t id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
        throw ArgumentError("token id out of range: " + std::to_string(id));
    return tokens_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write vocabulary file: " + path.string());
    out << "#lowercase\t" << (lowercase_ ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << i << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open vocabulary file: " + path.string());
    Vocabulary vocab;
    vocab.tokens_.clear();
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError("vocabulary line " + std::to_string(line_number) + ": missing tab");
        const std::string token = line.substr(0, tab);
        const std::string value = line.substr(tab + 1);
        if (token == "#lowercase") {
            vocab.lowercase_ = value == "1";
            continue;
        }
        long long id = 0;
        try {
            id = std::stoll(value);
        } catch (const std::exception&) {
            throw ParseError("vocabulary line " + std::to_string(line_number) + ": bad id '" +
                             value + "'");
        }
        if (id != static_cast<long long>(vocab.tokens_.size()))
            throw ParseError("vocabulary line " + std::to_string(line_number) +
                             ": ids must be dense and ascending");
        vocab.tokens_.push_back(token);
    }
    if (vocab.tokens_.size() < 3 || vocab.tokens_[0] != kPadToken || vocab.tokens_[1] != kUnkToken ||
        vocab.tokens_[2] != kClsToken)
        throw SchemaError("vocabulary file lacks the reserved special tokens");
    for (std::size_t i = 0; i < vocab.tokens_.size(); ++i)
        vocab.ids_[vocab.tokens_[i]] = static_cast<std::int32_t>(i);
    return vocab;
}

std::pair<std::vector<std::int32_t>, std::vector<std::uint8_t>>
encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len) {
    if (max_len < 2) throw ArgumentError("max_len must be at least 2");
    std::vector<std::int32_t> ids(max_len, Vocabulary::kPad);
    std::vector<std::uint8_t> mask(max_len, 0);
    ids[0] = Vocabulary::kCls;
    mask[0] = 1;
    const auto tokens = tokenize(text, vocab.lowercase());
    for (std::size_t t = 0; t < tokens.size() && t + 1 < max_len; ++t) {
        ids[t + 1] = vocab.id_of(tokens[t]);
        mask[t + 1] = 1;
    }
    return {std::move(ids), std::move(mask)};
}

EncodedBatch encode_batch(const std::vector<std::string>& texts, const Vocabulary& vocab,
                          std::size_t max_len) {
    EncodedBatch batch;
    batch.batch = texts.size();
    batch.max_len = max_len;
    batch.ids.reserve(texts.size() * max_len);
    batch.mask.reserve(texts.size() * max_len);
    for (const auto& text : texts) {
        auto [ids, mask] = encode(text, vocab, max_len);
        batch.ids.insert(batch.ids.end(), ids.begin(), ids.end());
        batch.mask.insert(batch.mask.end(), mask.begin(), mask.end());
    }
    return batch;
}

std::vector<std::string> decode(const std::vector<std::int32_t>& ids, const Vocabulary& vocab) {
    std::vector<std::string> tokens;
    for (const auto id : ids) {
        if (id == Vocabulary::kPad || id == Vocabulary::kCls) continue;
        tokens.push_back(vocab.token_of(id));
    }
    return tokens;
}

EncodedBatch EncodedDataset::slice(const std::vector<std::size_t>& rows) const {
    EncodedBatch out;
    out.batch = rows.size();
    out.max_len = tokens.max_len;
    out.ids.reserve(rows.size() * tokens.max_len);
    out.mask.reserve(rows.size() * tokens.max_len);
    for (const std::size_t r : rows) {
        const auto begin = r * tokens.max_len;
        out.ids.insert(out.ids.end(), tokens.ids.begin() + static_cast<std::ptrdiff_t>(begin),
                       tokens.ids.begin() + static_cast<std::ptrdiff_t>(begin + tokens.max_len));
        out.mask.insert(out.mask.end(), tokens.mask.begin() + static_cast<std::ptrdiff_t>(begin),
                        tokens.mask.begin() + static_cast<std::ptrdiff_t>(begin + tokens.max_len));
    }
    return out;
}

LabelMatrix EncodedDataset::label_slice(const std::vector<std::size_t>& rows) const {
    LabelMatrix out(rows.size(), labels.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < labels.cols; ++j) out(i, j) = labels(rows[i], j);
    return out;
}

EncodedDataset encode_dataset(const Dataset& data, const Vocabulary& vocab, std::size_t max_len) {
    EncodedDataset encoded;
    std::vector<std::string> texts;
    texts.reserve(data.size());
    for (const auto& rec : data.records()) texts.push_back(rec.text);
    encoded.tokens = encode_batch(texts, vocab, max_len);
    encoded.labels = data.label_matrix();
    return encoded;
}

} // namespace imbalml
