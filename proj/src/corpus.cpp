#include "imbalml/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "imbalml/rng.hpp"

namespace imbalml {

using nlohmann::json;

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) throw ArgumentError("label space needs at least 2 classes");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw ArgumentError("label space: empty class name");
        if (!seen.insert(n).second) throw ArgumentError("label space: duplicate class name '" + n + "'");
    }
}

LabelSpace LabelSpace::default_emotions() {
    return LabelSpace({"anger", "fear", "joy", "sadness", "surprise"});
}

std::optional<std::size_t> LabelSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

Dataset::Dataset(LabelSpace space, std::vector<Record> records)
    : space_(std::move(space)), records_(std::move(records)) {
    std::unordered_set<std::string> ids;
    for (const auto& r : records_) {
        if (r.labels.size() != space_.size())
            throw ArgumentError("record '" + r.id + "': label vector length != class count");
        for (const auto v : r.labels)
            if (v > 1) throw ArgumentError("record '" + r.id + "': label value outside {0,1}");
        if (!ids.insert(r.id).second) throw ArgumentError("duplicate record id '" + r.id + "'");
    }
}

LabelMatrix Dataset::label_matrix() const {
    LabelMatrix m(records_.size(), space_.size());
    for (std::size_t i = 0; i < records_.size(); ++i)
        for (std::size_t j = 0; j < space_.size(); ++j) m(i, j) = records_[i].labels[j];
    return m;
}

namespace {

// RFC-4180 style reader: comma separated, double quotes escape by doubling,
// quoted fields may contain commas and newlines.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            row_has_content = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            row_has_content = true;
            break;
        case '\r':
            break;
        case '\n':
            if (row_has_content || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                row_has_content = false;
            }
            break;
        default:
            field.push_back(c);
            row_has_content = true;
            break;
        }
    }
    if (row_has_content || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::uint8_t parse_binary_label(const std::string& raw, std::size_t row_number) {
    if (raw == "0") return 0;
    if (raw == "1") return 1;
    throw ParseError("row " + std::to_string(row_number) + ": label value '" + raw +
                     "' is not 0 or 1");
}

Dataset load_csv(const std::filesystem::path& path, const LabelSpace& space) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open dataset file: " + path.string());
    auto rows = read_csv_rows(in);
    if (rows.empty()) throw EmptyDatasetError("empty dataset file: " + path.string());

    const auto& header = rows.front();
    std::vector<std::string> expected = {"id", "text"};
    expected.insert(expected.end(), space.names().begin(), space.names().end());
    if (header.size() < expected.size()) {
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (i >= header.size() || header[i] != expected[i])
                throw SchemaError("missing column '" + expected[i] + "' in " + path.string());
    }
    if (header.size() > expected.size())
        throw SchemaError("unexpected extra column '" + header[expected.size()] + "' in " +
                          path.string());
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (header[i] != expected[i])
            throw SchemaError("expected column '" + expected[i] + "' but found '" + header[i] +
                              "' in " + path.string());

    std::vector<Record> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != expected.size())
            throw ParseError("row " + std::to_string(r) + ": expected " +
                             std::to_string(expected.size()) + " fields, found " +
                             std::to_string(cells.size()));
        Record rec;
        rec.id = cells[0];
        rec.text = cells[1];
        rec.labels.reserve(space.size());
        for (std::size_t j = 0; j < space.size(); ++j)
            rec.labels.push_back(parse_binary_label(cells[2 + j], r));
        records.push_back(std::move(rec));
    }
    return Dataset(space, std::move(records));
}

Dataset load_jsonl(const std::filesystem::path& path, const LabelSpace& space) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open dataset file: " + path.string());

    std::vector<Record> records;
    std::string line;
    std::size_t line_number = 0;
    bool any_content = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        any_content = true;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("line " + std::to_string(line_number) + ": " + e.what());
        }
        if (!obj.is_object())
            throw ParseError("line " + std::to_string(line_number) + ": not a JSON object");
        if (!obj.contains("id")) throw SchemaError("missing field 'id' at line " + std::to_string(line_number));
        if (!obj.contains("text")) throw SchemaError("missing field 'text' at line " + std::to_string(line_number));

        Record rec;
        if (obj["id"].is_string()) rec.id = obj["id"].get<std::string>();
        else if (obj["id"].is_number_integer()) rec.id = std::to_string(obj["id"].get<long long>());
        else throw ParseError("line " + std::to_string(line_number) + ": 'id' must be string or integer");
        if (!obj["text"].is_string())
            throw ParseError("line " + std::to_string(line_number) + ": 'text' must be a string");
        rec.text = obj["text"].get<std::string>();

        for (const auto& name : space.names()) {
            if (!obj.contains(name)) throw SchemaError("missing field '" + name + "' at line " + std::to_string(line_number));
            const auto& v = obj[name];
            if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
                throw ParseError("line " + std::to_string(line_number) + ": field '" + name +
                                 "' is not 0 or 1");
            rec.labels.push_back(static_cast<std::uint8_t>(v.get<long long>()));
        }
        for (const auto& [key, value] : obj.items()) {
            (void)value;
            if (key != "id" && key != "text" && !space.index_of(key))
                throw SchemaError("unexpected field '" + key + "' at line " + std::to_string(line_number));
        }
        records.push_back(std::move(rec));
    }
    if (!any_content) throw EmptyDatasetError("empty dataset file: " + path.string());
    return Dataset(space, std::move(records));
}

} // namespace

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, const LabelSpace& space) {
    return format == DataFormat::kCsv ? load_csv(path, space) : load_jsonl(path, space);
}

void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write dataset file: " + path.string());
    if (format == DataFormat::kCsv) {
        out << "id,text";
        for (const auto& name : data.space().names()) out << ',' << name;
        out << '\n';
        for (const auto& rec : data.records()) {
            out << csv_escape(rec.id) << ',' << csv_escape(rec.text);
            for (const auto v : rec.labels) out << ',' << static_cast<int>(v);
            out << '\n';
        }
    } else {
        for (const auto& rec : data.records()) {
            json obj;
            obj["id"] = rec.id;
            obj["text"] = rec.text;
            for (std::size_t j = 0; j < data.space().size(); ++j)
                obj[data.space().names()[j]] = static_cast<int>(rec.labels[j]);
            out << obj.dump() << '\n';
        }
    }
}

namespace {

std::size_t train_size_for(std::size_t n, double fraction) {
    // floor of the exact product; the epsilon absorbs binary representation
    // noise like 10 * 0.3 == 2.9999...
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

} // namespace

std::pair<Dataset, Dataset> split_train_dev(const Dataset& data, double train_fraction,
                                            std::uint64_t seed, bool stratified) {
    if (!(train_fraction > 0.0) || train_fraction > 1.0)
        throw ArgumentError("train_fraction must lie in (0, 1]");
    if (data.size() == 0) throw ArgumentError("cannot split an empty dataset");

    const std::size_t n = data.size();
    const std::size_t n_train = train_size_for(n, train_fraction);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::size_t> train_idx;
    if (!stratified) {
        train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    } else {
        // Group by exact label signature, take a proportional share of each
        // group, then top up by largest fractional remainder.
        std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> groups;
        for (const std::size_t i : order) groups[data.records()[i].labels].push_back(i);

        std::vector<std::pair<double, const std::vector<std::size_t>*>> remainders;
        std::size_t taken = 0;
        for (auto& [sig, members] : groups) {
            (void)sig;
            const double share = static_cast<double>(members.size()) * train_fraction;
            const std::size_t base = train_size_for(members.size(), train_fraction);
            train_idx.insert(train_idx.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(base));
            taken += base;
            remainders.emplace_back(share - static_cast<double>(base), &members);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [frac, members] : remainders) {
            (void)frac;
            if (taken >= n_train) break;
            const std::size_t base = train_size_for(members->size(), train_fraction);
            if (base < members->size()) {
                train_idx.push_back((*members)[base]);
                ++taken;
            }
        }
    }

    std::vector<char> in_train(n, 0);
    for (const std::size_t i : train_idx) in_train[i] = 1;

    std::vector<Record> train_records, dev_records;
    train_records.reserve(train_idx.size());
    dev_records.reserve(n - train_idx.size());
    for (const std::size_t i : order) {
        if (in_train[i]) train_records.push_back(data.records()[i]);
        else dev_records.push_back(data.records()[i]);
    }
    return {Dataset(data.space(), std::move(train_records)),
            Dataset(data.space(), std::move(dev_records))};
}

LabelFrequencies label_frequencies(const Dataset& data) {
    LabelFrequencies freq;
    freq.counts.assign(data.space().size(), 0);
    freq.total = static_cast<long long>(data.size());
    for (const auto& rec : data.records())
        for (std::size_t j = 0; j < rec.labels.size(); ++j) freq.counts[j] += rec.labels[j];
    return freq;
}

Dataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
    SyntheticConfig cfg = config;
    if (cfg.class_names.empty()) cfg.class_names = LabelSpace::default_emotions().names();
    LabelSpace space(cfg.class_names);
    const std::size_t c = space.size();

    if (cfg.n < 1) throw ArgumentError("synthetic corpus needs N >= 1");
    if (cfg.prevalence.size() != c)
        throw ArgumentError("prevalence list length != class count");
    bool any_positive = false;
    for (const double p : cfg.prevalence) {
        if (p < 0.0 || p > 1.0) throw ArgumentError("prevalence values must lie in [0, 1]");
        if (p > 0.0) any_positive = true;
    }
    if (!any_positive) throw ArgumentError("all-zero prevalence produces no signal");
    if (cfg.noise_rate < 0.0 || cfg.noise_rate >= 1.0)
        throw ArgumentError("noise rate must lie in [0, 1)");

    if (cfg.cue_tokens.empty()) {
        cfg.cue_tokens.resize(c);
        for (std::size_t j = 0; j < c; ++j)
            cfg.cue_tokens[j] = {cfg.class_names[j] + "_cue1", cfg.class_names[j] + "_cue2",
                                 cfg.class_names[j] + "_cue3"};
    }
    if (cfg.cue_tokens.size() != c) throw ArgumentError("cue token lists length != class count");
    for (const auto& cues : cfg.cue_tokens)
        if (cues.empty()) throw ArgumentError("every class needs at least one cue token");

    Rng rng(seed);
    std::vector<Record> records;
    records.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        Record rec;
        rec.id = "s" + std::to_string(i);
        rec.labels.resize(c, 0);
        // labels first so that file recounts match the configured draws exactly
        for (std::size_t j = 0; j < c; ++j) rec.labels[j] = rng.bernoulli(cfg.prevalence[j]) ? 1 : 0;

        std::vector<std::string> tokens;
        for (std::size_t j = 0; j < c; ++j) {
            if (!rec.labels[j]) continue;
            const auto& cues = cfg.cue_tokens[j];
            tokens.push_back(cues[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(cues.size()) - 1))]);
        }
        for (std::size_t s = 0; s < cfg.noise_slots; ++s) {
            if (cfg.noise_rate > 0.0 && rng.bernoulli(cfg.noise_rate)) {
                const auto k = rng.uniform_int(0, static_cast<std::int64_t>(cfg.noise_vocab_size) - 1);
                tokens.push_back("filler" + std::to_string(k));
            }
        }
        rng.shuffle(tokens);

        std::string text;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t) text.push_back(' ');
            text += tokens[t];
        }
        rec.text = std::move(text);
        records.push_back(std::move(rec));
    }
    return Dataset(space, std::move(records));
}

} // namespace imbalml
