#include "confgate/io.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "confgate/tuner.hpp"

namespace confgate {

namespace {

constexpr char kEmbeddingMagic[4] = {'C', 'G', 'E', 'B'};
constexpr char kCacheMagic[4] = {'C', 'G', 'N', 'C'};

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// Text files may use tab/CR/LF but no other control bytes; anything else is
// a (possibly corrupted) binary payload.
bool looks_like_text(const std::vector<unsigned char>& bytes) {
    const std::size_t probe = std::min<std::size_t>(bytes.size(), 4096);
    for (std::size_t i = 0; i < probe; ++i) {
        if (bytes[i] < 0x20 && bytes[i] != '\t' && bytes[i] != '\r' && bytes[i] != '\n') {
            return false;
        }
    }
    return true;
}

bool utf8_valid(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        if (b0 < 0x80) {
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0 && b0 >= 0xC2) {
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0 && b0 <= 0xF4) {
            len = 4;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t j = 1; j < len; ++j) {
            if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) return false;
        }
        // Reject overlong encodings and surrogates.
        if (len == 3) {
            const auto b1 = static_cast<unsigned char>(s[i + 1]);
            if (b0 == 0xE0 && b1 < 0xA0) return false;
            if (b0 == 0xED && b1 >= 0xA0) return false;
        }
        if (len == 4) {
            const auto b1 = static_cast<unsigned char>(s[i + 1]);
            if (b0 == 0xF0 && b1 < 0x90) return false;
            if (b0 == 0xF4 && b1 >= 0x90) return false;
        }
        i += len;
    }
    return true;
}

class ByteWriter {
public:
    void raw(const void* p, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), bytes, bytes + n);
    }
    void u16(std::uint16_t v) {
        buf_.push_back(static_cast<unsigned char>(v & 0xFF));
        buf_.push_back(static_cast<unsigned char>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }

    const std::vector<unsigned char>& bytes() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class ByteReader {
public:
    ByteReader(const std::vector<unsigned char>& buf, std::string path)
        : buf_(buf), path_(std::move(path)) {}

    std::size_t offset() const { return pos_; }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t offset) const {
        throw ValidationError(path_ + ": " + msg + " at offset " + std::to_string(offset));
    }

    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) {
            fail("truncated: need " + std::to_string(n) + " bytes, have " +
                 std::to_string(buf_.size() - pos_));
        }
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(buf_[pos_] | (buf_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }

    std::string str(const char* what) {
        const std::size_t start = pos_;
        const std::uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), len);
        pos_ += len;
        if (s.empty()) fail_at(std::string("empty ") + what, start);
        if (!utf8_valid(s)) fail_at(std::string("invalid UTF-8 in ") + what, start);
        for (char c : s) {
            if (static_cast<unsigned char>(c) < 0x20) {
                fail_at(std::string("control byte in ") + what, start);
            }
        }
        return s;
    }

    void expect_magic(const char (&magic)[4]) {
        need(4);
        if (std::memcmp(buf_.data() + pos_, magic, 4) != 0) {
            fail("bad magic");
        }
        pos_ += 4;
    }

    void expect_end() const {
        if (pos_ != buf_.size()) {
            fail("trailing bytes (" + std::to_string(buf_.size() - pos_) + ")");
        }
    }

private:
    const std::vector<unsigned char>& buf_;
    std::string path_;
    std::size_t pos_ = 0;
};

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based line where the row starts
};

// RFC-4180: quoted fields may contain commas, quotes (doubled) and
// newlines; rows end at LF or CRLF.
std::vector<CsvRow> parse_csv(std::string_view text, const std::string& path) {
    std::vector<CsvRow> rows;
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool was_quoted = false;   // current field came from a quoted region
    bool has_content = false;  // current row has any parsed content
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto bad = [&](const std::string& msg) -> void {
        throw ValidationError(path + ": " + msg + " at line " + std::to_string(line));
    };
    auto end_field = [&]() {
        fields.push_back(std::move(cur));
        cur.clear();
        was_quoted = false;
    };
    auto end_row = [&]() {
        end_field();
        rows.push_back({std::move(fields), row_line});
        fields.clear();
        has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                cur.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (was_quoted || !cur.empty()) bad("stray quote");
                in_quotes = true;
                was_quoted = true;
                has_content = true;
                break;
            case ',':
                end_field();
                has_content = true;
                break;
            case '\r':
                if (i + 1 >= text.size() || text[i + 1] != '\n') bad("bare carriage return");
                break;
            case '\n':
                if (has_content || !cur.empty() || !fields.empty()) {
                    end_row();
                } else if (i + 1 < text.size()) {
                    bad("empty line");
                }
                ++line;
                row_line = line;
                break;
            default:
                if (was_quoted) bad("unexpected character after closing quote");
                cur.push_back(c);
                has_content = true;
                break;
        }
    }
    if (in_quotes) bad("unterminated quoted field");
    if (has_content || !cur.empty() || !fields.empty()) end_row();
    return rows;
}

bool csv_needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_csv_field(std::string& out, std::string_view field) {
    if (!csv_needs_quoting(field)) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view tok, const std::string& path, std::size_t line) {
    double value = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError(path + ": bad number '" + std::string(tok) + "' at line " +
                              std::to_string(line));
    }
    return value;
}

void reject_violations(const std::string& path, const std::vector<std::string>& violations) {
    if (violations.empty()) return;
    std::string msg = path + ": invalid content:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
}

EmbeddingSet read_embedding_binary(const std::vector<unsigned char>& bytes,
                                   const std::string& path) {
    ByteReader r(bytes, path);
    r.expect_magic(kEmbeddingMagic);
    const auto version = r.u16();
    if (version != kFormatVersion) {
        r.fail_at("unsupported format version " + std::to_string(version), 4);
    }
    EmbeddingSet set;
    set.dim = r.u32();
    if (set.dim == 0) r.fail_at("dim must be positive", 6);
    const auto count = r.u64();
    set.name = r.str("set name");

    set.items.reserve(count < (1u << 20) ? count : 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        EmbeddingItem item;
        item.id = r.str("sample id");
        item.values.reserve(set.dim);
        const std::size_t values_at = r.offset();
        for (std::size_t j = 0; j < set.dim; ++j) {
            const float v = r.f32();
            if (!std::isfinite(v)) r.fail_at("non-finite value for " + item.id, values_at);
            item.values.push_back(static_cast<double>(v));
        }
        set.items.push_back(std::move(item));
    }
    r.expect_end();
    reject_violations(path, validate_embedding_set(set));
    return set;
}

EmbeddingSet read_embedding_csv(const std::vector<unsigned char>& bytes,
                                const std::string& path) {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    auto rows = parse_csv(text, path);
    std::size_t first = 0;
    if (!rows.empty() && !rows[0].fields.empty() && rows[0].fields[0] == "sample_id") {
        first = 1;  // optional header row
    }
    if (rows.size() <= first) {
        throw ValidationError(path + ": no data rows");
    }

    EmbeddingSet set;
    set.name = file_stem(path);
    set.dim = rows[first].fields.size() - 1;
    if (set.dim == 0) {
        throw ValidationError(path + ": rows need at least one value column at line " +
                              std::to_string(rows[first].line));
    }
    for (std::size_t i = first; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != set.dim + 1) {
            throw ValidationError(path + ": expected " + std::to_string(set.dim + 1) +
                                  " fields, got " + std::to_string(row.fields.size()) +
                                  " at line " + std::to_string(row.line));
        }
        EmbeddingItem item;
        item.id = row.fields[0];
        if (item.id.empty()) {
            throw ValidationError(path + ": empty sample_id at line " + std::to_string(row.line));
        }
        item.values.reserve(set.dim);
        for (std::size_t j = 1; j < row.fields.size(); ++j) {
            // Values are stored as f32 by the binary format; round CSV input
            // the same way so both ingest paths agree.
            const double v = parse_double(row.fields[j], path, row.line);
            item.values.push_back(static_cast<double>(static_cast<float>(v)));
        }
        set.items.push_back(std::move(item));
    }
    reject_violations(path, validate_embedding_set(set));
    return set;
}

}  // namespace

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open " + path + ": " + std::strerror(errno));
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    if (f.bad()) {
        throw IoError("read failed for " + path);
    }
    return bytes;
}

void write_file_exclusive(const std::string& path, const void* data, std::size_t size) {
    std::FILE* f = std::fopen(path.c_str(), "wbx");
    if (f == nullptr) {
        if (errno == EEXIST) {
            throw IoError("output " + path + " already exists");
        }
        throw IoError("cannot create " + path + ": " + std::strerror(errno));
    }
    const std::size_t written = size == 0 ? 0 : std::fwrite(data, 1, size, f);
    const bool ok = written == size && std::fclose(f) == 0;
    if (!ok) {
        throw IoError("write failed for " + path);
    }
}

void write_embedding_file(const std::string& path, const EmbeddingSet& set) {
    reject_violations("embedding set " + set.name, validate_embedding_set(set));
    ByteWriter w;
    w.raw(kEmbeddingMagic, 4);
    w.u16(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(set.dim));
    w.u64(set.items.size());
    w.str(set.name);
    for (const auto& item : set.items) {
        w.str(item.id);
        for (double v : item.values) w.f32(static_cast<float>(v));
    }
    write_file_exclusive(path, w.bytes().data(), w.bytes().size());
}

EmbeddingSet read_embedding_set(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kEmbeddingMagic, 4) == 0) {
        return read_embedding_binary(bytes, path);
    }
    if (looks_like_text(bytes)) {
        return read_embedding_csv(bytes, path);
    }
    throw ValidationError(path + ": bad magic at offset 0");
}

void write_prediction_file(const std::string& path, const PredictionSet& preds) {
    std::string out = "sample_id,predicted_label,true_label\n";
    std::unordered_set<std::string_view> seen;
    for (const auto& r : preds.records) {
        if (!seen.insert(r.sample_id).second) {
            throw ValidationError("duplicate sample_id " + r.sample_id + " in predictions");
        }
        append_csv_field(out, r.sample_id);
        out.push_back(',');
        append_csv_field(out, r.predicted_label);
        out.push_back(',');
        append_csv_field(out, r.true_label);
        out.push_back('\n');
    }
    write_file_exclusive(path, out.data(), out.size());
}

PredictionSet read_prediction_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    auto rows = parse_csv(text, path);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"sample_id", "predicted_label",
                                                                   "true_label"}) {
        throw ValidationError(path +
                              ": bad header at line 1, want sample_id,predicted_label,true_label");
    }

    PredictionSet preds;
    preds.classifier_name = file_stem(path);
    preds.records.reserve(rows.size() - 1);
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 3) {
            throw ValidationError(path + ": expected 3 fields, got " +
                                  std::to_string(row.fields.size()) + " at line " +
                                  std::to_string(row.line));
        }
        if (row.fields[0].empty()) {
            throw ValidationError(path + ": empty sample_id at line " + std::to_string(row.line));
        }
        preds.records.push_back({row.fields[0], row.fields[1], row.fields[2]});
        if (!seen.insert(preds.records.back().sample_id).second) {
            throw ValidationError(path + ": duplicate sample_id " + row.fields[0] + " at line " +
                                  std::to_string(row.line));
        }
    }
    return preds;
}

void write_neighbor_cache_file(const std::string& path, const NeighborCache& cache) {
    if (cache.k == 0) {
        throw ValidationError("cache depth k must be positive");
    }
    ByteWriter w;
    w.raw(kCacheMagic, 4);
    w.u16(kFormatVersion);
    w.u32(cache.k);
    w.u64(cache.entries.size());
    w.str(cache.base_set_name);
    w.str(cache.embedder_name);
    for (const auto& entry : cache.entries) {
        if (entry.neighbors.size() != cache.k) {
            throw ValidationError("entry " + entry.sample_id + " has " +
                                  std::to_string(entry.neighbors.size()) + " neighbors, want " +
                                  std::to_string(cache.k));
        }
        w.str(entry.sample_id);
        double prev = -1.0;
        for (const auto& nb : entry.neighbors) {
            if (nb.distance < prev) {
                throw ValidationError("entry " + entry.sample_id + " distances not ascending");
            }
            prev = nb.distance;
            w.str(nb.id);
            w.f32(static_cast<float>(nb.distance));
        }
    }
    write_file_exclusive(path, w.bytes().data(), w.bytes().size());
}

NeighborCache read_neighbor_cache_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r(bytes, path);
    r.expect_magic(kCacheMagic);
    const auto version = r.u16();
    if (version != kFormatVersion) {
        r.fail_at("unsupported format version " + std::to_string(version), 4);
    }
    NeighborCache cache;
    cache.k = r.u32();
    if (cache.k == 0) r.fail_at("k must be positive", 6);
    const auto count = r.u64();
    cache.base_set_name = r.str("base set name");
    cache.embedder_name = r.str("embedder name");

    std::unordered_set<std::string> seen;
    cache.entries.reserve(count < (1u << 20) ? count : 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        NeighborCacheEntry entry;
        entry.sample_id = r.str("sample id");
        if (!seen.insert(entry.sample_id).second) {
            r.fail("duplicate sample id " + entry.sample_id);
        }
        entry.neighbors.reserve(cache.k);
        double prev = -1.0;
        for (std::uint32_t j = 0; j < cache.k; ++j) {
            Neighbor nb;
            nb.id = r.str("neighbor id");
            const std::size_t dist_at = r.offset();
            nb.distance = static_cast<double>(r.f32());
            if (!std::isfinite(nb.distance) || nb.distance < 0.0 || nb.distance > 2.0) {
                r.fail_at("distance out of [0, 2] for " + entry.sample_id, dist_at);
            }
            if (nb.distance < prev) {
                r.fail_at("distances not ascending for " + entry.sample_id, dist_at);
            }
            prev = nb.distance;
            entry.neighbors.push_back(std::move(nb));
        }
        cache.entries.push_back(std::move(entry));
    }
    r.expect_end();
    return cache;
}

void write_split_file(const std::string& path, const Split& split) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, ids] : split) {
        j[name] = ids;
    }
    write_json_file(path, j);
}

Split read_split_file(const std::string& path) {
    const auto j = read_json_file(path);
    if (!j.is_object()) {
        throw ValidationError(path + ": split file must be a JSON object");
    }
    Split split;
    std::unordered_map<std::string, std::string> owner;  // sample id -> split name
    for (const auto& [name, value] : j.items()) {
        if (!value.is_array()) {
            throw ValidationError(path + ": split '" + name + "' must be an array");
        }
        std::vector<std::string> ids;
        ids.reserve(value.size());
        for (const auto& v : value) {
            if (!v.is_string()) {
                throw ValidationError(path + ": split '" + name + "' has a non-string entry");
            }
            ids.push_back(v.get<std::string>());
            auto [it, inserted] = owner.emplace(ids.back(), name);
            if (!inserted) {
                throw ValidationError(path + ": sample " + ids.back() + " appears in splits '" +
                                      it->second + "' and '" + name + "'");
            }
        }
        split.emplace(name, std::move(ids));
    }
    return split;
}

namespace {

// std::shuffle leaves the permutation implementation-defined, so seeded
// splits use an explicit Fisher-Yates to stay reproducible everywhere.
template <typename T, typename Rng>
void seeded_shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace

Split make_split(const PredictionSet& preds, double train_fraction, std::size_t subsets,
                 std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("train fraction must lie in (0, 1), got " +
                              std::to_string(train_fraction));
    }
    if (subsets < 1) {
        throw ValidationError("subset count must be at least 1");
    }
    if (preds.records.empty()) {
        throw ValidationError("prediction set is empty");
    }

    std::mt19937_64 rng(seed);
    std::vector<std::string> ids;
    ids.reserve(preds.records.size());
    for (const auto& r : preds.records) ids.push_back(r.sample_id);
    seeded_shuffle(ids, rng);

    const auto n = static_cast<double>(ids.size());
    const auto train_count = static_cast<std::size_t>(std::llround(train_fraction * n));

    Split split;
    auto& train = split["train"];
    train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_count));

    std::unordered_set<std::string_view> test_ids(ids.begin() + static_cast<std::ptrdiff_t>(train_count),
                                                  ids.end());

    // Distinct test labels in record order, then a seeded shuffle decides
    // the round-robin subset assignment.
    std::vector<std::string> labels;
    std::unordered_set<std::string_view> label_seen;
    for (const auto& r : preds.records) {
        if (test_ids.count(r.sample_id) && label_seen.insert(r.true_label).second) {
            labels.push_back(r.true_label);
        }
    }
    if (labels.size() < subsets) {
        throw ValidationError("fewer test labels (" + std::to_string(labels.size()) +
                              ") than subsets (" + std::to_string(subsets) + ")");
    }
    seeded_shuffle(labels, rng);

    std::unordered_map<std::string_view, std::size_t> subset_of_label;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        subset_of_label.emplace(labels[i], i % subsets);
    }

    std::vector<std::string> subset_names;
    for (std::size_t i = 1; i <= subsets; ++i) {
        subset_names.push_back("internal_test_" + std::to_string(i));
        split[subset_names.back()];
    }
    for (const auto& r : preds.records) {
        if (test_ids.count(r.sample_id)) {
            split[subset_names[subset_of_label.at(r.true_label)]].push_back(r.sample_id);
        }
    }
    for (auto& [name, list] : split) {
        std::sort(list.begin(), list.end());
    }
    return split;
}

std::vector<std::string> check_split(const Split& split, const PredictionSet& preds) {
    std::vector<std::string> violations;
    std::unordered_map<std::string_view, std::string_view> label_of;
    for (const auto& r : preds.records) label_of.emplace(r.sample_id, r.true_label);

    std::unordered_map<std::string_view, std::string_view> owner;
    std::unordered_map<std::string_view, std::string_view> label_split;
    for (const auto& [name, ids] : split) {
        for (const auto& id : ids) {
            auto [it, inserted] = owner.emplace(id, name);
            if (!inserted) {
                violations.push_back("sample " + id + " appears in splits '" +
                                     std::string(it->second) + "' and '" + name + "'");
                continue;
            }
            auto lbl = label_of.find(id);
            if (lbl == label_of.end()) {
                violations.push_back("unknown sample " + id + " in split '" + name + "'");
                continue;
            }
            if (name == "train") continue;
            auto [ls, fresh] = label_split.emplace(lbl->second, name);
            if (!fresh && ls->second != name) {
                violations.push_back("label " + std::string(lbl->second) + " spans splits '" +
                                     std::string(ls->second) + "' and '" + name + "'");
            }
        }
    }
    return violations;
}

PredictionSet filter_predictions(const PredictionSet& preds, const std::vector<std::string>& ids) {
    std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
    PredictionSet out;
    out.classifier_name = preds.classifier_name;
    for (const auto& r : preds.records) {
        if (wanted.erase(r.sample_id) > 0) {
            out.records.push_back(r);
        }
    }
    if (!wanted.empty()) {
        throw ValidationError("split references sample " + std::string(*wanted.begin()) +
                              " absent from the predictions");
    }
    return out;
}

NeighborCache filter_cache(const NeighborCache& cache, const std::vector<std::string>& ids) {
    std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
    NeighborCache out;
    out.base_set_name = cache.base_set_name;
    out.embedder_name = cache.embedder_name;
    out.k = cache.k;
    for (const auto& e : cache.entries) {
        if (wanted.erase(e.sample_id) > 0) {
            out.entries.push_back(e);
        }
    }
    if (!wanted.empty()) {
        throw ValidationError("split references sample " + std::string(*wanted.begin()) +
                              " absent from the cache");
    }
    return out;
}

void write_curve_csv(const std::string& path, const ConfidenceCurve& curve) {
    std::string out = "coverage,accuracy\n";
    for (const auto& p : curve.points) {
        out += format_double(p.coverage);
        out.push_back(',');
        out += format_double(p.accuracy);
        out.push_back('\n');
    }
    write_file_exclusive(path, out.data(), out.size());
}

ConfidenceCurve read_curve_csv(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    auto rows = parse_csv(text, path);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"coverage", "accuracy"}) {
        throw ValidationError(path + ": bad header at line 1, want coverage,accuracy");
    }
    ConfidenceCurve curve;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 2) {
            throw ValidationError(path + ": expected 2 fields at line " + std::to_string(row.line));
        }
        CurvePoint p;
        p.coverage = parse_double(row.fields[0], path, row.line);
        p.accuracy = parse_double(row.fields[1], path, row.line);
        if (!(p.coverage > 0.0 && p.coverage <= 1.0)) {
            throw ValidationError(path + ": coverage out of (0, 1] at line " +
                                  std::to_string(row.line));
        }
        if (!(p.accuracy >= 0.0 && p.accuracy <= 1.0)) {
            throw ValidationError(path + ": accuracy out of [0, 1] at line " +
                                  std::to_string(row.line));
        }
        if (!curve.points.empty() && p.coverage <= curve.points.back().coverage) {
            throw ValidationError(path + ": coverages not strictly increasing at line " +
                                  std::to_string(row.line));
        }
        curve.points.push_back(p);
    }
    if (curve.points.empty()) {
        throw ValidationError(path + ": no curve points");
    }
    if (curve.points.back().coverage < 1.0 - 1e-12) {
        throw ValidationError(path + ": curve does not reach coverage 1");
    }
    curve.acc_b = curve.points.back().accuracy;
    return curve;
}

nlohmann::json gain_report_to_json(const GainReport& report) {
    return {
        {"type", "gain_report"},
        {"version", 1},
        {"acc_b", report.acc_b},
        {"confidence_gain", report.confidence_gain},
        {"max_confidence_gain", report.max_confidence_gain},
        {"normalized_confidence_gain", report.normalized_confidence_gain},
        {"extended_below_floor", report.extended_below_floor},
    };
}

GainReport gain_report_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("type", "") != "gain_report") {
        throw ValidationError("not a gain_report JSON object");
    }
    GainReport report;
    report.acc_b = j.at("acc_b").get<double>();
    report.confidence_gain = j.at("confidence_gain").get<double>();
    report.max_confidence_gain = j.at("max_confidence_gain").get<double>();
    report.normalized_confidence_gain = j.at("normalized_confidence_gain").get<double>();
    report.extended_below_floor = j.value("extended_below_floor", false);
    return report;
}

nlohmann::json tune_result_to_json(const TuneResult& result) {
    nlohmann::json per_n = nlohmann::json::object();
    for (const auto& [n, report] : result.per_n) {
        per_n[std::to_string(n)] = gain_report_to_json(report);
    }
    return {
        {"type", "tune_result"},
        {"version", 1},
        {"classifier", result.classifier_name},
        {"embedder", result.embedder_name},
        {"grid", result.grid},
        {"best_n", result.best_n},
        {"per_n", per_n},
    };
}

TuneResult tune_result_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("type", "") != "tune_result") {
        throw ValidationError("not a tune_result JSON object");
    }
    TuneResult result;
    result.classifier_name = j.at("classifier").get<std::string>();
    result.embedder_name = j.at("embedder").get<std::string>();
    result.grid = j.at("grid").get<std::vector<std::uint32_t>>();
    result.best_n = j.at("best_n").get<std::uint32_t>();
    for (const auto& [key, value] : j.at("per_n").items()) {
        std::uint32_t n = 0;
        const auto* end = key.data() + key.size();
        auto [ptr, ec] = std::from_chars(key.data(), end, n);
        if (ec != std::errc() || ptr != end || n == 0) {
            throw ValidationError("bad per_n key '" + key + "' in tune_result");
        }
        result.per_n.emplace(n, gain_report_from_json(value));
    }
    if (result.per_n.count(result.best_n) == 0) {
        throw ValidationError("best_n " + std::to_string(result.best_n) +
                              " missing from per_n in tune_result");
    }
    return result;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    const std::string text = j.dump(2) + "\n";
    write_file_exclusive(path, text.data(), text.size());
}

nlohmann::json read_json_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

}  // namespace confgate
