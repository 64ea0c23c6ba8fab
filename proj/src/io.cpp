#include "opinionrank/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "opinionrank/errors.hpp"

namespace opinionrank {

namespace {

constexpr std::string_view kClassesDirective = "#classes=";

// Splits one record. Supports double-quoted fields with "" escapes; a record
// never spans lines.
std::vector<std::string> split_record(std::string_view line, char delimiter, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            if (!field.empty() || was_quoted) throw ParseError("stray quote inside field", line_no);
            quoted = true;
            was_quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else {
            if (was_quoted) throw ParseError("characters after closing quote", line_no);
            field.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(std::move(field));
    return fields;
}

std::string quote_field(std::string_view value, char delimiter) {
    if (value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(value);
    }
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, std::span<const std::string> fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << delimiter;
        out << quote_field(fields[i], delimiter);
    }
    out << '\n';
}

// Line reader that strips CR and a leading UTF-8 byte-order mark, and tracks line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        return true;
    }
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::string join(std::span<const std::string> items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

}  // namespace

ClassAlphabet::ClassAlphabet(std::vector<std::string> tokens) {
    for (auto& t : tokens) add(std::move(t));
}

const std::string& ClassAlphabet::token(ClassId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
        throw std::out_of_range("class id " + std::to_string(id) + " has no token");
    }
    return tokens_[static_cast<std::size_t>(id)];
}

std::optional<ClassId> ClassAlphabet::find(std::string_view token) const {
    const auto it = std::find(tokens_.begin(), tokens_.end(), token);
    if (it == tokens_.end()) return std::nullopt;
    return static_cast<ClassId>(it - tokens_.begin());
}

ClassId ClassAlphabet::add(std::string token) {
    if (find(token)) throw std::invalid_argument("duplicate class token '" + token + "'");
    tokens_.push_back(std::move(token));
    return static_cast<ClassId>(tokens_.size() - 1);
}

AnnotationTable read_opinions(std::istream& in, const AnnotationFileSpec& spec) {
    LineReader reader(in);
    std::string line;

    std::optional<std::vector<std::string>> declared = spec.classes;
    bool have_header = false;
    std::vector<std::string> header;
    while (reader.next(line)) {
        if (line.rfind('#', 0) == 0) {
            if (line.rfind(kClassesDirective, 0) != 0) {
                throw ParseError("unknown directive '" + line + "'", reader.line_no());
            }
            auto tokens = split_record(std::string_view(line).substr(kClassesDirective.size()), spec.delimiter,
                                       reader.line_no());
            if (declared && *declared != tokens) {
                throw ParseError("class directive conflicts with the declared alphabet", reader.line_no());
            }
            declared = std::move(tokens);
            continue;
        }
        header = split_record(line, spec.delimiter, reader.line_no());
        have_header = true;
        break;
    }
    if (!have_header) throw ParseError("empty file: no header row", reader.line_no());
    const std::size_t header_line = reader.line_no();
    if (header.size() < 2) throw ParseError("header needs an instance column and at least one source column", header_line);

    std::vector<std::string> source_ids(header.begin() + 1, header.end());
    {
        std::unordered_set<std::string> seen;
        for (const auto& id : source_ids) {
            if (!seen.insert(id).second) throw ParseError("duplicate source column '" + id + "'", header_line);
        }
    }

    ClassAlphabet alphabet;
    const bool fixed_alphabet = declared.has_value();
    if (fixed_alphabet) {
        try {
            alphabet = ClassAlphabet(*declared);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), header_line);
        }
        if (alphabet.find(spec.missing_token)) {
            throw ParseError("missing-value token '" + spec.missing_token + "' is also a class token", header_line);
        }
    }

    const std::size_t s = source_ids.size();
    std::vector<std::string> instance_ids;
    std::unordered_map<std::string, std::size_t> id_line;
    std::vector<ClassId> by_instance;  // instance-major while reading
    while (reader.next(line)) {
        const auto fields = split_record(line, spec.delimiter, reader.line_no());
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             reader.line_no());
        }
        if (fields[0].empty()) throw ParseError("empty instance id", reader.line_no());
        if (auto [it, inserted] = id_line.emplace(fields[0], reader.line_no()); !inserted) {
            throw ParseError("duplicate instance id '" + fields[0] + "' (first seen on line " +
                                 std::to_string(it->second) + ")",
                             reader.line_no());
        }
        instance_ids.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            const std::string& token = fields[j];
            if (token == spec.missing_token) {
                by_instance.push_back(kMissing);
            } else if (auto id = alphabet.find(token)) {
                by_instance.push_back(*id);
            } else if (fixed_alphabet) {
                throw ParseError("unknown class token '" + token + "' in column '" + header[j] + "'",
                                 reader.line_no());
            } else {
                by_instance.push_back(alphabet.add(token));
            }
        }
    }
    if (instance_ids.empty()) throw ParseError("no instance rows after the header", header_line);
    if (alphabet.size() < 2) {
        throw ParseError("found " + std::to_string(alphabet.size()) +
                             " class token(s); declare the full alphabet with " + std::string(kClassesDirective),
                         header_line);
    }

    const std::size_t n = instance_ids.size();
    std::vector<ClassId> cells(s * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < s; ++j) cells[j * n + i] = by_instance[i * s + j];
    }
    return AnnotationTable{OpinionMatrix(s, n, alphabet.size(), std::move(cells)), std::move(instance_ids),
                           std::move(source_ids), std::move(alphabet)};
}

AnnotationTable read_opinions(const std::filesystem::path& path, const AnnotationFileSpec& spec) {
    auto in = open_input(path);
    return read_opinions(in, spec);
}

void write_opinions(std::ostream& out, const AnnotationTable& table, const AnnotationFileSpec& spec) {
    const auto& m = table.opinions;
    std::vector<std::string> tokens;
    for (const auto& t : table.alphabet.tokens()) tokens.push_back(quote_field(t, spec.delimiter));
    out << kClassesDirective << join(tokens, std::string(1, spec.delimiter)) << '\n';

    std::vector<std::string> record{"instance"};
    record.insert(record.end(), table.source_ids.begin(), table.source_ids.end());
    write_record(out, record, spec.delimiter);
    for (std::size_t i = 0; i < m.instances(); ++i) {
        record.assign(1, table.instance_ids[i]);
        for (std::size_t j = 0; j < m.sources(); ++j) {
            const ClassId c = m.at(j, i);
            record.push_back(c == kMissing ? spec.missing_token : table.alphabet.token(c));
        }
        write_record(out, record, spec.delimiter);
    }
}

LabelTable read_label_table(std::istream& in, char delimiter) {
    LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty file: no header row", 0);
    if (split_record(line, delimiter, reader.line_no()).size() != 2) {
        throw ParseError("label file header must have exactly two columns", reader.line_no());
    }
    LabelTable table;
    while (reader.next(line)) {
        auto fields = split_record(line, delimiter, reader.line_no());
        if (fields.size() != 2) {
            throw ParseError("expected 2 fields, found " + std::to_string(fields.size()), reader.line_no());
        }
        table.ids.push_back(std::move(fields[0]));
        table.tokens.push_back(std::move(fields[1]));
    }
    return table;
}

LabelTable read_label_table(const std::filesystem::path& path, char delimiter) {
    auto in = open_input(path);
    return read_label_table(in, delimiter);
}

std::vector<std::string> align_labels(const LabelTable& table, std::span<const std::string> instance_ids) {
    std::unordered_map<std::string_view, std::size_t> row_of;
    std::vector<std::string> duplicates;
    for (std::size_t r = 0; r < table.ids.size(); ++r) {
        if (!row_of.emplace(table.ids[r], r).second) duplicates.push_back(table.ids[r]);
    }
    if (!duplicates.empty()) {
        throw ValidationError("duplicate ids in label file: " + join(duplicates, ", "), duplicates);
    }

    std::vector<std::string> aligned;
    std::vector<std::string> missing;
    std::unordered_set<std::string_view> wanted;
    for (const auto& id : instance_ids) {
        wanted.insert(id);
        if (auto it = row_of.find(id); it != row_of.end()) {
            aligned.push_back(table.tokens[it->second]);
        } else {
            missing.push_back(id);
        }
    }
    std::vector<std::string> extra;
    for (const auto& id : table.ids) {
        if (!wanted.contains(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::string message;
        if (!missing.empty()) message += "ids without a label: " + join(missing, ", ");
        if (!extra.empty()) message += std::string(message.empty() ? "" : "; ") + "unknown ids: " + join(extra, ", ");
        std::vector<std::string> offenders = missing;
        offenders.insert(offenders.end(), extra.begin(), extra.end());
        throw ValidationError(message, std::move(offenders));
    }
    return aligned;
}

std::vector<ClassId> read_truth(std::istream& in, const ClassAlphabet& alphabet,
                                std::span<const std::string> instance_ids) {
    const auto tokens = align_labels(read_label_table(in), instance_ids);
    std::vector<ClassId> truth;
    std::vector<std::string> unknown;
    for (const auto& t : tokens) {
        if (auto id = alphabet.find(t)) {
            truth.push_back(*id);
        } else if (std::find(unknown.begin(), unknown.end(), t) == unknown.end()) {
            unknown.push_back(t);
        }
    }
    if (!unknown.empty()) throw ValidationError("unknown class tokens in truth file: " + join(unknown, ", "), unknown);
    return truth;
}

std::vector<ClassId> read_truth(const std::filesystem::path& path, const ClassAlphabet& alphabet,
                                std::span<const std::string> instance_ids) {
    auto in = open_input(path);
    return read_truth(in, alphabet, instance_ids);
}

std::string format_real(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.12g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string score_row_token(const OpinionRankResult& result, const ClassAlphabet& alphabet, std::size_t row) {
    return alphabet.token(result.rankings.at(row).class_id);
}

void write_scores(std::ostream& out, const OpinionRankResult& result, const ClassAlphabet& alphabet,
                  std::span<const std::string> instance_ids) {
    const auto& scores = result.scores;
    std::vector<std::string> record{"class"};
    record.insert(record.end(), instance_ids.begin(), instance_ids.end());
    write_record(out, record, ',');
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        record.assign(1, score_row_token(result, alphabet, r));
        for (double v : scores.row(r)) record.push_back(format_real(v));
        write_record(out, record, ',');
    }
}

void write_label_predictions(std::ostream& out, std::span<const ClassId> labels, const ClassAlphabet& alphabet,
                             std::span<const std::string> instance_ids) {
    out << "instance,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::string fields[] = {instance_ids[i], alphabet.token(labels[i])};
        write_record(out, fields, ',');
    }
}

void write_predictions(std::ostream& out, const LabelDecisions& decisions, const OpinionRankResult& result,
                       const ClassAlphabet& alphabet, std::span<const std::string> instance_ids) {
    if (decisions.task != Task::multilabel) {
        write_label_predictions(out, decisions.labels, alphabet, instance_ids);
        return;
    }
    // Multilabel: every class passing the threshold, joined with ';'.
    out << "instance,label\n";
    for (std::size_t i = 0; i < decisions.instances; ++i) {
        std::vector<std::string> members;
        for (std::size_t r = 0; r < decisions.rows; ++r) {
            if (decisions.member(r, i)) members.push_back(score_row_token(result, alphabet, r));
        }
        const std::string fields[] = {instance_ids[i], join(members, ";")};
        write_record(out, fields, ',');
    }
}

void write_rankings(std::ostream& out, const OpinionRankResult& result, const ClassAlphabet& alphabet,
                    std::span<const std::string> source_ids) {
    out << "class,source,weight,rank\n";
    for (std::size_t r = 0; r < result.rankings.size(); ++r) {
        const auto& cr = result.rankings[r];
        const auto order = select_top_n(cr.ranking, cr.ranking.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const std::size_t src = order[pos];
            const std::string fields[] = {score_row_token(result, alphabet, r), source_ids[src],
                                          format_real(cr.ranking.weights[src]), std::to_string(pos + 1)};
            write_record(out, fields, ',');
        }
    }
}

ScoreTable read_scores(std::istream& in) {
    LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty file: no header row", 0);
    auto header = split_record(line, ',', reader.line_no());
    if (header.size() < 2) throw ParseError("score header needs at least one instance column", reader.line_no());

    ScoreTable table;
    table.instance_ids.assign(header.begin() + 1, header.end());
    while (reader.next(line)) {
        const auto fields = split_record(line, ',', reader.line_no());
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             reader.line_no());
        }
        table.row_tokens.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            double v = 0.0;
            const auto& f = fields[j];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size()) {
                throw ParseError("not a number: '" + f + "'", reader.line_no());
            }
            table.values.push_back(v);
        }
    }
    return table;
}

OutputPaths write_outputs(const std::filesystem::path& directory, const OpinionRankResult& result,
                          const LabelDecisions& decisions, const AnnotationTable& table) {
    if (result.scores.instances() != table.instance_ids.size() ||
        table.opinions.sources() != table.source_ids.size()) {
        throw std::invalid_argument("outputs and annotation table disagree on dimensions");
    }
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + directory.string() + "': " + ec.message());

    OutputPaths paths{directory / "scores.csv", directory / "predictions.csv", directory / "rankings.csv"};
    auto write_file = [](const std::filesystem::path& path, auto&& body) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        body(out);
        out.flush();
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    };
    write_file(paths.scores, [&](std::ostream& o) { write_scores(o, result, table.alphabet, table.instance_ids); });
    write_file(paths.predictions,
               [&](std::ostream& o) { write_predictions(o, decisions, result, table.alphabet, table.instance_ids); });
    write_file(paths.rankings, [&](std::ostream& o) { write_rankings(o, result, table.alphabet, table.source_ids); });
    return paths;
}

}  // namespace opinionrank
