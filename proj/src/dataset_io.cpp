#include "ahc/dataset_io.hpp"

#include "ahc/ml.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace ahc {

namespace {

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// One CSV record honoring quotes; fields may contain commas and doubled quotes.
std::vector<std::string> parse_csv_record(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(std::move(cur));
    return fields;
}

int parse_int(const std::string& s, const char* what, int line_no) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line_no);
    }
    if (pos != s.size()) throw ParseError(std::string("bad ") + what + " '" + s + "'", line_no);
    return v;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Dataset data;
    std::string line;
    int line_no = 0;
    int n_preds = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            const std::vector<std::string> head = parse_csv_record(line, line_no);
            if (head.size() < 3 || head[0] != "item_id" || head[1] != "text") {
                throw ParseError("expected header item_id,text,gold_p1,...", line_no);
            }
            n_preds = static_cast<int>(head.size()) - 2;
            for (int p = 0; p < n_preds; ++p) {
                if (head[static_cast<std::size_t>(p) + 2] != "gold_p" + std::to_string(p + 1)) {
                    throw ParseError("expected gold_p" + std::to_string(p + 1) + " column",
                                     line_no);
                }
                Predicate pred;
                pred.id = p + 1;
                pred.description = "p" + std::to_string(p + 1);
                data.predicates.push_back(pred);
            }
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> f = parse_csv_record(line, line_no);
        if (static_cast<int>(f.size()) != n_preds + 2) {
            throw ParseError("expected " + std::to_string(n_preds + 2) + " fields, got " +
                                 std::to_string(f.size()),
                             line_no);
        }
        Item item;
        item.id = parse_int(f[0], "item_id", line_no);
        item.text = f[1];
        item.tokens = tokenize(item.text);
        std::vector<int> gold_row(static_cast<std::size_t>(n_preds));
        for (int p = 0; p < n_preds; ++p) {
            const int g = parse_int(f[static_cast<std::size_t>(p) + 2], "gold value", line_no);
            if (g != 0 && g != 1) throw ParseError("gold values must be 0 or 1", line_no);
            gold_row[static_cast<std::size_t>(p)] = g;
        }
        data.items.push_back(std::move(item));
        data.gold.push_back(std::move(gold_row));
    }
    if (line_no == 0) throw ParseError("empty dataset file", 1);
    data.rebuild_index();
    return data;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "item_id,text";
    for (std::size_t p = 0; p < data.predicates.size(); ++p) out << ",gold_p" << p + 1;
    out << '\n';
    for (std::size_t i = 0; i < data.items.size(); ++i) {
        out << data.items[i].id << ',' << quote_csv(data.items[i].text);
        for (int g : data.gold[i]) out << ',' << g;
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

void save_decisions_csv(const std::vector<Decision>& decisions, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "item_id,verdict,source\n";
    for (const Decision& d : decisions) {
        out << d.item_id << ',' << to_string(d.verdict) << ',' << to_string(d.source) << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

std::vector<Decision> load_decisions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Decision> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != "item_id,verdict,source") {
                throw ParseError("expected header item_id,verdict,source", line_no);
            }
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> f = parse_csv_record(line, line_no);
        if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
        Decision d;
        d.item_id = parse_int(f[0], "item_id", line_no);
        if (f[1] == "in") d.verdict = Verdict::In;
        else if (f[1] == "out") d.verdict = Verdict::Out;
        else throw ParseError("verdict must be in or out, got '" + f[1] + "'", line_no);
        if (f[2] == "hybrid") d.source = DecisionSource::Hybrid;
        else if (f[2] == "ml_fallback") d.source = DecisionSource::MlFallback;
        else throw ParseError("source must be hybrid or ml_fallback, got '" + f[2] + "'", line_no);
        out.push_back(d);
    }
    return out;
}

}  // namespace ahc
