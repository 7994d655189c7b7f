#include "ahc/crowd.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ahc {

double accuracy_for(const CrowdConfig& cfg, int predicate_id) {
    auto it = cfg.accuracy.find(predicate_id);
    return clamp_accuracy(it == cfg.accuracy.end() ? cfg.default_accuracy : it->second);
}

SimulatedCrowd::SimulatedCrowd(const Dataset* dataset, CrowdConfig cfg, std::uint64_t seed)
    : data_(dataset), cfg_(std::move(cfg)), rng_(seed) {}

std::vector<Vote> SimulatedCrowd::request(const std::vector<PairRequest>& pairs, int iteration,
                                          VotePurpose purpose) {
    std::vector<Vote> out;
    for (const PairRequest& req : pairs) {
        const int item_pos = data_->index_of(req.item_id);
        const int pred_pos = data_->predicate_index(req.predicate_id);
        if (item_pos < 0 || pred_pos < 0) {
            throw MissingGold("no gold label for item " + std::to_string(req.item_id) +
                              ", predicate " + std::to_string(req.predicate_id));
        }
        const bool truth = data_->gold[static_cast<std::size_t>(item_pos)]
                                      [static_cast<std::size_t>(pred_pos)] != 0;
        const double base = accuracy_for(cfg_, req.predicate_id);
        for (int k = 0; k < req.votes; ++k) {
            double a = base;
            if (cfg_.jitter > 0.0) {
                a = clamp_accuracy(rng_.uniform(base - cfg_.jitter, base + cfg_.jitter));
            }
            const bool agree = rng_.bernoulli(a);
            const bool yes = agree == truth;
            out.push_back(Vote{req.item_id, req.predicate_id,
                               yes ? VoteValue::Yes : VoteValue::No, iteration, purpose, -1});
        }
    }
    return out;
}

ReplayCrowd::ReplayCrowd(const VoteLedger& recorded) {
    for (const Vote& v : recorded.votes()) {
        queues_[pair_key(v.item_id, v.predicate_id)].push_back(v);
    }
}

std::vector<Vote> ReplayCrowd::request(const std::vector<PairRequest>& pairs, int iteration,
                                       VotePurpose purpose) {
    std::vector<Vote> out;
    for (const PairRequest& req : pairs) {
        auto it = queues_.find(pair_key(req.item_id, req.predicate_id));
        for (int k = 0; k < req.votes; ++k) {
            if (it == queues_.end() || it->second.empty()) {
                throw ExhaustedVotes("no recorded votes left for item " +
                                     std::to_string(req.item_id) + ", predicate " +
                                     std::to_string(req.predicate_id));
            }
            Vote v = it->second.front();
            it->second.pop_front();
            v.iteration = iteration;
            v.purpose = purpose;
            out.push_back(v);
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

int parse_int_field(const std::string& s, const char* what, int line_no) {
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

VoteLedger load_votes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    VoteLedger ledger;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != "item_id,predicate_id,value,worker_id,iteration") {
                throw ParseError("unexpected votes header '" + line + "'", line_no);
            }
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 5) {
            throw ParseError("expected 5 fields, got " + std::to_string(f.size()), line_no);
        }
        Vote v;
        v.item_id = parse_int_field(f[0], "item_id", line_no);
        v.predicate_id = parse_int_field(f[1], "predicate_id", line_no);
        const int val = parse_int_field(f[2], "value", line_no);
        if (val != 0 && val != 1) {
            throw ParseError("value must be 0 or 1, got '" + f[2] + "'", line_no);
        }
        v.value = val == 1 ? VoteValue::Yes : VoteValue::No;
        v.worker_id = parse_int_field(f[3], "worker_id", line_no);
        v.iteration = parse_int_field(f[4], "iteration", line_no);
        try {
            ledger.append(v);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return ledger;
}

void save_votes_csv(const VoteLedger& ledger, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "item_id,predicate_id,value,worker_id,iteration\n";
    for (const Vote& v : ledger.votes()) {
        out << v.item_id << ',' << v.predicate_id << ',' << (v.value == VoteValue::Yes ? 1 : 0)
            << ',' << v.worker_id << ',' << v.iteration << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

std::unordered_map<int, double> calibrate_accuracy(const VoteLedger& votes, const Dataset& gold,
                                                   double default_accuracy) {
    std::unordered_map<int, std::pair<int, int>> tally;  // predicate -> (correct, total)
    for (const Vote& v : votes.votes()) {
        const int item_pos = gold.index_of(v.item_id);
        const int pred_pos = gold.predicate_index(v.predicate_id);
        if (item_pos < 0 || pred_pos < 0) continue;
        const bool truth = gold.gold[static_cast<std::size_t>(item_pos)]
                                    [static_cast<std::size_t>(pred_pos)] != 0;
        auto& [correct, total] = tally[v.predicate_id];
        correct += (v.value == VoteValue::Yes) == truth;
        ++total;
    }
    std::unordered_map<int, double> out;
    for (const Predicate& p : gold.predicates) {
        auto it = tally.find(p.id);
        if (it == tally.end() || it->second.second == 0) {
            out[p.id] = clamp_accuracy(default_accuracy);
        } else {
            out[p.id] = clamp_accuracy((it->second.first + 1.0) / (it->second.second + 2.0));
        }
    }
    return out;
}

}  // namespace ahc
