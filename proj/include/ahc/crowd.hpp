#pragma once

#include "ahc/core.hpp"
#include "ahc/rng.hpp"

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

namespace ahc {

struct CrowdConfig {
    double default_accuracy = 0.9;
    std::unordered_map<int, double> accuracy;  // per predicate id
    double jitter = 0.0;                       // uniform half-width on the per-vote accuracy
    std::string votes_file;                    // replay recorded votes when set
};

// Configured accuracy for a predicate, clamped.
double accuracy_for(const CrowdConfig& cfg, int predicate_id);

struct PairRequest {
    int item_id = 0;
    int predicate_id = 0;
    int votes = 1;
};

class VoteSource {
public:
    virtual ~VoteSource() = default;
    virtual std::vector<Vote> request(const std::vector<PairRequest>& pairs, int iteration,
                                      VotePurpose purpose) = 0;
};

// Seeded worker simulator: each vote independently agrees with gold with the
// predicate's accuracy.
class SimulatedCrowd : public VoteSource {
public:
    SimulatedCrowd(const Dataset* dataset, CrowdConfig cfg, std::uint64_t seed);

    // Throws MissingGold when a requested pair has no gold label.
    std::vector<Vote> request(const std::vector<PairRequest>& pairs, int iteration,
                              VotePurpose purpose) override;

private:
    const Dataset* data_;
    CrowdConfig cfg_;
    Rng rng_;
};

// Serves recorded votes per pair in file order; throws ExhaustedVotes when a
// pair's recording runs dry.
class ReplayCrowd : public VoteSource {
public:
    explicit ReplayCrowd(const VoteLedger& recorded);

    std::vector<Vote> request(const std::vector<PairRequest>& pairs, int iteration,
                              VotePurpose purpose) override;

private:
    std::unordered_map<std::uint64_t, std::deque<Vote>> queues_;
};

// Votes CSV: item_id,predicate_id,value,worker_id,iteration with value in {0,1}.
VoteLedger load_votes_csv(const std::string& path);
void save_votes_csv(const VoteLedger& ledger, const std::string& path);

// Laplace-smoothed agreement with gold per predicate, (correct+1)/(total+2),
// clamped; predicates without gold-matched votes fall back to the default.
std::unordered_map<int, double> calibrate_accuracy(const VoteLedger& votes, const Dataset& gold,
                                                   double default_accuracy);

}  // namespace ahc
