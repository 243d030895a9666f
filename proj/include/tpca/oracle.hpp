#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpca/model.hpp"
#include "tpca/query.hpp"
#include "tpca/rng.hpp"

namespace tpca {

// max(1/n, sqrt(p(1-p)/n)).
double vstat_envelope(double p, double n);

// Envelope violations seen by any oracle in this process.
std::size_t global_envelope_violations();

enum class Strategy { Exact, EmpiricalClamped, MaxShift, NullMimic, SignalCancel, GraphAdversary };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

struct TranscriptEntry {
    std::string tag;
    double response = 0.0;
    double envelope = 0.0;
    double true_mean = 0.0;
    std::shared_ptr<const Query> query;  // absent after import
};

void write_transcript_jsonl(const std::vector<TranscriptEntry>& t, std::ostream& out);
std::vector<TranscriptEntry> read_transcript_jsonl(std::istream& in);

// Anything that answers unit queries about a target distribution.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual double respond(const Query& q) = 0;
    virtual double n() const = 0;
    virtual const DistributionSpec& target() const = 0;
    virtual std::size_t queries_used() const = 0;
};

struct OracleOptions {
    Strategy strategy = Strategy::Exact;
    double n = 1.0;
    std::uint64_t seed = 0;
    int shift_sign = 1;          // MaxShift: +1, -1, or 0 for a seeded random sign per query
    std::size_t query_cap = 0;   // 0 means unlimited
    bool record = false;
    // NullMimic and GraphAdversary answer with the mean under this law;
    // defaults to the null counterpart of the target.
    std::optional<DistributionSpec> reference;
};

class VstatOracle : public Oracle {
public:
    VstatOracle(DistributionSpec target, OracleOptions opt);

    double respond(const Query& q) override;
    double n() const override { return opt_.n; }
    const DistributionSpec& target() const override { return target_; }
    std::size_t queries_used() const override { return count_; }

    Strategy strategy() const { return opt_.strategy; }
    std::size_t violations() const { return violations_; }
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

private:
    double answer(const Query& q, const GaussLaw& law, double p, double env);

    DistributionSpec target_;
    DistributionSpec reference_;
    OracleOptions opt_;
    Rng rng_;
    std::size_t count_ = 0;
    std::size_t violations_ = 0;
    std::vector<TranscriptEntry> transcript_;
};

}  // namespace tpca
