#pragma once

#include "solo/core/design.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solo {

/// Where a training sample came from.
enum class SampleTag { initial, mutation, crossover, convolution, random, search_optimum };

std::string_view to_string(SampleTag tag) noexcept;
SampleTag sample_tag_from_string(std::string_view text);

/// One FEM-labelled pair (rho, F(rho)).
struct EvaluationRecord {
    DesignVector design;
    double objective;
    bool feasible = true;
    SampleTag tag = SampleTag::initial;
};

/// Append-only collection of evaluation records sharing one design space.
class Dataset {
public:
    Dataset() = default;

    /// Throws DataError on a non-finite or nonpositive objective and
    /// ContractViolation when the design space differs from earlier records.
    void append(EvaluationRecord record);

    std::size_t n_train() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const std::vector<EvaluationRecord>& records() const noexcept { return records_; }
    const EvaluationRecord& operator[](std::size_t i) const { return records_[i]; }

    /// Record with the lowest objective; throws on an empty dataset.
    const EvaluationRecord& best() const;
    /// Lowest objective among feasible records, if any.
    std::optional<double> best_feasible() const;
    bool contains(const DesignVector& design) const;

    /// JSON lines, one record per line: {design, objective, feasible, tag}.
    void write_jsonl(std::ostream& out) const;
    static Dataset read_jsonl(std::istream& in);
    void save(const std::string& path) const;
    static Dataset load(const std::string& path);

private:
    std::vector<EvaluationRecord> records_;
};

} // namespace solo
