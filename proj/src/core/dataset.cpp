#include "solo/core/dataset.hpp"

#include "solo/core/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace solo {

using nlohmann::json;

std::string_view to_string(SampleTag tag) noexcept
{
    switch (tag) {
    case SampleTag::initial: return "initial";
    case SampleTag::mutation: return "mutation";
    case SampleTag::crossover: return "crossover";
    case SampleTag::convolution: return "convolution";
    case SampleTag::random: return "random";
    case SampleTag::search_optimum: return "search-optimum";
    }
    return "unknown";
}

SampleTag sample_tag_from_string(std::string_view text)
{
    for (auto t : {SampleTag::initial, SampleTag::mutation, SampleTag::crossover, SampleTag::convolution,
                   SampleTag::random, SampleTag::search_optimum})
        if (to_string(t) == text) return t;
    throw DataError("unknown sample tag '" + std::string(text) + "'");
}

void Dataset::append(EvaluationRecord record)
{
    if (!std::isfinite(record.objective) || record.objective <= 0.0)
        throw DataError("rejected record: objective " + std::to_string(record.objective)
                        + " must be finite and positive");
    if (!records_.empty())
        require(records_.front().design.same_space(record.design), "dataset records must share one design space");
    records_.push_back(std::move(record));
}

const EvaluationRecord& Dataset::best() const
{
    if (records_.empty()) throw ContractViolation("best() on empty dataset");
    return *std::min_element(records_.begin(), records_.end(),
                             [](const auto& a, const auto& b) { return a.objective < b.objective; });
}

std::optional<double> Dataset::best_feasible() const
{
    std::optional<double> out;
    for (const auto& r : records_)
        if (r.feasible && (!out || r.objective < *out)) out = r.objective;
    return out;
}

bool Dataset::contains(const DesignVector& design) const
{
    return std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r.design == design; });
}

void Dataset::write_jsonl(std::ostream& out) const
{
    for (const auto& r : records_) {
        json design = {{"kind", to_string(r.design.kind())}, {"values", r.design.data()}};
        if (r.design.kind() == DesignKind::discrete) design["catalog"] = r.design.catalog();
        json line = {{"design", std::move(design)},
                     {"objective", r.objective},
                     {"feasible", r.feasible},
                     {"tag", to_string(r.tag)}};
        out << line.dump() << '\n';
    }
}

Dataset Dataset::read_jsonl(std::istream& in)
{
    Dataset ds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const auto& d = j.at("design");
            const auto kind = design_kind_from_string(d.at("kind").get<std::string>());
            auto values = d.at("values").get<std::vector<double>>();
            DesignVector design = kind == DesignKind::discrete
                ? DesignVector::discrete(std::move(values), d.at("catalog").get<std::vector<double>>())
                : kind == DesignKind::binary ? DesignVector::binary(std::move(values))
                                             : DesignVector::continuous(std::move(values));
            ds.append({std::move(design), j.at("objective").get<double>(), j.at("feasible").get<bool>(),
                       sample_tag_from_string(j.at("tag").get<std::string>())});
        }
        catch (const json::exception& e) {
            throw DataError("dataset line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return ds;
}

void Dataset::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_jsonl(out);
}

Dataset Dataset::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_jsonl(in);
}

} // namespace solo
