#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"
#include "tradeflow/hs_chapters.hpp"
#include "tradeflow/ingest.hpp"

namespace tradeflow::rules {

/// Compact itemset over chapter codes 1..128 (two 64-bit words).
class ItemBits {
public:
    ItemBits() = default;

    static ItemBits of(std::initializer_list<int> items) {
        ItemBits b;
        for (int i : items) b.add(i);
        return b;
    }

    void add(int item) {
        require(item >= 1 && item <= 128, "item code out of range 1..128");
        w_[(item - 1) >> 6] |= 1ULL << ((item - 1) & 63);
    }

    bool contains(int item) const {
        if (item < 1 || item > 128) return false;
        return (w_[(item - 1) >> 6] >> ((item - 1) & 63)) & 1ULL;
    }

    int size() const { return std::popcount(w_[0]) + std::popcount(w_[1]); }
    bool empty() const { return w_[0] == 0 && w_[1] == 0; }

    bool subset_of(const ItemBits& other) const {
        return (w_[0] & ~other.w_[0]) == 0 && (w_[1] & ~other.w_[1]) == 0;
    }

    ItemBits with(int item) const {
        ItemBits b = *this;
        b.add(item);
        return b;
    }

    ItemBits without(int item) const {
        ItemBits b = *this;
        if (item >= 1 && item <= 128) b.w_[(item - 1) >> 6] &= ~(1ULL << ((item - 1) & 63));
        return b;
    }

    ItemBits unite(const ItemBits& other) const {
        ItemBits b;
        b.w_[0] = w_[0] | other.w_[0];
        b.w_[1] = w_[1] | other.w_[1];
        return b;
    }

    bool intersects(const ItemBits& other) const {
        return (w_[0] & other.w_[0]) != 0 || (w_[1] & other.w_[1]) != 0;
    }

    /// Items in ascending order.
    std::vector<int> items() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (int word = 0; word < 2; ++word) {
            std::uint64_t bits = w_[word];
            while (bits) {
                const int bit = std::countr_zero(bits);
                out.push_back(word * 64 + bit + 1);
                bits &= bits - 1;
            }
        }
        return out;
    }

    bool operator==(const ItemBits& other) const { return w_ == other.w_; }

    /// Lexicographic order on the ascending item sequence, shorter prefix first.
    bool operator<(const ItemBits& other) const {
        std::uint64_t a0 = w_[0], a1 = w_[1];
        std::uint64_t b0 = other.w_[0], b1 = other.w_[1];
        while ((a0 | a1) && (b0 | b1)) {
            const int ia = a0 ? std::countr_zero(a0) : 64 + std::countr_zero(a1);
            const int ib = b0 ? std::countr_zero(b0) : 64 + std::countr_zero(b1);
            if (ia != ib) return ia < ib;
            if (ia < 64) { a0 &= a0 - 1; b0 &= b0 - 1; }
            else { a1 &= a1 - 1; b1 &= b1 - 1; }
        }
        return (a0 | a1) == 0 && (b0 | b1) != 0; // equal prefix: shorter first
    }

    std::uint64_t hash() const {
        std::uint64_t h = w_[0] * 0x9e3779b97f4a7c15ULL;
        h ^= (w_[1] + 0x7f4a7c159e3779b9ULL) + (h << 6) + (h >> 2);
        return h;
    }

private:
    std::array<std::uint64_t, 2> w_{0, 0};
};

struct ItemBitsHash {
    std::size_t operator()(const ItemBits& b) const { return static_cast<std::size_t>(b.hash()); }
};

/// Frequent itemset with its transaction count.
struct Itemset {
    ItemBits items;
    long count = 0;
};

struct MiningConfig {
    double min_support = 0.35;
    int max_antecedent_size = 3;
    enum class Scope { Global, PerReporter, PerPair } scope = Scope::Global;
};

inline const char* scope_name(MiningConfig::Scope s) {
    switch (s) {
        case MiningConfig::Scope::Global: return "global";
        case MiningConfig::Scope::PerReporter: return "per-reporter";
        case MiningConfig::Scope::PerPair: return "per-pair";
    }
    return "global";
}

/// count/tt >= min_support, with a guard for products like 0.35*743 that land
/// a hair above their exact value in floating point.
inline bool meets_support(long count, long tt, double min_support) {
    return static_cast<double>(count) >= min_support * static_cast<double>(tt) - 1e-9;
}

/// Levelwise Apriori: returns every itemset of size <= max_size whose support
/// clears min_support, with exact transaction counts. Candidates with any
/// infrequent subset are pruned before counting. Output sorted by size, then
/// lexicographically.
inline std::vector<Itemset> mine_frequent_itemsets(const std::vector<ingest::Transaction>& transactions,
                                                   double min_support, int max_size) {
    require(!transactions.empty(), "cannot mine an empty transaction list");
    require(min_support > 0.0, "min_support must be > 0");
    require(max_size >= 1, "max_size must be >= 1");
    const long tt = static_cast<long>(transactions.size());

    std::vector<ItemBits> baskets;
    baskets.reserve(transactions.size());
    for (const auto& t : transactions) {
        ItemBits b;
        for (int item : t.items) b.add(item);
        baskets.push_back(b);
    }

    std::vector<Itemset> result;

    // Level 1: direct item counting.
    std::array<long, 129> item_counts{};
    for (const auto& b : baskets) {
        for (int item : b.items()) ++item_counts[item];
    }
    std::vector<ItemBits> level; // frequent itemsets of the current size
    for (int item = 1; item <= 128; ++item) {
        if (item_counts[item] > 0 && meets_support(item_counts[item], tt, min_support)) {
            result.push_back({ItemBits::of({item}), item_counts[item]});
            level.push_back(result.back().items);
        }
    }

    std::unordered_set<ItemBits, ItemBitsHash> frequent_lookup(level.begin(), level.end());

    for (int size = 2; size <= max_size && level.size() >= 2; ++size) {
        // Join step: pairs sharing all but their largest item. Sorting the
        // level makes equal prefixes contiguous, so each block is scanned
        // once.
        std::sort(level.begin(), level.end());
        std::vector<std::vector<int>> level_items(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) level_items[i] = level[i].items();

        std::vector<ItemBits> candidates;
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                const auto& a = level_items[i];
                const auto& b = level_items[j];
                if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) break;
                ItemBits candidate = level[i].unite(level[j]);
                // Prune step: all (size-1)-subsets must be frequent.
                bool all_frequent = true;
                for (int item : candidate.items()) {
                    if (!frequent_lookup.count(candidate.without(item))) {
                        all_frequent = false;
                        break;
                    }
                }
                if (all_frequent) candidates.push_back(candidate);
            }
        }
        if (candidates.empty()) break;

        std::vector<long> counts(candidates.size(), 0);
        for (const auto& basket : baskets) {
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (candidates[c].subset_of(basket)) ++counts[c];
            }
        }
        level.clear();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (meets_support(counts[c], tt, min_support)) {
                result.push_back({candidates[c], counts[c]});
                level.push_back(candidates[c]);
            }
        }
        for (const auto& b : level) frequent_lookup.insert(b);
    }

    std::sort(result.begin(), result.end(), [](const Itemset& a, const Itemset& b) {
        const int sa = a.items.size(), sb = b.items.size();
        if (sa != sb) return sa < sb;
        return a.items < b.items;
    });
    return result;
}

/// Association rule antecedent => consequent with its quality metrics.
struct Rule {
    ItemBits antecedent;
    int consequent = 0;
    double support = 0.0;
    double confidence = 0.0;
    double lift = 0.0;
    long count = 0;
    std::string scope_origin = "ALL";      // Country_O
    std::string scope_destination = "ALL"; // Country_D
};

/// Canonical ordering for rule dumps: confidence desc, lift desc, support
/// desc, then lexicographic antecedent and consequent.
inline void sort_rules(std::vector<Rule>& rules) {
    std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.lift != b.lift) return a.lift > b.lift;
        if (a.support != b.support) return a.support > b.support;
        if (!(a.antecedent == b.antecedent)) return a.antecedent < b.antecedent;
        if (a.consequent != b.consequent) return a.consequent < b.consequent;
        if (a.scope_origin != b.scope_origin) return a.scope_origin < b.scope_origin;
        return a.scope_destination < b.scope_destination;
    });
}

/// Emits single-consequent rules from the frequent itemsets: for each F with
/// |F| >= 2 and every b in F, the rule F\{b} => b. Metrics come from integer
/// counts; rules whose support falls below config.min_support are dropped.
inline std::vector<Rule> generate_rules(const std::vector<Itemset>& frequent, long tt,
                                        const MiningConfig& config) {
    require(tt >= 1, "transaction total must be >= 1");
    std::unordered_map<ItemBits, long, ItemBitsHash> counts;
    counts.reserve(frequent.size() * 2);
    for (const auto& f : frequent) counts.emplace(f.items, f.count);

    std::vector<Rule> out;
    for (const auto& f : frequent) {
        const int set_size = f.items.size();
        if (set_size < 2 || set_size - 1 > config.max_antecedent_size) continue;
        if (!meets_support(f.count, tt, config.min_support)) continue;
        for (int b : f.items.items()) {
            const ItemBits antecedent = f.items.without(b);
            const auto it_a = counts.find(antecedent);
            const auto it_b = counts.find(ItemBits::of({b}));
            require(it_a != counts.end() && it_b != counts.end(),
                    "frequent itemset list is not subset-closed");
            Rule r;
            r.antecedent = antecedent;
            r.consequent = b;
            r.count = f.count;
            r.support = static_cast<double>(f.count) / static_cast<double>(tt);
            r.confidence = static_cast<double>(f.count) / static_cast<double>(it_a->second);
            r.lift = r.confidence * static_cast<double>(tt) / static_cast<double>(it_b->second);
            out.push_back(std::move(r));
        }
    }
    sort_rules(out);
    return out;
}

/// Confidence summed across scopes for one (antecedent, consequent) pair.
struct AggregatedRule {
    ItemBits antecedent;
    int consequent = 0;
    std::string antecedent_names;
    std::string consequent_name;
    double sum_confidence = 0.0;
};

inline std::string itemset_names(const ItemBits& items) {
    std::string out;
    for (int item : items.items()) {
        if (!out.empty()) out += " | ";
        out += hs::chapter_name(item);
    }
    return out;
}

/// Groups rules by (antecedent, consequent) across scoped rule sets and sums
/// their confidences, sorted by the sum descending.
inline std::vector<AggregatedRule> aggregate_rules(
    const std::vector<std::pair<std::string, std::vector<Rule>>>& rule_sets) {
    std::map<std::pair<ItemBits, int>, double> sums;
    for (const auto& [scope, rules] : rule_sets) {
        (void)scope;
        for (const auto& r : rules) {
            sums[{r.antecedent, r.consequent}] += r.confidence;
        }
    }
    std::vector<AggregatedRule> out;
    out.reserve(sums.size());
    for (const auto& [key, sum] : sums) {
        AggregatedRule a;
        a.antecedent = key.first;
        a.consequent = key.second;
        a.antecedent_names = itemset_names(key.first);
        a.consequent_name = hs::chapter_name(key.second);
        a.sum_confidence = sum;
        out.push_back(std::move(a));
    }
    std::sort(out.begin(), out.end(), [](const AggregatedRule& x, const AggregatedRule& y) {
        if (x.sum_confidence != y.sum_confidence) return x.sum_confidence > y.sum_confidence;
        if (!(x.antecedent == y.antecedent)) return x.antecedent < y.antecedent;
        return x.consequent < y.consequent;
    });
    return out;
}

/// Conjunctive rule filter; unset members match everything.
struct RuleFilter {
    std::optional<double> min_confidence;
    std::optional<double> min_lift;
    std::vector<int> antecedent_contains;
    std::optional<int> consequent;
    std::optional<std::string> origin;
    std::optional<std::string> destination;
};

/// Rules satisfying every filter conjunct, ordered by confidence desc, lift
/// desc, then lexicographic antecedent.
inline std::vector<Rule> query_rules(const std::vector<Rule>& store, const RuleFilter& filter) {
    if (filter.min_confidence) {
        require(*filter.min_confidence <= 1.0, "min_confidence cannot exceed 1");
    }
    std::vector<Rule> out;
    for (const auto& r : store) {
        if (filter.min_confidence && r.confidence < *filter.min_confidence) continue;
        if (filter.min_lift && r.lift < *filter.min_lift) continue;
        if (filter.consequent && r.consequent != *filter.consequent) continue;
        bool contains_all = true;
        for (int item : filter.antecedent_contains) {
            if (!r.antecedent.contains(item)) {
                contains_all = false;
                break;
            }
        }
        if (!contains_all) continue;
        if (filter.origin && r.scope_origin != *filter.origin) continue;
        if (filter.destination && r.scope_destination != *filter.destination) continue;
        out.push_back(r);
    }
    sort_rules(out);
    return out;
}

inline std::string render_itemset(const ItemBits& items) {
    std::string out = "{";
    bool first = true;
    for (int item : items.items()) {
        if (!first) out += ",";
        out += std::to_string(item) + ".0";
        first = false;
    }
    out += "}";
    return out;
}

inline constexpr const char* kRuleCsvHeader =
    "Lhs,Rhs,Lhs_name,Rhs_name,Support,Confidence,Lift,Count,Country_O,Country_D";

/// Writes the rule table in its canonical CSV layout, floats at 6 decimals.
inline void write_rules_csv(std::ostream& out, const std::vector<Rule>& rules,
                            const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << kRuleCsvHeader << "\n";
    for (const auto& r : rules) {
        out << csv::escape(render_itemset(r.antecedent)) << ","
            << csv::escape(render_itemset(ItemBits::of({r.consequent}))) << ","
            << csv::escape(itemset_names(r.antecedent)) << ","
            << csv::escape(hs::chapter_name(r.consequent)) << ","
            << csv::fixed(r.support, 6) << ","
            << csv::fixed(r.confidence, 6) << ","
            << csv::fixed(r.lift, 6) << ","
            << r.count << ","
            << csv::escape(r.scope_origin) << ","
            << csv::escape(r.scope_destination) << "\n";
    }
}

inline ItemBits parse_itemset(std::string_view text) {
    ItemBits b;
    std::string token;
    for (char c : text) {
        if (c == '{' || c == '}' || c == ' ') continue;
        if (c == ',') {
            if (!token.empty()) b.add(static_cast<int>(std::stod(token)));
            token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) b.add(static_cast<int>(std::stod(token)));
    return b;
}

/// Reads a rule CSV produced by write_rules_csv back into a store.
inline std::vector<Rule> load_rules_csv(const std::filesystem::path& path) {
    const csv::File file = csv::read_file(path);
    require(csv::split(kRuleCsvHeader) == file.header, "unexpected rule CSV header in " + path.string());
    std::vector<Rule> out;
    for (const auto& row : file.rows) {
        require(row.fields.size() == 10, "malformed rule CSV row at line " + std::to_string(row.line_number));
        Rule r;
        r.antecedent = parse_itemset(row.fields[0]);
        const auto rhs = parse_itemset(row.fields[1]).items();
        require(rhs.size() == 1, "rule consequent must be a single item at line " + std::to_string(row.line_number));
        r.consequent = rhs[0];
        r.support = csv::to_double(row.fields[4]).value_or(0.0);
        r.confidence = csv::to_double(row.fields[5]).value_or(0.0);
        r.lift = csv::to_double(row.fields[6]).value_or(0.0);
        r.count = static_cast<long>(csv::to_int(row.fields[7]).value_or(0));
        r.scope_origin = row.fields[8];
        r.scope_destination = row.fields[9];
        out.push_back(std::move(r));
    }
    return out;
}

struct ScopeStats {
    std::string scope;
    std::size_t transactions = 0;
    std::size_t frequent_itemsets = 0;
};

/// Scoped mining over a transaction set: one model per scope group, with
/// Country_O/Country_D labels per the scope semantics. Transactions are
/// destination-side import reports, so the reporter is the destination.
inline std::vector<std::pair<std::string, std::vector<Rule>>> mine_scoped_rules(
    const std::vector<ingest::Transaction>& transactions, const MiningConfig& config,
    std::vector<ScopeStats>* stats = nullptr) {
    require(config.min_support > 0.0 && config.min_support <= 1.0,
            "min_support must lie in (0, 1]");
    require(config.max_antecedent_size >= 1, "max_antecedent_size must be >= 1");

    auto mine_group = [&](const std::string& label, const std::vector<ingest::Transaction>& group,
                          const std::string& origin, const std::string& destination) {
        const auto frequent = mine_frequent_itemsets(group, config.min_support,
                                                     config.max_antecedent_size + 1);
        if (stats) stats->push_back({label, group.size(), frequent.size()});
        auto rules = generate_rules(frequent, static_cast<long>(group.size()), config);
        for (auto& r : rules) {
            r.scope_origin = origin;
            r.scope_destination = destination;
        }
        return rules;
    };

    std::vector<std::pair<std::string, std::vector<Rule>>> out;
    switch (config.scope) {
        case MiningConfig::Scope::Global: {
            out.emplace_back("ALL", mine_group("ALL", transactions, "ALL", "ALL"));
            break;
        }
        case MiningConfig::Scope::PerReporter: {
            std::map<std::string, std::vector<ingest::Transaction>> groups;
            for (const auto& t : transactions) groups[t.reporter].push_back(t);
            for (const auto& [reporter, group] : groups) {
                out.emplace_back(reporter, mine_group(reporter, group, "ALL", reporter));
            }
            break;
        }
        case MiningConfig::Scope::PerPair: {
            std::map<std::pair<std::string, std::string>, std::vector<ingest::Transaction>> groups;
            for (const auto& t : transactions) groups[{t.reporter, t.partner}].push_back(t);
            for (const auto& [key, group] : groups) {
                const std::string label = key.first + "|" + key.second;
                out.emplace_back(label, mine_group(label, group, key.second, key.first));
            }
            break;
        }
    }
    return out;
}

} // namespace tradeflow::rules
